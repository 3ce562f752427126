#include "slelab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "slelab/parallel.hpp"

namespace slelab {

namespace {

struct PointHash {
  std::size_t operator()(const LatticePoint& p) const {
    return std::hash<std::uint64_t>()(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) ^
        static_cast<std::uint32_t>(p.y));
  }
};

void saw_dfs(int x, int y, int left, std::vector<std::uint8_t>& visited,
             int stride, std::uint64_t& count) {
  if (left == 0) {
    ++count;
    return;
  }
  static const int dx[4] = {1, -1, 0, 0};
  static const int dy[4] = {0, 0, 1, -1};
  for (int d = 0; d < 4; ++d) {
    int nx = x + dx[d], ny = y + dy[d];
    std::uint8_t& cell = visited[ny * stride + nx];
    if (cell) continue;
    cell = 1;
    saw_dfs(nx, ny, left - 1, visited, stride, count);
    cell = 0;
  }
}

}  // namespace

std::uint64_t saw_count(int n) {
  if (n < 0) throw std::domain_error("saw_count: n must be >= 0");
  if (n > 16)
    throw std::domain_error("saw_count: enumeration capped at n = 16");
  if (n == 0) return 1;
  int stride = 2 * n + 3;
  std::vector<std::uint8_t> visited(stride * stride, 0);
  int origin = n + 1;
  visited[origin * stride + origin] = 1;
  std::uint64_t count = 0;
  saw_dfs(origin, origin, n, visited, stride, count);
  return count;
}

std::pair<double, double> connective_bounds(int n) {
  if (n < 1) throw std::domain_error("connective_bounds: n must be >= 1");
  double upper = std::pow(static_cast<double>(saw_count(n)), 1.0 / n);
  // north/east/west walks with no immediate reversal, ending with a north
  // step: supermultiplicative (concatenation after a north step stays
  // self-avoiding), so d_n^{1/n} certifies a lower bound
  double cn = 1.0, ce = 1.0, cw = 1.0;  // counts by final step at length 1
  for (int k = 2; k <= n; ++k) {
    double nn = cn + ce + cw;
    double ne = cn + ce;
    double nw = cn + cw;
    cn = nn;
    ce = ne;
    cw = nw;
  }
  double lower = std::pow(cn, 1.0 / n);
  return {lower, upper};
}

WalkPath loop_erase(const WalkPath& path) {
  WalkPath out;
  if (path.pts.empty()) return out;
  std::unordered_map<LatticePoint, std::size_t, PointHash> index;
  for (const auto& p : path.pts) {
    auto it = index.find(p);
    if (it != index.end()) {
      // erase the loop back to the previous visit
      for (std::size_t j = it->second + 1; j < out.pts.size(); ++j)
        index.erase(out.pts[j]);
      out.pts.resize(it->second + 1);
    } else {
      index.emplace(p, out.pts.size());
      out.pts.push_back(p);
    }
  }
  return out;
}

WalkPath sample_lerw(const GridRegion& region, LatticePoint start,
                     const std::function<bool(LatticePoint)>& target,
                     RngStream& rng, int max_tries) {
  if (!region.interior(start))
    throw std::domain_error("sample_lerw: start must be interior");
  bool reachable = false;
  for (int x = 0; x < region.w && !reachable; ++x) {
    for (int y : {0, region.h - 1})
      if (target({x, y})) reachable = true;
  }
  for (int y = 0; y < region.h && !reachable; ++y) {
    for (int x : {0, region.w - 1})
      if (target({x, y})) reachable = true;
  }
  if (!reachable)
    throw std::domain_error("sample_lerw: target set misses the boundary");
  static const int dx[4] = {1, -1, 0, 0};
  static const int dy[4] = {0, 0, 1, -1};
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    WalkPath walk;
    walk.pts.push_back(start);
    LatticePoint p = start;
    while (region.interior(p)) {
      int d = static_cast<int>(rng.next_u64() & 3ull);
      p = {p.x + dx[d], p.y + dy[d]};
      walk.pts.push_back(p);
    }
    if (target(p)) return loop_erase(walk);
  }
  throw std::runtime_error("sample_lerw: target not hit within the retry cap");
}

double square_walk_right_edge_mass(int n, int i, int k, int m) {
  // f_q(i, k) = sinh(r_q i) sin(s_q k), discrete harmonic on {1..n-1}^2 when
  // cosh(r_q) + cos(s_q) = 2
  double acc = 0.0;
  for (int q = 1; q < n; ++q) {
    double s = std::numbers::pi * q / n;
    double r = std::acosh(2.0 - std::cos(s));
    // sinh ratio computed in logs to avoid overflow for large q
    double lr = (i - n) * r + std::log1p(-std::exp(-2.0 * r * i)) -
                std::log1p(-std::exp(-2.0 * r * n));
    acc += 2.0 / n * std::exp(lr) * std::sin(s * k) * std::sin(s * m);
  }
  return acc;
}

TriangularColoring TriangularColoring::random(int i_lo, int i_hi, int rows,
                                              RngStream& rng) {
  TriangularColoring c;
  c.i_lo = i_lo;
  c.i_hi = i_hi;
  c.rows = rows;
  c.color.assign(static_cast<std::size_t>(i_hi - i_lo + 1) * (rows + 1), 0);
  for (int j = 0; j <= rows; ++j) {
    for (int i = i_lo; i <= i_hi; ++i) {
      bool is_black = j == 0 ? (i < 0) : rng.coin();
      c.set({i, j}, is_black);
    }
  }
  return c;
}

TriangularColoring TriangularColoring::filled(int i_lo, int i_hi, int rows,
                                              bool black_fill) {
  TriangularColoring c;
  c.i_lo = i_lo;
  c.i_hi = i_hi;
  c.rows = rows;
  c.color.assign(static_cast<std::size_t>(i_hi - i_lo + 1) * (rows + 1), 0);
  for (int j = 0; j <= rows; ++j)
    for (int i = i_lo; i <= i_hi; ++i)
      c.set({i, j}, j == 0 ? (i < 0) : black_fill);
  return c;
}

bool TriangularColoring::black(LatticePoint p) const {
  if (!contains(p)) return false;
  return color[static_cast<std::size_t>(p.y) * (i_hi - i_lo + 1) +
               (p.x - i_lo)] != 0;
}

void TriangularColoring::set(LatticePoint p, bool is_black) {
  color[static_cast<std::size_t>(p.y) * (i_hi - i_lo + 1) + (p.x - i_lo)] =
      is_black ? 1 : 0;
}

TriangularColoring TriangularColoring::mirrored() const {
  // reflection about the vertical line through the boundary split point:
  // (i, j) -> (-1 - i - j, j), colors flipped; this preserves the split
  // convention (black strictly left of the origin on row zero)
  TriangularColoring c;
  c.i_lo = -1 - i_hi - rows;
  c.i_hi = -1 - i_lo;
  c.rows = rows;
  c.color.assign(static_cast<std::size_t>(c.i_hi - c.i_lo + 1) * (rows + 1), 0);
  for (int j = 0; j <= rows; ++j)
    for (int i = c.i_lo; i <= c.i_hi; ++i)
      c.set({i, j}, j == 0 ? (i < 0) : false);
  for (int j = 0; j <= rows; ++j) {
    for (int i = i_lo; i <= i_hi; ++i) {
      LatticePoint q{-1 - i - j, j};
      if (q.x >= c.i_lo && q.x <= c.i_hi && j > 0) c.set(q, !black({i, j}));
    }
  }
  return c;
}

ExplorationResult percolation_exploration(const TriangularColoring& col) {
  // state: a crossed lattice edge as ordered pair (B black, W white) plus the
  // previously examined third site; the next third site is the common
  // neighbor of B and W other than the previous one
  ExplorationResult out;
  auto common_neighbors = [](LatticePoint a, LatticePoint b) {
    // axial-coordinate triangular lattice: the two shared neighbors
    // of adjacent a, b are a+b-c for the two triangles; enumerate directly
    static const int dx[6] = {1, 0, -1, -1, 0, 1};
    static const int dy[6] = {0, 1, 1, 0, -1, -1};
    std::pair<LatticePoint, LatticePoint> res;
    int found = 0;
    for (int d = 0; d < 6 && found < 2; ++d) {
      LatticePoint p{a.x + dx[d], a.y + dy[d]};
      int ddx = p.x - b.x, ddy = p.y - b.y;
      bool adj = false;
      for (int e = 0; e < 6; ++e)
        if (ddx == dx[e] && ddy == dy[e]) adj = true;
      if (adj) {
        (found == 0 ? res.first : res.second) = p;
        ++found;
      }
    }
    return res;
  };

  LatticePoint B{-1, 0}, W{0, 0};
  LatticePoint prev_third{0, -1};  // below the base: start moving upward
  std::unordered_set<std::uint64_t> seen;
  auto edge_key = [](LatticePoint a, LatticePoint b) {
    auto enc = [](LatticePoint p) {
      return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(p.x))
              << 16) |
             static_cast<std::uint16_t>(p.y);
    };
    std::uint64_t ka = enc(a), kb = enc(b);
    return (std::min(ka, kb) << 32) | std::max(ka, kb);
  };
  out.edges.emplace_back(B, W);
  seen.insert(edge_key(B, W));
  for (;;) {
    auto [t1, t2] = common_neighbors(B, W);
    LatticePoint third = (t1 == prev_third) ? t2 : t1;
    if (!col.contains(third)) {
      out.exited = true;
      return out;
    }
    if (col.black(third)) {
      prev_third = B;
      B = third;
    } else {
      prev_third = W;
      W = third;
    }
    std::uint64_t key = edge_key(B, W);
    if (!seen.insert(key).second) {
      // recrossing an edge is impossible for this walk; bail out defensively
      out.exited = false;
      return out;
    }
    out.edges.emplace_back(B, W);
    if (out.edges.size() > col.color.size() * 4) {
      out.exited = false;
      return out;
    }
  }
}

McResult triangle_crossing_mc(double x, int n_side, std::uint64_t replicas,
                              std::uint64_t seed, int workers, bool round_up) {
  if (!(x > 0.0 && x < 1.0))
    throw std::domain_error("triangle_crossing_mc: x must be in (0,1)");
  if (n_side < 4) throw std::domain_error("triangle_crossing_mc: n too small");
  const int N = n_side;
  // triangle rows j = 0..N, row j holds sites i = 0..N-j; apex (0, N)
  const int seg = std::max(
      1, static_cast<int>(round_up ? std::ceil(x * N) : std::floor(x * N)));
  auto idx_base = [N](int j) {
    // offset of row j in the packed array
    return j * (N + 2) - j * (j + 1) / 2;
  };
  const int total = idx_base(N) + 1;
  std::vector<int> row_of(total);
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i <= N - j; ++i) row_of[idx_base(j) + i] = j;
  auto wins = run_replicas<double>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        std::vector<std::uint8_t> white(total);
        for (int t = 0; t < total; ++t) white[t] = rng.coin() ? 1 : 0;
        // BFS through white sites from the white bottom row toward the
        // apex-side segment of the left edge: sites (0, j), j >= N - seg
        std::vector<int> stack;
        std::vector<std::uint8_t> mark(total, 0);
        stack.reserve(N);
        for (int i = 0; i <= N; ++i) {
          int t = idx_base(0) + i;
          if (white[t]) {
            mark[t] = 1;
            stack.push_back(t);
          }
        }
        while (!stack.empty()) {
          int t = stack.back();
          stack.pop_back();
          int j = row_of[t];
          int i = t - idx_base(j);
          if (i == 0 && j >= N - seg) return 1.0;
          static const int di[6] = {1, -1, 0, 0, 1, -1};
          static const int dj[6] = {0, 0, 1, -1, -1, 1};
          for (int d = 0; d < 6; ++d) {
            int ni = i + di[d], nj = j + dj[d];
            if (nj < 0 || nj > N || ni < 0 || ni > N - nj) continue;
            int nt = idx_base(nj) + ni;
            if (!white[nt] || mark[nt]) continue;
            mark[nt] = 1;
            stack.push_back(nt);
          }
        }
        return 0.0;
      });
  McResult r = summarize(wins);
  r.std_error = std::sqrt(std::max(r.estimate * (1.0 - r.estimate), 1e-300) /
                          static_cast<double>(replicas));
  r.extras["segment_sites"] = static_cast<double>(seg);
  return r;
}

}  // namespace slelab
