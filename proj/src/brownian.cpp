#include "slelab/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slelab/parallel.hpp"

namespace slelab {

namespace {

constexpr double kPi = std::numbers::pi;
// boundary layer width in units of the step standard deviation; compensates
// for undetected within-step boundary crossings
constexpr double kBoundaryLayer = 0.5826;

double clamp_step(double d2, double lo, double hi) {
  double h = 0.1 * d2;
  return std::clamp(h, lo, hi);
}

}  // namespace

McResult hcap_mc(const HullSpec& hull, std::uint64_t replicas,
                 std::uint64_t seed, int workers) {
  if (hull.empty()) {
    McResult r;
    r.replicas = replicas;
    return r;
  }
  // rescale so the hull fits in the closed unit half-disk
  double scale = hull.rad();
  HullSpec unit = hull;
  unit.x0 /= scale;
  unit.size /= scale;
  auto vals = run_replicas<double>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        // theta with density (2/pi) sin^2(theta): the importance weight then
        // divides out sin(theta), so the closed half-disk estimates with
        // zero variance.  CDF F = (theta - sin cos)/pi inverted by bisection.
        double u = rng.uniform();
        double lo = 0.0, hi = kPi;
        for (int it = 0; it < 50; ++it) {
          double mid = 0.5 * (lo + hi);
          double F = (mid - std::sin(mid) * std::cos(mid)) / kPi;
          (F < u ? lo : hi) = mid;
        }
        double theta = 0.5 * (lo + hi);
        double st = std::sin(theta);
        double x = std::cos(theta), y = st;
        // killed Brownian motion in H minus hull until it exits
        for (;;) {
          double d_hull = unit.distance(Complex(x, y));
          double d = std::min(y, d_hull);
          double h = clamp_step(d * d, 1e-6, 0.01);
          double sd = std::sqrt(h);
          if (d <= kBoundaryLayer * sd) {
            // absorbed; height 0 on R, current height if the hull was hit
            return (d_hull < y ? y : 0.0) / st;
          }
          x += sd * rng.normal();
          y += sd * rng.normal();
          if (y <= 0.0) return 0.0;
          // remote excursions cannot contribute measurably
          if (x * x + y * y > 2500.0) return 0.0;
        }
      });
  McResult r = summarize(vals);
  r.estimate *= scale * scale;
  r.std_error *= scale * scale;
  return r;
}

namespace {

// integrand of the escaping-bubble mass over the hull boundary parameter.
// Conventions: excursion kernel of the complement composed with the
// scale-free Poisson kernel Im(w)/|w|^2 (the pi-free form; the half-disk at
// the origin then integrates to exactly 1/r^2).
struct BubbleIntegrand {
  const HullSpec& hull;
  double lo = 0.0, hi = 0.0;

  explicit BubbleIntegrand(const HullSpec& h) : hull(h) {
    switch (hull.kind) {
      case HullSpec::Kind::half_disk:
        lo = 0.0;
        hi = kPi;
        break;
      case HullSpec::Kind::vertical_slit:
        lo = 0.0;
        hi = kPi;  // phi in (0, pi/2) each side, folded into one interval
        break;
      default:
        throw std::domain_error("bubble mass: unsupported hull kind");
    }
  }

  double operator()(double s) const {
    if (hull.kind == HullSpec::Kind::half_disk) {
      double x0 = hull.x0, r = hull.size;
      if (x0 == 0.0) {
        // normalization case: bubbles at 0 escaping the half-disk itself
        double st = std::sin(s);
        return 2.0 / kPi * st * st / (r * r);
      }
      Complex w = Complex(x0, 0.0) + r * std::polar(1.0, s);
      double phi_w = x0 + 2.0 * r * std::cos(s);   // Phi on the arc
      double phi_0 = -r * r / x0;                   // Phi(0)
      double dphi_w = 2.0 * std::sin(s);            // |Phi'| on the arc
      double dphi_0 = 1.0 - r * r / (x0 * x0);
      double gap = phi_w - phi_0;
      double pk = w.imag() / std::norm(w);          // pi * Poisson kernel
      return dphi_0 * dphi_w / (kPi * gap * gap) * pk * r;
    }
    // vertical slit at x0, height hh: fold the two sides into s in (0, pi)
    double x0 = hull.x0, hh = hull.size;
    bool right = s < kPi / 2.0;
    double phi = right ? s : kPi - s;  // in (0, pi/2)
    double y = hh * std::sin(phi);
    double root = hh * std::cos(phi);  // sqrt(h^2 - y^2)
    double width = std::sqrt(x0 * x0 + hh * hh);
    double phi_w = x0 + (right ? root : -root);
    double phi_0 = x0 - width;  // hull to the right of 0 assumed, x0 > 0
    if (x0 < 0.0) phi_0 = x0 + width;
    double dphi_0 = std::fabs(x0) / width;
    double gap = phi_w - phi_0;
    double pk = y / (x0 * x0 + y * y);
    // |Phi'(w)| |dw| = (y / sqrt(h^2 - y^2)) h cos(phi) dphi = y dphi,
    // which absorbs the root singularity at the tip
    return dphi_0 * y / (kPi * gap * gap) * pk;
  }
};

}  // namespace

McResult bubble_gamma_integral(const HullSpec& hull, std::uint64_t replicas,
                               std::uint64_t seed, int workers) {
  if (hull.empty()) {
    McResult r;
    r.replicas = replicas;
    return r;
  }
  if (hull.kind == HullSpec::Kind::half_disk && hull.x0 != 0.0 &&
      std::fabs(hull.x0) <= hull.size)
    throw std::domain_error("bubble_gamma_integral: hull touches the origin");
  if (hull.kind == HullSpec::Kind::vertical_slit && hull.x0 == 0.0)
    throw std::domain_error("bubble_gamma_integral: hull touches the origin");
  BubbleIntegrand f(hull);
  auto vals = run_replicas<double>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double s = f.lo + (f.hi - f.lo) * rng.uniform();
        return (f.hi - f.lo) * f(s);
      });
  return summarize(vals);
}

double bubble_gamma_quadrature(const HullSpec& hull, int panels) {
  if (hull.empty()) return 0.0;
  BubbleIntegrand f(hull);
  // midpoint rule; the integrand is smooth inside the interval
  double h = (f.hi - f.lo) / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) acc += f(f.lo + (i + 0.5) * h);
  return acc * h;
}

double bubble_schwarzian(const HullSpec& hull) {
  if (hull.empty()) return 0.0;
  if (!(hull.distance(Complex(0.0, 0.0)) > 0.0))
    throw std::domain_error("bubble_schwarzian: hull touches the origin");
  MapJet jet = hull_map_jet(hull, Complex(0.0, 0.0));
  double val = -schwarzian(jet).real() / 6.0;
  if (!(val >= 0.0))
    throw std::runtime_error("bubble_schwarzian: negative mass");
  return val;
}

BeurlingResult beurling_mc(std::vector<double> eps_grid, std::uint64_t replicas,
                           std::uint64_t seed, int workers) {
  for (double e : eps_grid)
    if (!(e > 0.0 && e <= 1.0))
      throw std::domain_error("beurling_mc: eps must be in (0, 1]");
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<double>());
  std::size_t ne = eps_grid.size();
  double eps_min = eps_grid.back();
  // One walk serves the whole grid: a walk killed on [eps, 1] behaves exactly
  // like the free walk up to its first touch of that set, so recording the
  // rightmost touched point of [eps_min, 1] decides every eps at once:
  // the walk avoids [eps, 1] iff its rightmost touch lies below eps.
  auto rows = run_replicas<double>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double x = 0.0, y = 0.0;
        double touched = 0.0;  // rightmost touched point of [eps_min, 1]
        for (;;) {
          double r2 = x * x + y * y;
          double d_circle = 1.0 - std::sqrt(r2);
          double tx = std::clamp(x, eps_min, 1.0);
          double dseg = std::hypot(x - tx, y);
          double d = std::min(d_circle, dseg);
          double h = clamp_step(d * d, 1e-8, 0.005);
          double sd = std::sqrt(h);
          if (d_circle <= kBoundaryLayer * sd) return touched;
          if (dseg <= kBoundaryLayer * sd) touched = std::max(touched, tx);
          x += sd * rng.normal();
          y += sd * rng.normal();
        }
      });
  BeurlingResult out;
  out.eps = eps_grid;
  out.prob.assign(ne, 0.0);
  out.std_error.assign(ne, 0.0);
  for (double touched : rows) {
    for (std::size_t i = 0; i < ne; ++i)
      if (touched < eps_grid[i]) out.prob[i] += 1.0;
  }
  for (std::size_t i = 0; i < ne; ++i) {
    double p = out.prob[i] / static_cast<double>(replicas);
    out.prob[i] = p;
    out.std_error[i] = std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                                 static_cast<double>(replicas));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ne; ++i) {
    if (out.prob[i] > 0.0) {
      lx.push_back(std::log(out.eps[i]));
      ly.push_back(std::log(out.prob[i]));
    }
  }
  out.fitted_exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
  return out;
}

LoopSample sample_rooted_loops(Complex box_lo, Complex box_hi,
                               std::size_t count, double s_min, double s_max,
                               std::size_t bridge_steps, RngStream& rng) {
  if (!(s_min > 0.0) || !(s_max > s_min))
    throw std::domain_error("sample_rooted_loops: need 0 < s_min < s_max");
  double wx = box_hi.real() - box_lo.real();
  double wy = box_hi.imag() - box_lo.imag();
  if (!(wx > 0.0) || !(wy > 0.0))
    throw std::domain_error("sample_rooted_loops: empty box");
  if (bridge_steps < 2) bridge_steps = 2;
  LoopSample out;
  out.s_min = s_min;
  out.s_max = s_max;
  out.box_lo = box_lo;
  out.box_hi = box_hi;
  double area = wx * wy;
  out.window_mass = area / (2.0 * kPi) * (1.0 / s_min - 1.0 / s_max);
  double w = out.window_mass / static_cast<double>(count);
  out.loops.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RootedLoop loop;
    loop.root = Complex(box_lo.real() + wx * rng.uniform(),
                        box_lo.imag() + wy * rng.uniform());
    // duration density 1/(2 pi s^2) restricted to the window
    double u = rng.uniform();
    loop.duration =
        1.0 / (1.0 / s_min - u * (1.0 / s_min - 1.0 / s_max));
    loop.weight = w;
    // Brownian bridge of the given duration, closed exactly
    std::size_t n = bridge_steps;
    std::vector<double> bx(n + 1, 0.0), by(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      bx[k] = bx[k - 1] + rng.normal();
      by[k] = by[k - 1] + rng.normal();
    }
    double sc = std::sqrt(loop.duration / static_cast<double>(n));
    loop.points.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      double frac = static_cast<double>(k) / static_cast<double>(n);
      loop.points.push_back(loop.root +
                            Complex(sc * (bx[k] - frac * bx[n]),
                                    sc * (by[k] - frac * by[n])));
    }
    loop.points.back() = loop.root;  // exact closure
    out.loops.push_back(std::move(loop));
  }
  return out;
}

double loop_mass_hitting_both(const LoopSample& sample, Complex c1, double r1,
                              Complex c2, double r2) {
  double acc = 0.0;
  for (const auto& loop : sample.loops) {
    bool hit1 = false, hit2 = false;
    for (const auto& p : loop.points) {
      hit1 = hit1 || std::abs(p - c1) <= r1;
      hit2 = hit2 || std::abs(p - c2) <= r2;
      if (hit1 && hit2) break;
    }
    if (hit1 && hit2) acc += loop.weight;
  }
  return acc;
}

}  // namespace slelab
