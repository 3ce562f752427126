#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

struct LatticePoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

struct WalkPath {
  std::vector<LatticePoint> pts;
};

// exact number of self-avoiding walks of length n from the origin in Z^2;
// n is capped at 16 (enumeration blows up combinatorially beyond)
std::uint64_t saw_count(int n);

// certified bracket for the connective constant e^beta from length-n data:
// upper bound J_n^{1/n} (submultiplicativity); lower bound from the
// supermultiplicative family of north/east/west walks without reversals
// ending in a north step
std::pair<double, double> connective_bounds(int n);

// chronological loop erasure; keeps the first and last point
WalkPath loop_erase(const WalkPath& path);

// rectangular grid {0..w-1} x {0..h-1}; the frame is absorbing boundary
struct GridRegion {
  int w = 0, h = 0;
  bool inside(LatticePoint p) const {
    return p.x >= 0 && p.x < w && p.y >= 0 && p.y < h;
  }
  bool interior(LatticePoint p) const {
    return p.x > 0 && p.x < w - 1 && p.y > 0 && p.y < h - 1;
  }
};

// loop-erased random walk from start to the target subset of the boundary:
// simple random walk run to its first boundary hit, accepted when the exit
// lies in the target, then loop-erased
WalkPath sample_lerw(const GridRegion& region, LatticePoint start,
                     const std::function<bool(LatticePoint)>& target,
                     RngStream& rng, int max_tries = 1000000);

// exact discrete harmonic measure of the right edge for the random walk on
// {1..n-1}^2 (sinh/sin eigenbasis): probability that the walk from (i, k)
// exits at (n, m)
double square_walk_right_edge_mass(int n, int i, int k, int m);

// Site coloring of a rhombic patch of the triangular lattice in axial
// coordinates: sites (i, j) with i in [i_lo, i_hi], j in [0, rows].
// Row j = 0 carries the split boundary condition: black for i < 0 and white
// for i >= 0.
struct TriangularColoring {
  int i_lo = 0, i_hi = 0, rows = 0;
  std::vector<std::uint8_t> color;  // 1 = black, 0 = white

  static TriangularColoring random(int i_lo, int i_hi, int rows, RngStream& rng);
  static TriangularColoring filled(int i_lo, int i_hi, int rows, bool black);

  bool contains(LatticePoint p) const {
    return p.x >= i_lo && p.x <= i_hi && p.y >= 0 && p.y <= rows;
  }
  bool black(LatticePoint p) const;
  void set(LatticePoint p, bool is_black);
  // mirror i -> -i - j (reflection about the vertical axis) with colors flipped
  TriangularColoring mirrored() const;
};

struct ExplorationResult {
  // interface as the sequence of crossed lattice edges (black left, white
  // right); each entry is the ordered pair (black site, white site)
  std::vector<std::pair<LatticePoint, LatticePoint>> edges;
  bool exited = false;  // left the colored region
};

// turn-by-turn percolation exploration from the boundary split; deterministic
// in the coloring and never recrossing an edge
ExplorationResult percolation_exploration(const TriangularColoring& coloring);

// crossing probability between the bottom side and the apex-side segment of
// relative length x in the lattice equilateral triangle with N+1 base sites;
// round_up picks the other rounding of x*N to bound the lattice bias
McResult triangle_crossing_mc(double x, int n_side, std::uint64_t replicas,
                              std::uint64_t seed, int workers = 0,
                              bool round_up = false);

}  // namespace slelab
