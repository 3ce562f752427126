#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "slelab/conformal.hpp"
#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

// half-plane capacity by the exit-height average over the sin-weighted
// circle, sampling killed Brownian motion in the hull complement
McResult hcap_mc(const HullSpec& hull, std::uint64_t replicas,
                 std::uint64_t seed, int workers = 0);

// bubble mass escaping the hull complement, via the excursion-kernel integral
// over the hull boundary (Monte Carlo over the boundary parameter).
// A half-disk centered at the origin is the normalization case: bubbles at 0
// escaping the half-disk itself, total mass 1/r^2.
McResult bubble_gamma_integral(const HullSpec& hull, std::uint64_t replicas,
                               std::uint64_t seed, int workers = 0);

// deterministic quadrature of the same integral
double bubble_gamma_quadrature(const HullSpec& hull, int panels = 4096);

// the same mass through the Schwarzian derivative: -S(Phi)(0)/6
double bubble_schwarzian(const HullSpec& hull);

struct BeurlingResult {
  std::vector<double> eps;
  std::vector<double> prob;
  std::vector<double> std_error;
  double fitted_exponent = 0.0;
};

// P{Brownian motion from 0 exits the unit disk without touching [eps, 1]}
// over the eps grid, plus the log-log exponent fit
BeurlingResult beurling_mc(std::vector<double> eps_grid, std::uint64_t replicas,
                           std::uint64_t seed, int workers = 0);

struct RootedLoop {
  Complex root;
  double duration = 0.0;
  std::vector<Complex> points;  // closed: first == last == root
  double weight = 0.0;
};

struct LoopSample {
  std::vector<RootedLoop> loops;
  double window_mass = 0.0;  // area * (1/s_min - 1/s_max) / (2 pi)
  double s_min = 0.0, s_max = 0.0;
  Complex box_lo, box_hi;
};

// equal-weight sample from the rooted loop measure restricted to roots in the
// box and durations in [s_min, s_max]; each loop carries weight
// window_mass / count
LoopSample sample_rooted_loops(Complex box_lo, Complex box_hi,
                               std::size_t count, double s_min, double s_max,
                               std::size_t bridge_steps, RngStream& rng);

// estimated measure of sampled loops meeting both disks
double loop_mass_hitting_both(const LoopSample& sample, Complex c1, double r1,
                              Complex c2, double r2);

}  // namespace slelab
