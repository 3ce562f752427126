#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "slelab/conformal.hpp"
#include "slelab/loewner.hpp"
#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

// ---------------------------------------------------------------------------
// driving-path samplers
// ---------------------------------------------------------------------------

// chordal driver: U_k = -(B_{t_k}) as partial sums of N(0, dt), hcap rate 2/kappa
DrivingPath sample_chordal_driver(double kappa, double dt, std::size_t steps,
                                  RngStream& rng);

struct KappaRhoPath {
  DrivingPath driving;
  std::vector<double> force_point;  // K_t on the same grid
  bool absorbed = false;
  double absorb_time = -1.0;
};

// dU = q/(U-K) dt - dW, dK = a/(K-U) dt with q = rho/kappa; with rho = 0 the
// driving reduces bit-for-bit to the chordal driver at the same seed
KappaRhoPath sample_kappa_rho_driver(double kappa, double rho, double x,
                                     double dt, std::size_t steps, RngStream& rng);

struct RadialDriverPath {
  DrivingPath driving;
  bool target_swallowed = false;
  double t_w = -1.0;            // swallowing time when reached
  double final_upsilon = -1.0;  // conformal radius of the target at the end
};

// dU = (3a-1) X/(X^2+Y^2) dt - dW with (X, Y) tracking the target w; one
// normal per grid step, so at kappa = 6 the path equals the chordal one
RadialDriverPath sample_radial_driver(double kappa, Complex w, double dt,
                                      std::size_t steps, RngStream& rng);

// chordal weighted by the Green's function: dU = (4a-1) X/(X^2+Y^2) dt - dW
RadialDriverPath sample_two_sided_driver(double kappa, Complex z, double dt,
                                         std::size_t steps, RngStream& rng);

struct SubdomainDriverPath {
  DrivingPath driving;
  bool truncated = false;  // tip reached the removed boundary (tau_D)
  double tau = -1.0;
  std::vector<double> phi_prime;  // Phi_t'(U_t) along the way
};

// Taylor jet of the evolving hull map Phi_t at the driving point, advanced by
// the conjugated Loewner flow plus the Ito transport of the expansion point.
// Carries plain coefficients c[n] ~ Phi^(n)(U_t)/n!, truncated at kOrder.
struct DomainJet {
  static constexpr int kOrder = 12;
  double a = 1.0;
  std::vector<double> c;

  static DomainJet initial(const HullSpec& hull, double a, double u0 = 0.0);
  void advance(double dt, double du);
  double phi_prime() const { return c[1]; }
  double phi_ratio() const { return 2.0 * c[2] / c[1]; }  // Phi''/Phi'
  double schwarzian() const;
};

// SLE in H minus hull via the drifted driver dU = b (log Phi_t')'(U_t) dt - dW.
// Phi_t is carried as a Taylor jet at U_t evolved by the conjugated Loewner
// flow; order-N truncation with N = 12.  Runs until tau_D or the grid ends.
// At kappa = 6 the drift vanishes and the produced path is bit-identical to
// the chordal driver with the same seed.
SubdomainDriverPath subdomain_driver(double kappa, const HullSpec& hull,
                                     double dt, std::size_t steps, RngStream& rng);

// ---------------------------------------------------------------------------
// Monte Carlo estimators over the one-dimensional diffusions
// ---------------------------------------------------------------------------

// probability that the Bessel process dZ = a/Z dt + dB from x hits 0 before
// the horizon
McResult bessel_hit_probability(double a, double x, double horizon,
                                std::uint64_t replicas, std::uint64_t seed,
                                int workers = 0);

struct MomentCurve {
  std::vector<double> t;
  std::vector<double> mean;       // E[J_t] estimates
  std::vector<double> std_error;
  std::vector<double> mom;        // median-of-means companion estimate
  double slope = 0.0;             // d log mean / d log t (or / dt, see op)
  std::uint64_t absorbed = 0;
  std::vector<double> martingale;      // flatness check values per t
  std::vector<double> martingale_se;
};

// E[g'_t(x)^lambda] along the Bessel flow, J_t = exp(-a lambda int ds/X^2);
// slope is fitted on log E vs log t; the martingale column is E[X_t^q J_t]
// normalized by x^q (flat at 1)
MomentCurve boundary_moment(double lambda, double a, double x,
                            const std::vector<double>& t_grid,
                            std::uint64_t replicas, std::uint64_t seed,
                            int workers = 0);

// importance-sampled variant: tilted Bessel dX = (a+q)/X dt + dW with weight
// x^q X_t^{-q}; same estimand as boundary_moment at each grid time
MomentCurve boundary_moment_importance(double lambda, double a, double x,
                                       const std::vector<double>& t_grid,
                                       std::uint64_t replicas, std::uint64_t seed,
                                       int workers = 0);

// E[|g'_t(e^{2i theta})|^lambda] along the radial angular diffusion
// dPsi = a cot(Psi) dt + dW (simulated in log tan(Psi/2)); slope is fitted on
// log E vs t; extras: beta = -slope/(2a).  The martingale column tracks
// E[e^{kt} sin^r(Psi) J_t] with r = q(lambda), k = a lambda + r/2.
MomentCurve radial_moment(double lambda, double a, double theta,
                          const std::vector<double>& t_grid,
                          std::uint64_t replicas, std::uint64_t seed,
                          int workers = 0);

// E[g'_t(x)^l1 g'_t(y)^l2] for y < 0 < x with the coupled processes
// X = g(x)-U, Xt = U-g(y); the martingale column tracks
// X^q Xt^qt (X+Xt)^r J1 J2 normalized by its t=0 value
MomentCurve two_sided_moment(double l1, double l2, double a, double x, double y,
                             const std::vector<double>& t_grid,
                             std::uint64_t replicas, std::uint64_t seed,
                             int workers = 0);

// P{T_{-y} > T_1}: race of the two boundary Bessel processes under a shared
// chordal driver until one is swallowed
McResult cardy_hitting_mc(double kappa, double y, std::uint64_t replicas,
                          double dt, std::uint64_t seed, int workers = 0);

struct TailResult {
  std::vector<double> delta;
  std::vector<double> prob;
  std::vector<double> std_error;
  double fitted_exponent = 0.0;
  std::uint64_t censored = 0;
};

// tail of the final conformal radius: P{Upsilon_inf(z) <= delta} over the
// delta grid plus a log-log exponent fit
TailResult green_tail_mc(double kappa, Complex z, std::vector<double> deltas,
                         std::uint64_t replicas, std::uint64_t seed,
                         int workers = 0, double horizon = 2000.0);

// fraction of chordal traces avoiding the hull entirely (restriction event),
// classified by sentinel conformal radii on the hull arc with local
// refinement; extras report hit/censor counts
McResult restriction_avoid_mc(double kappa, const HullSpec& hull,
                              std::uint64_t replicas, double dt,
                              std::uint64_t seed, int workers = 0);

// ---------------------------------------------------------------------------
// diffusion helpers for distributional checks
// ---------------------------------------------------------------------------

// long-run samples of the angular diffusion dTheta = 2a cot(Theta) dt + dW
std::vector<double> stationary_angle_samples(double a, std::size_t count,
                                             double burn_in, double spacing,
                                             std::uint64_t seed, int workers = 0);

// Theta at the time the conformal radius reaches upsilon_star, via the
// two-dimensional chordal-weighted-by-G flow started at z
std::vector<double> two_sided_theta_via_chordal(double a, Complex z,
                                                double upsilon_star,
                                                std::size_t count,
                                                std::uint64_t seed,
                                                int workers = 0);

// same law via the one-dimensional radial route: run dTheta = 2a cot Theta dt
// + dW for time s* = log(Im z / upsilon_star)/(2a)
std::vector<double> two_sided_theta_via_radial(double a, Complex z,
                                               double upsilon_star,
                                               std::size_t count,
                                               std::uint64_t seed,
                                               int workers = 0);

}  // namespace slelab
