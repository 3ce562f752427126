#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "slelab/conformal.hpp"

namespace slelab {

// Driving function sampled on a uniform capacity-time grid t_k = k*dt.
// Between grid points the value follows the declared interpolation:
//   sqrt_wave: u(t_{k-1} + s) = u_{k-1} + du_k * sqrt(s/dt)  (matches the
//              tilted-slit elementary map exactly)
//   piecewise_const: u held at u_{k-1} over the cell (vertical-slit scheme)
struct DrivingPath {
  enum class Interp { sqrt_wave, piecewise_const };

  double a = 1.0;  // hcap rate: hcap(gamma(0,t]) = a*t
  double dt = 0.0;
  std::vector<double> u;
  Interp interp = Interp::sqrt_wave;

  DrivingPath() = default;
  DrivingPath(double a_, double dt_, std::vector<double> values,
              Interp interp_ = Interp::sqrt_wave);

  std::size_t steps() const { return u.empty() ? 0 : u.size() - 1; }
  double total_time() const { return dt * static_cast<double>(steps()); }
  double value(double t) const;  // interpolated evaluation
  // evaluation inside cell k at local offset s in [0, dt]; the
  // piecewise-constant rule stays on u[k] over the whole half-open cell
  double value_in_cell(std::size_t k, double s) const;
};

struct SwallowedError : std::runtime_error {
  std::size_t step;
  explicit SwallowedError(std::size_t k)
      : std::runtime_error("point swallowed at step " + std::to_string(k)),
        step(k) {}
};

struct InstabilityError : std::runtime_error {
  std::size_t step;
  explicit InstabilityError(std::size_t k)
      : std::runtime_error("numerical instability at step " + std::to_string(k)),
        step(k) {}
};

// Composition of elementary slit maps, one per driving cell.  Forward
// evaluation is g_T = e_M o ... o e_1; hcap additivity a*sum(dt) is exact.
struct SlitMapChain {
  enum class StepKind { tilted, vertical };

  double a = 1.0;
  StepKind kind = StepKind::tilted;
  double dt = 0.0;
  std::vector<double> u;  // grid values, same layout as DrivingPath

  static SlitMapChain from_driving(const DrivingPath& path);
  static SlitMapChain from_driving(const DrivingPath& path, StepKind kind);

  std::size_t steps() const { return u.empty() ? 0 : u.size() - 1; }
  double total_hcap() const { return a * dt * static_cast<double>(steps()); }

  // g_{t_k}(z) composing the first k elementary maps (k = steps() for all)
  Complex forward(Complex z, std::size_t k) const;
  Complex forward(Complex z) const { return forward(z, steps()); }

  // f_{t_k}(w) composing elementary inverses in reverse order
  Complex inverse(Complex w, std::size_t k) const;
};

struct PointState {
  double t = 0.0;
  double x = 0.0;        // Re g_t(z) - u(t)
  double y = 0.0;        // Im g_t(z)
  Complex gprime = 1.0;  // g_t'(z)
  double upsilon = 0.0;  // y / |gprime|
  bool alive = true;
};

struct Trajectory {
  Complex z0;
  std::vector<PointState> samples;  // at grid times while alive
  bool swallowed = false;
  double swallow_time = -1.0;
};

// Track z under the chordal flow dg = a dt / (g - u(t)), d log g' = -a dt/Z^2.
// Fourth-order Runge-Kutta between grid points with substeps scaled to the
// local distance |Z|.  A point is declared swallowed when |Z| falls below the
// cutoff, by default max(1e-7, 10*sqrt(a*dt)); pass a smaller cutoff for
// fine-grained tracking.
Trajectory evolve_point(const DrivingPath& path, Complex z, double horizon = -1.0,
                        double swallow_cutoff = -1.0);

struct Trace {
  double a = 1.0;
  double dt = 0.0;
  double tip_eps = 0.0;
  std::vector<double> t;
  std::vector<Complex> gamma;
  // diagnostic: integral of |f_T'| over the tip offset (0, tip_eps],
  // estimated from the final inverse map; small values indicate a
  // well-resolved tip
  double tip_curve_bound = 0.0;
};

// gamma(t_k) ~ f_{t_k}(u_k + i*tip_eps) by reverse composition of the
// elementary inverse maps.  tip_eps <= 0 selects 1e-3*sqrt(a*T).
Trace reverse_trace(const DrivingPath& path, double tip_eps = -1.0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Koebe sandwich [upsilon/4, 4*upsilon] around the distance to the pioneer set
Interval koebe_distance(const PointState& p);

struct RadialSample {
  double t = 0.0;
  Complex gz;         // gtilde_t(z)
  Complex gprime_z;   // gtilde_t'(z)
  double log_gp0 = 0.0;  // log gtilde_t'(0) = rate * t, exact
  bool alive = true;
};

// Disk Loewner flow dg = rate * g (e + g)/(e - g), e = exp(2i u(t)), toward
// the boundary point exp(2i u).  rate = 1 gives log g'(0) = t.
std::vector<RadialSample> radial_disk_flow(const DrivingPath& angles, Complex z,
                                           double horizon = -1.0,
                                           double rate = 1.0);

void write_trace_csv(std::ostream& os, const Trace& trace);
void write_chain_csv(std::ostream& os, const SlitMapChain& chain);

}  // namespace slelab
