#include "slelab/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace slelab {

DrivingPath::DrivingPath(double a_, double dt_, std::vector<double> values,
                         Interp interp_)
    : a(a_), dt(dt_), u(std::move(values)), interp(interp_) {
  if (!(a > 0.0)) throw std::domain_error("DrivingPath: hcap rate must be > 0");
  if (!(dt > 0.0)) throw std::domain_error("DrivingPath: dt must be > 0");
  if (u.empty()) throw std::domain_error("DrivingPath: needs at least u0");
  for (double v : u)
    if (!std::isfinite(v)) throw std::domain_error("DrivingPath: non-finite value");
}

double DrivingPath::value(double t) const {
  if (t <= 0.0) return u.front();
  double T = total_time();
  if (t >= T) return u.back();
  auto k = static_cast<std::size_t>(t / dt);
  if (k >= steps()) k = steps() - 1;
  return value_in_cell(k, t - static_cast<double>(k) * dt);
}

double DrivingPath::value_in_cell(std::size_t k, double s) const {
  if (k >= steps()) return u.back();
  if (interp == Interp::piecewise_const) return u[k];
  if (s <= 0.0) return u[k];
  if (s >= dt) return u[k + 1];
  return u[k] + (u[k + 1] - u[k]) * std::sqrt(s / dt);
}

SlitMapChain SlitMapChain::from_driving(const DrivingPath& path) {
  return from_driving(path, path.interp == DrivingPath::Interp::sqrt_wave
                                ? StepKind::tilted
                                : StepKind::vertical);
}

SlitMapChain SlitMapChain::from_driving(const DrivingPath& path, StepKind kind) {
  SlitMapChain c;
  c.a = path.a;
  c.kind = kind;
  c.dt = path.dt;
  c.u = path.u;
  return c;
}

Complex SlitMapChain::forward(Complex z, std::size_t k) const {
  if (k > steps()) k = steps();
  const double hcap2 = 2.0 * a * dt;
  const bool interior = z.imag() > 0.0;
  Complex w = z;
  for (std::size_t j = 1; j <= k; ++j) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw InstabilityError(j);
    if (kind == StepKind::vertical) {
      w = u[j - 1] + sqrt_shifted(w - u[j - 1], hcap2);
    } else {
      TiltedStep st = tilted_step_params(a, dt, u[j] - u[j - 1]);
      try {
        w = u[j - 1] + tilted_map_inverse(st, w - u[j - 1]);
      } catch (const std::runtime_error&) {
        throw SwallowedError(j);
      }
    }
    // an interior point absorbed by the growing hull loses its upper-half
    // image; detect by the imaginary part collapsing
    if (interior && w.imag() <= 1e-14) throw SwallowedError(j);
  }
  return w;
}

Complex SlitMapChain::inverse(Complex w, std::size_t k) const {
  if (k > steps()) k = steps();
  const double hcap2 = 2.0 * a * dt;
  Complex v = w;
  for (std::size_t j = k; j >= 1; --j) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) ||
        std::abs(v) > 1e12)
      throw InstabilityError(j);
    if (kind == StepKind::vertical) {
      v = u[j - 1] + sqrt_shifted(v - u[j - 1], -hcap2);
    } else {
      TiltedStep st = tilted_step_params(a, dt, u[j] - u[j - 1]);
      v = u[j - 1] + tilted_map(st, v - u[j - 1]);
    }
  }
  return v;
}

namespace {

struct FlowState {
  Complex g;
  Complex log_gp = 0.0;
  bool alive = true;
  double swallow_time = -1.0;
};

// one RK4 substep of dg = a/(g-u(t)) dt, dlog g' = -a/(g-u(t))^2 dt, with the
// driving evaluated by the cell-local rule (s = offset within cell k)
inline void rk4_substep(const DrivingPath& path, std::size_t cell, double s0,
                        double h, FlowState& st) {
  auto rhs = [&](double s, Complex g, Complex& dg, Complex& dlgp) {
    Complex Z = g - path.value_in_cell(cell, s);
    Complex inv = path.a / Z;
    dg = inv;
    dlgp = -inv / Z;
  };
  Complex k1g, k1p, k2g, k2p, k3g, k3p, k4g, k4p;
  rhs(s0, st.g, k1g, k1p);
  rhs(s0 + 0.5 * h, st.g + 0.5 * h * k1g, k2g, k2p);
  rhs(s0 + 0.5 * h, st.g + 0.5 * h * k2g, k3g, k3p);
  rhs(s0 + h, st.g + h * k3g, k4g, k4p);
  st.g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
  st.log_gp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

// one RK4 substep in the rescaled cell time tau = sqrt(s/dt), where the sqrt
// interpolation becomes linear and the right-hand side is smooth:
// dg/dtau = 2 dt tau a / (g - u_k - du tau)
inline void rk4_substep_tau(const DrivingPath& path, std::size_t k, double tau0,
                            double h, FlowState& st) {
  double uk = path.u[k];
  double du = path.u[k + 1] - path.u[k];
  double c = 2.0 * path.dt * path.a;
  auto rhs = [&](double tau, Complex g, Complex& dg, Complex& dlgp) {
    Complex Z = g - (uk + du * tau);
    Complex inv = c * tau / Z;
    dg = inv;
    dlgp = -inv / Z;
  };
  Complex k1g, k1p, k2g, k2p, k3g, k3p, k4g, k4p;
  rhs(tau0, st.g, k1g, k1p);
  rhs(tau0 + 0.5 * h, st.g + 0.5 * h * k1g, k2g, k2p);
  rhs(tau0 + 0.5 * h, st.g + 0.5 * h * k2g, k3g, k3p);
  rhs(tau0 + h, st.g + h * k3g, k4g, k4p);
  st.g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
  st.log_gp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

// advance across driving cell k (local time s in [0, dt)); returns false if
// the point got swallowed inside the cell
bool advance_cell(const DrivingPath& path, std::size_t k, double cutoff,
                  FlowState& st) {
  const bool rescale = path.interp == DrivingPath::Interp::sqrt_wave &&
                       k < path.steps() && path.u[k + 1] != path.u[k];
  int guard = 0;
  if (rescale) {
    double tau = 0.0;
    while (tau < 1.0) {
      Complex Z = st.g - path.value_in_cell(k, path.dt * tau * tau);
      double z2 = std::norm(Z);
      if (std::sqrt(z2) < cutoff) {
        st.alive = false;
        st.swallow_time = static_cast<double>(k) * path.dt + path.dt * tau * tau;
        return false;
      }
      // |dg/dtau| <= 2 dt a tau / |Z|; keep each move below a fraction of |Z|
      double h = 0.025 * z2 / (path.dt * path.a * std::max(tau, 0.05));
      h = std::clamp(h, 1e-9, 0.25);
      h = std::min(h, 1.0 - tau);
      rk4_substep_tau(path, k, tau, h, st);
      tau += h;
      if (++guard > 100000000) break;
    }
    return st.alive;
  }
  double s = 0.0;
  while (s < path.dt) {
    Complex Z = st.g - path.value_in_cell(k, s);
    double z2 = std::norm(Z);
    if (std::sqrt(z2) < cutoff) {
      st.alive = false;
      st.swallow_time = static_cast<double>(k) * path.dt + s;
      return false;
    }
    // substep resolving the local drift scale |Z|^2 / a
    double h = std::min(path.dt - s, 0.05 * z2 / path.a);
    h = std::max(h, path.dt * 1e-8);
    h = std::min(h, path.dt - s);
    rk4_substep(path, k, s, h, st);
    s += h;
    if (++guard > 100000000) {
      st.alive = false;
      st.swallow_time = static_cast<double>(k) * path.dt + s;
      return false;
    }
  }
  return true;
}

PointState make_sample(const DrivingPath& path, double t, const FlowState& st) {
  PointState p;
  p.t = t;
  Complex Z = st.g - path.value(t);
  p.x = Z.real();
  p.y = Z.imag();
  p.gprime = std::exp(st.log_gp);
  double ag = std::abs(p.gprime);
  p.upsilon = ag > 0.0 ? p.y / ag : 0.0;
  p.alive = st.alive;
  return p;
}

}  // namespace

Trajectory evolve_point(const DrivingPath& path, Complex z, double horizon,
                        double swallow_cutoff) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::domain_error("evolve_point: non-finite start point");
  if (z.imag() < 0.0)
    throw std::domain_error("evolve_point: start point below the real line");
  if (swallow_cutoff <= 0.0)
    swallow_cutoff = std::max(1e-7, 10.0 * std::sqrt(path.a * path.dt));
  Trajectory traj;
  traj.z0 = z;
  double T = path.total_time();
  if (horizon >= 0.0) T = std::min(T, horizon);
  std::size_t last_cell = static_cast<std::size_t>(std::llround(T / path.dt));
  last_cell = std::min(last_cell, path.steps());

  FlowState st;
  st.g = z;
  if (z.imag() == 0.0 && std::fabs(z.real() - path.u.front()) < 1e-12) {
    traj.swallowed = true;
    traj.swallow_time = 0.0;
    PointState p;
    p.alive = false;
    traj.samples.push_back(p);
    return traj;
  }
  traj.samples.push_back(make_sample(path, 0.0, st));
  for (std::size_t k = 0; k < last_cell; ++k) {
    if (!advance_cell(path, k, swallow_cutoff, st)) {
      traj.swallowed = true;
      traj.swallow_time = st.swallow_time;
      PointState p = make_sample(path, st.swallow_time, st);
      p.alive = false;
      traj.samples.push_back(p);
      return traj;
    }
    traj.samples.push_back(make_sample(path, static_cast<double>(k + 1) * path.dt, st));
  }
  return traj;
}

Trace reverse_trace(const DrivingPath& path, double tip_eps) {
  double T = path.total_time();
  if (tip_eps <= 0.0) tip_eps = 1e-3 * std::sqrt(std::max(path.a * T, 1e-300));
  SlitMapChain chain = SlitMapChain::from_driving(path);
  Trace tr;
  tr.a = path.a;
  tr.dt = path.dt;
  tr.tip_eps = tip_eps;
  std::size_t M = path.steps();
  tr.t.reserve(M + 1);
  tr.gamma.reserve(M + 1);
  tr.t.push_back(0.0);
  tr.gamma.push_back(Complex(path.u.front(), 0.0));
  for (std::size_t k = 1; k <= M; ++k) {
    Complex w = Complex(path.u[k], tip_eps);
    tr.t.push_back(static_cast<double>(k) * path.dt);
    tr.gamma.push_back(chain.inverse(w, k));
  }
  // chordal-distance sum along a dyadic ladder of offsets approximates
  // the integral of |f_T'| over (0, tip_eps]
  if (M > 0) {
    Complex prev = tr.gamma.back();
    double acc = 0.0;
    double y = tip_eps;
    for (int j = 0; j < 12; ++j) {
      y *= 0.5;
      Complex cur = chain.inverse(Complex(path.u[M], y), M);
      acc += std::abs(cur - prev);
      prev = cur;
    }
    tr.tip_curve_bound = acc;
  }
  return tr;
}

Interval koebe_distance(const PointState& p) {
  if (!p.alive) return {0.0, 0.0};
  return {p.upsilon / 4.0, 4.0 * p.upsilon};
}

std::vector<RadialSample> radial_disk_flow(const DrivingPath& angles, Complex z,
                                           double horizon, double rate) {
  if (std::abs(z) >= 1.0)
    throw std::domain_error("radial_disk_flow: start point must be inside the disk");
  if (!(rate > 0.0)) throw std::domain_error("radial_disk_flow: rate must be > 0");
  double T = angles.total_time();
  if (horizon >= 0.0) T = std::min(T, horizon);
  std::size_t last_cell = static_cast<std::size_t>(std::llround(T / angles.dt));
  last_cell = std::min(last_cell, angles.steps());

  std::vector<RadialSample> out;
  Complex g = z;
  Complex gp = 1.0;
  bool alive = true;
  auto emit = [&](double t) {
    RadialSample s;
    s.t = t;
    s.gz = g;
    s.gprime_z = gp;
    s.log_gp0 = rate * t;
    s.alive = alive;
    out.push_back(s);
  };
  emit(0.0);
  const double cutoff = 1e-6;
  auto rhs = [&](double t, Complex gv, Complex gpv, Complex& dg, Complex& dgp) {
    Complex e = std::exp(Complex(0.0, 2.0 * angles.value(t)));
    Complex den = e - gv;
    dg = rate * gv * (e + gv) / den;
    dgp = rate * gpv * (e * e + 2.0 * e * gv - gv * gv) / (den * den);
  };
  for (std::size_t k = 0; k < last_cell && alive; ++k) {
    double t = static_cast<double>(k) * angles.dt;
    double remaining = angles.dt;
    while (remaining > 0.0) {
      Complex e = std::exp(Complex(0.0, 2.0 * angles.value(t)));
      double gap = std::abs(e - g);
      if (1.0 - std::abs(g) < cutoff || gap < cutoff) {
        alive = false;
        break;
      }
      double h = std::min(remaining, 0.05 * gap / rate);
      h = std::max(h, angles.dt * 1e-7);
      h = std::min(h, remaining);
      Complex k1g, k1p, k2g, k2p, k3g, k3p, k4g, k4p;
      rhs(t, g, gp, k1g, k1p);
      rhs(t + 0.5 * h, g + 0.5 * h * k1g, gp + 0.5 * h * k1p, k2g, k2p);
      rhs(t + 0.5 * h, g + 0.5 * h * k2g, gp + 0.5 * h * k2p, k3g, k3p);
      rhs(t + h, g + h * k3g, gp + h * k3p, k4g, k4p);
      g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
      gp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      t += h;
      remaining -= h;
    }
    emit(static_cast<double>(k + 1) * angles.dt);
  }
  return out;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "t,re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < trace.gamma.size(); ++i)
    os << trace.t[i] << "," << trace.gamma[i].real() << ","
       << trace.gamma[i].imag() << "\n";
}

void write_chain_csv(std::ostream& os, const SlitMapChain& chain) {
  os << "dt,du\n";
  os.precision(17);
  for (std::size_t k = 1; k <= chain.steps(); ++k)
    os << chain.dt << "," << chain.u[k] - chain.u[k - 1] << "\n";
}

}  // namespace slelab
