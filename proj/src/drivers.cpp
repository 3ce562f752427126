#include "slelab/drivers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "slelab/parallel.hpp"
#include "slelab/params.hpp"

namespace slelab {

namespace {

constexpr double kAbsorbCutoff = 1e-6;

void require_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::domain_error("kappa must be finite and positive");
}

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("SLELAB_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

McResult summarize(const std::vector<double>& per_replica) {
  McResult r;
  MeanVar mv;
  for (double v : per_replica) mv.add(v);
  r.estimate = mv.mean();
  r.std_error = mv.std_error();
  r.replicas = mv.n;
  return r;
}

// ---------------------------------------------------------------------------
// driving-path samplers
// ---------------------------------------------------------------------------

DrivingPath sample_chordal_driver(double kappa, double dt, std::size_t steps,
                                  RngStream& rng) {
  require_kappa(kappa);
  if (!(dt > 0.0)) throw std::domain_error("dt must be positive");
  std::vector<double> u(steps + 1);
  u[0] = 0.0;
  double sd = std::sqrt(dt);
  for (std::size_t k = 1; k <= steps; ++k) u[k] = u[k - 1] - sd * rng.normal();
  return DrivingPath(2.0 / kappa, dt, std::move(u));
}

KappaRhoPath sample_kappa_rho_driver(double kappa, double rho, double x,
                                     double dt, std::size_t steps,
                                     RngStream& rng) {
  require_kappa(kappa);
  if (x == 0.0) throw std::domain_error("force point must be away from 0");
  double a = 2.0 / kappa;
  double q = rho / kappa;
  KappaRhoPath out;
  std::vector<double> u(steps + 1, 0.0), kpt(steps + 1, x);
  double sd = std::sqrt(dt);
  double U = 0.0, K = x;
  std::size_t k = 1;
  for (; k <= steps; ++k) {
    double gap = K - U;
    double dW = sd * rng.normal();
    double dU = q / (U - K) * dt - dW;
    double dK = a / (K - U) * dt;
    U += dU;
    K += dK;
    // collision during the step
    if ((gap > 0.0) != (K - U > 0.0) || std::fabs(K - U) < kAbsorbCutoff) {
      if (a + q < 0.5) {
        out.absorbed = true;
        out.absorb_time = static_cast<double>(k) * dt;
        u[k] = U;
        kpt[k] = K;
        ++k;
        break;
      }
      // non-absorbing regime: hold the gap at the cutoff
      K = U + (gap > 0.0 ? kAbsorbCutoff : -kAbsorbCutoff);
    }
    u[k] = U;
    kpt[k] = K;
  }
  u.resize(k);
  kpt.resize(k);
  if (u.size() < 2) {
    u = {0.0, 0.0};
    kpt = {x, x};
  }
  out.driving = DrivingPath(a, dt, std::move(u));
  out.force_point = std::move(kpt);
  return out;
}

namespace {

// shared kernel: dU = drift_coef * X/(X^2+Y^2) dt - dW with the tracked
// interior point (X, Y) advanced by deterministic substeps inside each cell
RadialDriverPath sample_weighted_driver(double kappa, Complex w, double dt,
                                        std::size_t steps, double drift_coef,
                                        RngStream& rng) {
  require_kappa(kappa);
  if (!(w.imag() > 0.0))
    throw std::domain_error("target point must be interior (Im > 0)");
  double a = 2.0 / kappa;
  RadialDriverPath out;
  std::vector<double> u(steps + 1, 0.0);
  // (X, log Y, log upsilon): Y decays multiplicatively and can underflow long
  // before the conformal radius does (the plane-filling regime keeps upsilon
  // bounded away from zero while Y -> 0), so both live in logs
  double X = w.real();
  double log_y = std::log(w.imag());
  double log_ups = log_y;
  // |Z| -> 0 marks the swallowing time: for kappa <= 4 the driving is pulled
  // onto the target, while for kappa >= 8 the image keeps Y well above any
  // small cutoff over desk-scale horizons.  The cutoff sits at the substep
  // resolution floor (the point where the substep cap would bind).
  const double z_cut =
      std::max(kAbsorbCutoff, std::sqrt(20.0 * a * dt / 4096.0));
  double sd = std::sqrt(dt);
  std::size_t k = 1;
  for (; k <= steps; ++k) {
    double y = std::exp(log_y);
    double z2 = X * X + y * y;
    if (std::sqrt(z2) < z_cut) {
      out.target_swallowed = true;
      out.t_w = static_cast<double>(k - 1) * dt;
      break;
    }
    double dW = sd * rng.normal();
    double dU = drift_coef * X / z2 * dt - dW;
    // substeps for the tracked point, the driving increment spread over them
    int nsub = static_cast<int>(std::ceil(20.0 * a * dt / z2));
    nsub = std::clamp(nsub, 1, 4096);
    double h = dt / nsub, du_sub = dU / nsub;
    bool gone = false;
    for (int s = 0; s < nsub; ++s) {
      y = std::exp(log_y);
      double r2 = X * X + y * y;
      if (std::sqrt(r2) < z_cut) {
        gone = true;
        break;
      }
      X += a * X / r2 * h - du_sub;
      log_y += -a / r2 * h;
      log_ups += -2.0 * a * y * y / (r2 * r2) * h;
    }
    if (gone) {
      out.target_swallowed = true;
      out.t_w = static_cast<double>(k - 1) * dt;
      break;
    }
    u[k] = u[k - 1] + dU;
  }
  u.resize(k);
  if (u.size() < 2) u = {0.0, 0.0};
  out.final_upsilon = std::exp(log_ups);
  out.driving = DrivingPath(a, dt, std::move(u));
  return out;
}

}  // namespace

RadialDriverPath sample_radial_driver(double kappa, Complex w, double dt,
                                      std::size_t steps, RngStream& rng) {
  double a = 2.0 / kappa;
  return sample_weighted_driver(kappa, w, dt, steps, 3.0 * a - 1.0, rng);
}

RadialDriverPath sample_two_sided_driver(double kappa, Complex z, double dt,
                                         std::size_t steps, RngStream& rng) {
  double a = 2.0 / kappa;
  return sample_weighted_driver(kappa, z, dt, steps, 4.0 * a - 1.0, rng);
}

// ---------------------------------------------------------------------------
// evolving Taylor jet of the hull map Phi_t at the driving point
// ---------------------------------------------------------------------------

DomainJet DomainJet::initial(const HullSpec& hull, double a_, double u0) {
  DomainJet jet;
  jet.a = a_;
  jet.c.assign(kOrder + 1, 0.0);
  if (hull.empty()) {
    jet.c[0] = u0;
    jet.c[1] = 1.0;
    return jet;
  }
  double d0 = hull.distance(Complex(u0, 0.0));
  if (!(d0 > 0.0))
    throw std::domain_error("DomainJet: hull touches the expansion point");
  if (hull.kind == HullSpec::Kind::half_disk) {
    // Phi(u0 + h) = u0 + h + r^2/(w0 + h), w0 = u0 - x0: geometric series
    // with q_n = r^2 (-1)^n / w0^{n+1}
    double w0 = u0 - hull.x0;
    double r2 = hull.size * hull.size;
    double qn = r2 / w0;
    jet.c[0] = u0 + qn;
    qn = -qn / w0;
    jet.c[1] = 1.0 + qn;
    for (int n = 2; n <= kOrder; ++n) {
      qn = -qn / w0;
      jet.c[n] = qn;
    }
    return jet;
  }
  // generic closed-form hull: Cauchy coefficients on a circle inside the
  // domain of analyticity (the map is real on R, so coefficients are real)
  double R = 0.75 * d0;
  const int m = 128;
  for (int n = 0; n <= kOrder; ++n) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      double th = 2.0 * std::numbers::pi * j / m;
      Complex zj = Complex(u0, 0.0) + R * std::polar(1.0, th);
      acc += (slit_map(hull, zj) * std::polar(1.0, -n * th)).real();
    }
    jet.c[n] = acc / (m * std::pow(R, n));
  }
  return jet;
}

void DomainJet::advance(double dt, double du) {
  // dc_n = [a Lambda_n(c) + (n+1)(n+2)/2 c_{n+2}] dt + (n+1) c_{n+1} du
  PowerSeries lam = lambda_flow(PowerSeries{c});
  std::vector<double> next(c.size());
  for (int n = 0; n <= kOrder; ++n) {
    double lam_n = n < static_cast<int>(lam.c.size()) ? lam.c[n] : 0.0;
    double c1 = n + 1 <= kOrder ? c[n + 1] : 0.0;
    double c2 = n + 2 <= kOrder ? c[n + 2] : 0.0;
    next[n] = c[n] + dt * (a * lam_n + 0.5 * (n + 1.0) * (n + 2.0) * c2) +
              du * (n + 1.0) * c1;
  }
  c = std::move(next);
}

double DomainJet::schwarzian() const {
  return 6.0 * c[3] / c[1] - 6.0 * (c[2] / c[1]) * (c[2] / c[1]);
}

SubdomainDriverPath subdomain_driver(double kappa, const HullSpec& hull,
                                     double dt, std::size_t steps,
                                     RngStream& rng) {
  require_kappa(kappa);
  double a = 2.0 / kappa;
  double b = (3.0 * a - 1.0) / 2.0;
  SubdomainDriverPath out;
  std::vector<double> u(steps + 1, 0.0);
  std::vector<double> pp(steps + 1, 1.0);
  const bool empty = hull.empty();
  DomainJet jet = DomainJet::initial(hull, a, 0.0);
  pp[0] = jet.phi_prime();
  double sd = std::sqrt(dt);
  std::size_t k = 1;
  for (; k <= steps; ++k) {
    if (!empty && (jet.phi_prime() < 0.3 || jet.phi_prime() > 1.0 + 1e-6)) {
      out.truncated = true;
      out.tau = static_cast<double>(k - 1) * dt;
      break;
    }
    double dW = sd * rng.normal();
    double dU;
    if (b == 0.0 || empty) {
      dU = -dW;  // zero drift: exactly the chordal driver
    } else {
      dU = b * jet.phi_ratio() * dt - dW;
    }
    if (!empty) jet.advance(dt, dU);
    u[k] = u[k - 1] + dU;
    pp[k] = empty ? 1.0 : jet.phi_prime();
  }
  u.resize(k);
  pp.resize(k);
  if (u.size() < 2) {
    u = {0.0, 0.0};
    pp = {pp.empty() ? 1.0 : pp[0], pp.empty() ? 1.0 : pp[0]};
  }
  out.driving = DrivingPath(a, dt, std::move(u));
  out.phi_prime = std::move(pp);
  return out;
}

// ---------------------------------------------------------------------------
// Bessel-type Monte Carlo
// ---------------------------------------------------------------------------

McResult bessel_hit_probability(double a, double x, double horizon,
                                std::uint64_t replicas, std::uint64_t seed,
                                int workers) {
  if (!(a > 0.0) || !(x > 0.0))
    throw std::domain_error("bessel_hit_probability: need a > 0, x > 0");
  // Simulated as L = log Z: dL = (a - 1/2) e^{-2L} dt + e^{-L} dB, which is
  // singularity-free near the origin.  For a < 1/2 the path is declared
  // absorbed at the 1e-6 cutoff (it cannot recover); for a >= 1/2 excursions
  // below any fixed level recover with positive probability, so absorption
  // there means reaching the origin at double-precision resolution.
  const double absorb_level = a < 0.5 ? std::log(kAbsorbCutoff) : -600.0;
  auto hits = run_replicas<double>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double L = std::log(x);
        double t = 0.0;
        while (t < horizon) {
          double e2 = std::exp(-2.0 * L);
          // noise moves L by ~0.1 per step; drift stays subordinate
          double h = std::clamp(0.01 / e2, 1e-300, 0.05);
          L += (a - 0.5) * e2 * h + std::exp(-L) * std::sqrt(h) * rng.normal();
          t += h;
          if (L < absorb_level) return 1.0;
        }
        return 0.0;
      });
  McResult r = summarize(hits);
  r.std_error = std::sqrt(std::max(r.estimate * (1.0 - r.estimate), 1e-300) /
                          static_cast<double>(replicas));
  return r;
}

namespace {

void fit_loglog(const std::vector<double>& t, const std::vector<double>& m,
                double& slope) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (m[i] > 0.0 && t[i] > 0.0) {
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(m[i]));
    }
  }
  slope = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
}

struct MomentRow {
  std::vector<double> j, mart;
  bool absorbed = false;
};

MomentCurve collect_moments(const std::vector<MomentRow>& rows,
                            const std::vector<double>& t_grid) {
  std::size_t nt = t_grid.size();
  MomentCurve out;
  out.t = t_grid;
  out.mean.assign(nt, 0.0);
  out.std_error.assign(nt, 0.0);
  out.mom.assign(nt, 0.0);
  out.martingale.assign(nt, 0.0);
  out.martingale_se.assign(nt, 0.0);
  std::vector<double> ji(rows.size());
  for (std::size_t i = 0; i < nt; ++i) {
    MeanVar mv, mm;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      mv.add(rows[r].j[i]);
      mm.add(rows[r].mart[i]);
      ji[r] = rows[r].j[i];
    }
    out.mean[i] = mv.mean();
    out.std_error[i] = mv.std_error();
    out.mom[i] = median_of_means(ji);
    out.martingale[i] = mm.mean();
    out.martingale_se[i] = mm.std_error();
  }
  for (const auto& r : rows) out.absorbed += r.absorbed ? 1 : 0;
  return out;
}

}  // namespace

MomentCurve boundary_moment(double lambda, double a, double x,
                            const std::vector<double>& t_grid,
                            std::uint64_t replicas, std::uint64_t seed,
                            int workers) {
  if (!(a > 0.0) || !(x > 0.0))
    throw std::domain_error("boundary_moment: need a > 0, x > 0");
  if (lambda < lambda0(a) - 1e-12)
    throw std::domain_error("boundary_moment: lambda below lambda0");
  double q = q_exponent(lambda, a);
  std::size_t nt = t_grid.size();
  auto rows = run_replicas<MomentRow>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> MomentRow {
        MomentRow row;
        row.j.assign(nt, 0.0);
        row.mart.assign(nt, 0.0);
        double X = x, t = 0.0, I = 0.0;
        std::size_t gi = 0;
        bool dead = false;
        while (gi < nt) {
          if (!dead) {
            double h = std::clamp(0.01 * X * X / std::max(a, 1.0), 1e-10, 0.5);
            h = std::min(h, t_grid[gi] - t);
            if (h <= 0.0) h = 1e-12;
            double X_old = X;
            X += a / X * h + std::sqrt(h) * rng.normal();
            if (X < kAbsorbCutoff) {
              dead = true;
              row.absorbed = true;
            } else {
              I += 0.5 * h * (1.0 / (X_old * X_old) + 1.0 / (X * X));
            }
            t += h;
          } else {
            t = t_grid[gi];
          }
          while (gi < nt && t >= t_grid[gi] - 1e-12) {
            if (!dead) {
              double J = std::exp(-a * lambda * I);
              row.j[gi] = J;
              row.mart[gi] = std::pow(X / x, q) * J;
            }
            ++gi;
          }
        }
        return row;
      });
  MomentCurve out = collect_moments(rows, t_grid);
  fit_loglog(out.t, out.mean, out.slope);
  return out;
}

MomentCurve boundary_moment_importance(double lambda, double a, double x,
                                       const std::vector<double>& t_grid,
                                       std::uint64_t replicas,
                                       std::uint64_t seed, int workers) {
  if (!(a > 0.0) || !(x > 0.0))
    throw std::domain_error("boundary_moment_importance: need a > 0, x > 0");
  double q = q_exponent(lambda, a);
  std::size_t nt = t_grid.size();
  auto rows = run_replicas<MomentRow>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> MomentRow {
        MomentRow row;
        row.j.assign(nt, 0.0);
        row.mart.assign(nt, 1.0);
        double X = x, t = 0.0;
        std::size_t gi = 0;
        while (gi < nt) {
          double h =
              std::clamp(0.01 * X * X / std::max(a + q, 1.0), 1e-10, 0.5);
          h = std::min(h, t_grid[gi] - t);
          if (h <= 0.0) h = 1e-12;
          X += (a + q) / X * h + std::sqrt(h) * rng.normal();
          if (X < kAbsorbCutoff) X = kAbsorbCutoff;  // a+q >= 1/2: unreachable
          t += h;
          while (gi < nt && t >= t_grid[gi] - 1e-12) {
            row.j[gi] = std::pow(x, q) * std::pow(X, -q);
            ++gi;
          }
        }
        return row;
      });
  MomentCurve out = collect_moments(rows, t_grid);
  fit_loglog(out.t, out.mean, out.slope);
  return out;
}

MomentCurve radial_moment(double lambda, double a, double theta,
                          const std::vector<double>& t_grid,
                          std::uint64_t replicas, std::uint64_t seed,
                          int workers) {
  if (!(a >= 0.25)) throw std::domain_error("radial_moment: need a >= 1/4");
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw std::domain_error("radial_moment: theta must be in (0, pi)");
  if (lambda <= lambda0(a))
    throw std::domain_error("radial_moment: lambda must exceed lambda0");
  double q = q_exponent(lambda, a);
  double kmart = a * lambda + 0.5 * q;
  std::size_t nt = t_grid.size();
  auto rows = run_replicas<MomentRow>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> MomentRow {
        MomentRow row;
        row.j.assign(nt, 0.0);
        row.mart.assign(nt, 0.0);
        // x = log tan(Psi/2) tames the boundary singularity of the cot drift
        double xv = std::log(std::tan(0.5 * theta));
        double t = 0.0, I = 0.0;
        std::size_t gi = 0;
        bool dead = false;
        while (gi < nt) {
          if (!dead) {
            double ch = std::cosh(xv);
            double h = std::clamp(0.005 / (ch * ch), 1e-12, 0.01);
            h = std::min(h, t_grid[gi] - t);
            if (h <= 0.0) h = 1e-13;
            I += ch * ch * h;
            xv += -(a - 0.5) * std::sinh(xv) * ch * h +
                  ch * std::sqrt(h) * rng.normal();
            t += h;
            if (std::fabs(xv) > 20.0) {
              dead = true;  // boundary reached (possible when a < 1/2)
              row.absorbed = true;
            }
          } else {
            t = t_grid[gi];
          }
          while (gi < nt && t >= t_grid[gi] - 1e-12) {
            if (!dead) {
              double J = std::exp(-a * lambda * I);
              double sinpsi = 1.0 / std::cosh(xv);
              row.j[gi] = J;
              row.mart[gi] =
                  std::exp(kmart * t_grid[gi]) * std::pow(sinpsi, q) * J;
            }
            ++gi;
          }
        }
        return row;
      });
  MomentCurve out = collect_moments(rows, t_grid);
  // decay against exp(-2 a beta t): slope of log E vs t
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < nt; ++i) {
    if (out.mean[i] > 0.0) {
      lx.push_back(out.t[i]);
      ly.push_back(std::log(out.mean[i]));
    }
  }
  out.slope = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
  return out;
}

MomentCurve two_sided_moment(double l1, double l2, double a, double x, double y,
                             const std::vector<double>& t_grid,
                             std::uint64_t replicas, std::uint64_t seed,
                             int workers) {
  if (!(y < 0.0 && 0.0 < x))
    throw std::domain_error("two_sided_moment: need y < 0 < x");
  double q1 = q_exponent(l1, a), q2 = q_exponent(l2, a);
  double rr = q1 * q2 / a;
  double m0 = std::pow(x, q1) * std::pow(-y, q2) * std::pow(x - y, rr);
  std::size_t nt = t_grid.size();
  auto rows = run_replicas<MomentRow>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> MomentRow {
        MomentRow row;
        row.j.assign(nt, 0.0);
        row.mart.assign(nt, 0.0);
        double X = x, Xt = -y;
        double t = 0.0, I1 = 0.0, I2 = 0.0;
        std::size_t gi = 0;
        bool dead = false;
        while (gi < nt) {
          if (!dead) {
            double m2 = std::min(X * X, Xt * Xt);
            double h = std::clamp(0.01 * m2 / std::max(a, 1.0), 1e-10, 0.5);
            h = std::min(h, t_grid[gi] - t);
            if (h <= 0.0) h = 1e-12;
            double dB = std::sqrt(h) * rng.normal();
            double X_old = X, Xt_old = Xt;
            X += a / X * h + dB;
            Xt += a / Xt * h - dB;
            if (X < kAbsorbCutoff || Xt < kAbsorbCutoff) {
              dead = true;
              row.absorbed = true;
            } else {
              I1 += 0.5 * h * (1.0 / (X_old * X_old) + 1.0 / (X * X));
              I2 += 0.5 * h * (1.0 / (Xt_old * Xt_old) + 1.0 / (Xt * Xt));
            }
            t += h;
          } else {
            t = t_grid[gi];
          }
          while (gi < nt && t >= t_grid[gi] - 1e-12) {
            if (!dead) {
              double J = std::exp(-a * (l1 * I1 + l2 * I2));
              row.j[gi] = J;
              row.mart[gi] = std::pow(X, q1) * std::pow(Xt, q2) *
                             std::pow(X + Xt, rr) * J / m0;
            }
            ++gi;
          }
        }
        return row;
      });
  MomentCurve out = collect_moments(rows, t_grid);
  fit_loglog(out.t, out.mean, out.slope);
  return out;
}

McResult cardy_hitting_mc(double kappa, double y, std::uint64_t replicas,
                          double dt, std::uint64_t seed, int workers) {
  if (!(kappa > 4.0))
    throw std::domain_error("cardy_hitting_mc: needs kappa > 4");
  if (!(y > 0.0)) throw std::domain_error("cardy_hitting_mc: y must be > 0");
  double a = 2.0 / kappa;
  std::atomic<std::uint64_t> rescued{0};
  auto wins = run_replicas<double>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double X = 1.0, Xt = y;
        double horizon = 1e4 * (1.0 + y) * (1.0 + y);
        for (int attempt = 0; attempt < 8; ++attempt) {
          double t = 0.0;
          while (t < horizon) {
            double m2 = std::min(X * X, Xt * Xt);
            // resolution dt at the 0.1 scale, growing ~ X^2 farther out
            // (coarse Brownian increments far from the singularity are exact
            // in law); race durations are heavy tailed, so the growth keeps
            // the expected step count logarithmic
            double h = std::clamp(100.0 * dt * m2, 1e-12, 1e3);
            double dB = std::sqrt(h) * rng.normal();
            X += a / X * h + dB;
            Xt += a / Xt * h - dB;
            t += h;
            if (X < kAbsorbCutoff) return 1.0;   // x = 1 swallowed first
            if (Xt < kAbsorbCutoff) return 0.0;  // -y swallowed first
          }
          horizon *= 4.0;  // rare for kappa > 4: extend and continue
          rescued.fetch_add(1, std::memory_order_relaxed);
        }
        return 0.5;
      });
  McResult r = summarize(wins);
  r.std_error = std::sqrt(std::max(r.estimate * (1.0 - r.estimate), 1e-300) /
                          static_cast<double>(replicas));
  r.extras["rescued"] = static_cast<double>(rescued.load());
  return r;
}

TailResult green_tail_mc(double kappa, Complex z, std::vector<double> deltas,
                         std::uint64_t replicas, std::uint64_t seed,
                         int workers, double horizon) {
  if (!(kappa < 8.0))
    throw std::domain_error("green_tail_mc: needs kappa < 8");
  if (!(z.imag() > 0.0))
    throw std::domain_error("green_tail_mc: Im z must be positive");
  double a = 2.0 / kappa;
  std::sort(deltas.begin(), deltas.end(), std::greater<double>());
  std::size_t nd = deltas.size();
  std::vector<double> log_deltas(nd);
  for (std::size_t i = 0; i < nd; ++i) log_deltas[i] = std::log(deltas[i]);
  struct Row {
    std::uint32_t crossed = 0;
    bool censored = false;
  };
  auto rows = run_replicas<Row>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> Row {
        Row row;
        double X = z.real(), Y = z.imag();
        double log_ups = std::log(Y);
        double t = 0.0;
        std::uint32_t ci = 0;
        while (true) {
          while (ci < nd && log_ups <= log_deltas[ci]) ++ci;
          if (ci >= nd) break;
          double z2 = X * X + Y * Y;
          // the point is safely behind the curve once its angular size and
          // remaining contraction rate are negligible
          if (2.0 * Y * Y / z2 < 1e-4 && z2 > 25.0 * (1.0 + std::norm(z))) break;
          if (t >= horizon) {
            row.censored = true;
            break;
          }
          double h = std::clamp(0.01 * z2 / a, 1e-12, 0.25);
          h = std::min(h, horizon - t);
          double dB = std::sqrt(h) * rng.normal();
          double drift = a / z2;
          log_ups -= 2.0 * a * Y * Y / (z2 * z2) * h;
          X += drift * X * h + dB;
          Y -= drift * Y * h;
          if (Y < 1e-12) break;
          t += h;
        }
        row.crossed = ci;
        return row;
      });
  TailResult out;
  out.delta = deltas;
  out.prob.assign(nd, 0.0);
  out.std_error.assign(nd, 0.0);
  std::vector<std::uint64_t> counts(nd, 0);
  for (const auto& r : rows) {
    for (std::uint32_t i = 0; i < r.crossed && i < nd; ++i) ++counts[i];
    out.censored += r.censored ? 1 : 0;
  }
  for (std::size_t i = 0; i < nd; ++i) {
    double p = static_cast<double>(counts[i]) / static_cast<double>(replicas);
    out.prob[i] = p;
    out.std_error[i] = std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                                 static_cast<double>(replicas));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < nd; ++i) {
    if (out.prob[i] > 0.0) {
      lx.push_back(std::log(out.delta[i]));
      ly.push_back(std::log(out.prob[i]));
    }
  }
  out.fitted_exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// restriction Monte Carlo with sentinel refinement
// ---------------------------------------------------------------------------

namespace {

struct Sentinel {
  double X, Y, log_ups;
  double angle;  // position on the hull arc
  int level;
  bool split = false;
};

// one Heun step of dZ = a/Z dt - dU for a tracked point, with the conformal
// radius integrated alongside
inline void heun_point(double a, double h, double du, double& X, double& Y,
                       double& log_ups) {
  double z2 = X * X + Y * Y;
  double k1x = a * X / z2, k1y = -a * Y / z2;
  double x1 = X + h * k1x - du, y1 = Y + h * k1y;
  double w2 = x1 * x1 + y1 * y1;
  double k2x = a * x1 / w2, k2y = -a * y1 / w2;
  double nx = X + 0.5 * h * (k1x + k2x) - du;
  double ny = Y + 0.5 * h * (k1y + k2y);
  log_ups -= a * h * (Y * Y / (z2 * z2) + ny * ny / (w2 * w2));
  X = nx;
  Y = ny;
}

// advance a tracked point across a (possibly coarse) driving increment with
// local substeps tied to its own distance scale; the increment is split
// linearly below the driving resolution
inline void advance_point(double a, double h, double du, double& X, double& Y,
                          double& log_ups) {
  double z2 = X * X + Y * Y;
  int n = static_cast<int>(std::ceil(h * a / (0.01 * z2)));
  n = std::clamp(n, 1, 512);
  double hs = h / n, dus = du / n;
  for (int i = 0; i < n; ++i) heun_point(a, hs, dus, X, Y, log_ups);
}

}  // namespace

McResult restriction_avoid_mc(double kappa, const HullSpec& hull,
                              std::uint64_t replicas, double dt,
                              std::uint64_t seed, int workers) {
  if (hull.kind != HullSpec::Kind::half_disk || hull.empty())
    throw std::domain_error("restriction_avoid_mc: needs a half-disk hull");
  if (!(hull.x0 - hull.size > 0.0 || hull.x0 + hull.size < 0.0))
    throw std::domain_error("restriction_avoid_mc: hull must avoid the origin");
  double a = 2.0 / kappa;
  const double r = hull.size, x0 = hull.x0;
  const int n0 = 24;
  const int max_level = 8;
  const double spacing0 = std::numbers::pi * r / n0;
  const double spacing_min = spacing0 / (1 << max_level);
  const double eta = 0.01;
  const double t_max = 4000.0;

  struct Outcome {
    double avoided;
    bool censored;
  };
  auto rows = run_replicas<Outcome>(
      replicas, seed, workers, [&](std::uint64_t, RngStream& rng) -> Outcome {
        std::vector<Sentinel> sent;
        sent.reserve(64);
        auto spawn_at = [&](double angle, int level) {
          Complex zz = Complex(x0, 0.0) + r * std::polar(1.0, angle);
          sent.push_back(
              {zz.real(), zz.imag(), std::log(zz.imag()), angle, level, false});
        };
        for (int j = 0; j < n0; ++j)
          spawn_at((j + 0.5) * std::numbers::pi / n0, 0);
        // hull feet on the real line follow Bessel dynamics and, for the
        // simple-curve regime a >= 1/2, are never absorbed
        double Xl = x0 > 0.0 ? x0 - r : x0 + r;
        double Xr = x0 > 0.0 ? x0 + r : x0 - r;
        std::vector<std::pair<double, double>> history;
        history.reserve(1 << 12);
        double t = 0.0;
        int check = 0;
        double sent_min2 = r * r;  // refreshed each pass
        while (true) {
          if (t > t_max) return {1.0, true};
          // global clock from the feet scale; Brownian increments may be
          // coarse once everything is far (exact in law), but stay at the
          // requested dt while the curve is engaged with the hull
          double h = std::clamp(eta * Xl * Xl / a, 1e-9, 1.0);
          if (sent_min2 < 16.0 * r * r) h = std::min(h, dt);
          double du = -std::sqrt(h) * rng.normal();
          history.emplace_back(h, du);
          sent_min2 = 1e300;
          for (auto& s : sent) {
            advance_point(a, h, du, s.X, s.Y, s.log_ups);
            sent_min2 = std::min(sent_min2, s.X * s.X + s.Y * s.Y);
          }
          {
            double dummy = 0.0, y0 = 0.0;
            (void)dummy;
            // feet are real Bessel points: reuse the substepped update with Y=0
            int nf = std::clamp(static_cast<int>(std::ceil(h * a / (0.01 * Xl * Xl))), 1, 512);
            double hs = h / nf, dus = du / nf;
            for (int i = 0; i < nf; ++i) Xl += a / Xl * hs - dus;
            nf = std::clamp(static_cast<int>(std::ceil(h * a / (0.01 * Xr * Xr))), 1, 512);
            hs = h / nf;
            dus = du / nf;
            for (int i = 0; i < nf; ++i) Xr += a / Xr * hs - dus;
            (void)y0;
          }
          t += h;
          std::size_t nsent = sent.size();
          for (std::size_t j = 0; j < nsent; ++j) {
            double ups = std::exp(sent[j].log_ups);
            double sp = spacing0 / (1 << sent[j].level);
            if (ups > 2.5 * sp) continue;
            if (sent[j].level >= max_level) {
              if (ups <= 2.0 * spacing_min) return {0.0, false};  // hit
              continue;
            }
            if (sent[j].split) continue;
            sent[j].split = true;
            double off = 0.5 * sp / r;
            for (double ang : {sent[j].angle - off, sent[j].angle + off}) {
              if (ang <= 1e-9 || ang >= std::numbers::pi - 1e-9) continue;
              bool dup = false;
              for (const auto& s : sent)
                if (std::fabs(s.angle - ang) < 0.2 * sp / r) dup = true;
              if (dup) continue;
              Complex zz = Complex(x0, 0.0) + r * std::polar(1.0, ang);
              Sentinel ns{zz.real(), zz.imag(), std::log(zz.imag()), ang,
                          sent[j].level + 1, false};
              for (const auto& [hh, dd] : history)
                advance_point(a, hh, dd, ns.X, ns.Y, ns.log_ups);
              sent.push_back(ns);
            }
          }
          if (++check >= 64) {
            check = 0;
            // escape test: hull image small relative to its distance from U
            double lo = std::min(Xl, Xr), hi = std::max(Xl, Xr);
            double maxy = 0.0;
            for (const auto& s : sent) maxy = std::max(maxy, s.Y);
            double diam = (hi - lo) + maxy;
            double gap = std::fabs(lo);
            if (diam < 0.02 * gap) return {1.0, false};
          }
        }
      });
  McResult out;
  MeanVar mv;
  std::uint64_t censored = 0;
  for (const auto& o : rows) {
    mv.add(o.avoided);
    censored += o.censored ? 1 : 0;
  }
  out.estimate = mv.mean();
  out.replicas = replicas;
  out.std_error =
      std::sqrt(std::max(out.estimate * (1.0 - out.estimate), 1e-300) /
                static_cast<double>(replicas));
  out.extras["censored"] = static_cast<double>(censored);
  out.extras["hits"] =
      static_cast<double>(replicas) * (1.0 - out.estimate);
  return out;
}

// ---------------------------------------------------------------------------
// angular diffusions
// ---------------------------------------------------------------------------

std::vector<double> stationary_angle_samples(double a, std::size_t count,
                                             double burn_in, double spacing,
                                             std::uint64_t seed, int workers) {
  return run_replicas<double>(
      count, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double xv = 0.0;  // log tan(theta/2), started at theta = pi/2
        double t_end = burn_in + spacing;
        double t = 0.0;
        while (t < t_end) {
          double ch = std::cosh(xv);
          double h = std::clamp(0.005 / (ch * ch), 1e-12, 0.01);
          h = std::min(h, t_end - t);
          // dTheta = 2a cot(Theta) dt + dW in the log-tan variable
          xv += -(2.0 * a - 0.5) * std::sinh(xv) * ch * h +
                ch * std::sqrt(h) * rng.normal();
          t += h;
        }
        return 2.0 * std::atan(std::exp(xv));
      });
}

std::vector<double> two_sided_theta_via_chordal(double a, Complex z,
                                                double upsilon_star,
                                                std::size_t count,
                                                std::uint64_t seed,
                                                int workers) {
  if (!(upsilon_star > 0.0 && upsilon_star < z.imag()))
    throw std::domain_error("two_sided_theta_via_chordal: bad upsilon target");
  return run_replicas<double>(
      count, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double X = z.real(), Y = z.imag();
        double log_ups = std::log(Y);
        double target = std::log(upsilon_star);
        while (log_ups > target) {
          double z2 = X * X + Y * Y;
          double h = std::clamp(0.002 * z2 / a, 1e-14, 0.01);
          // keep the log-upsilon decrement small so the stopping time is sharp
          double dec = 2.0 * a * Y * Y / (z2 * z2) * h;
          if (dec > 0.01) {
            h *= 0.01 / dec;
            dec = 2.0 * a * Y * Y / (z2 * z2) * h;
          }
          double dB = std::sqrt(h) * rng.normal();
          // weighting by the Green martingale tilts the drift of X
          X += (1.0 - 3.0 * a) * X / z2 * h + dB;
          Y -= a * Y / z2 * h;
          log_ups -= dec;
        }
        return std::atan2(Y, X);
      });
}

std::vector<double> two_sided_theta_via_radial(double a, Complex z,
                                               double upsilon_star,
                                               std::size_t count,
                                               std::uint64_t seed,
                                               int workers) {
  if (!(upsilon_star > 0.0 && upsilon_star < z.imag()))
    throw std::domain_error("two_sided_theta_via_radial: bad upsilon target");
  double theta0 = std::arg(Complex(z.real(), z.imag()));
  double s_end = std::log(z.imag() / upsilon_star) / (2.0 * a);
  return run_replicas<double>(
      count, seed, workers, [&](std::uint64_t, RngStream& rng) -> double {
        double xv = std::log(std::tan(0.5 * theta0));
        double t = 0.0;
        while (t < s_end) {
          double ch = std::cosh(xv);
          double h = std::clamp(0.002 / (ch * ch), 1e-14, 0.01);
          h = std::min(h, s_end - t);
          xv += -(2.0 * a - 0.5) * std::sinh(xv) * ch * h +
                ch * std::sqrt(h) * rng.normal();
          t += h;
        }
        return 2.0 * std::atan(std::exp(xv));
      });
}

}  // namespace slelab
