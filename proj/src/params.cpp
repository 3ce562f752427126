#include "slelab/params.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace slelab {

namespace {

void require_finite_positive(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0)
    throw std::domain_error("kappa must be finite and positive");
}

}  // namespace

SleParams derive_params(double kappa) {
  require_finite_positive(kappa);
  SleParams p;
  p.kappa = kappa;
  p.a = 2.0 / kappa;
  p.b = (3.0 * p.a - 1.0) / 2.0;
  p.btilde = p.b * (1.0 - p.a) / (2.0 * p.a);
  p.d_dim = kappa <= 8.0 ? 1.0 + kappa / 8.0 : 2.0;
  p.bhat = 2.0 - p.d_dim;
  p.c_central = 2.0 * p.b * (3.0 - 4.0 * p.a) / p.a;
  return p;
}

double lambda0(double a) {
  if (!(a > 0.0)) throw std::domain_error("lambda0: a must be positive");
  double t = 2.0 * a - 1.0;
  return -t * t / (8.0 * a);
}

double q_exponent(double lambda, double a, QBranch branch) {
  if (!(a > 0.0)) throw std::domain_error("q_exponent: a must be positive");
  double disc = (2.0 * a - 1.0) * (2.0 * a - 1.0) + 8.0 * a * lambda;
  if (disc < -1e-14 * (1.0 + std::fabs(lambda)))
    throw std::domain_error("q_exponent: lambda below lambda0");
  if (disc < 0.0) disc = 0.0;
  double root = std::sqrt(disc);
  return branch == QBranch::plus ? 0.5 * ((1.0 - 2.0 * a) + root)
                                 : 0.5 * ((1.0 - 2.0 * a) - root);
}

ExponentValue exponent_value(double lambda, double a) {
  return {lambda, q_exponent(lambda, a, QBranch::plus),
          q_exponent(lambda, a, QBranch::minus), lambda0(a)};
}

double q_inverse(double q, double a) {
  if (!(a > 0.0)) throw std::domain_error("q_inverse: a must be positive");
  return (q * q + (2.0 * a - 1.0) * q) / (2.0 * a);
}

double chordal_crossing_exponent(std::span<const double> lambdas, double a) {
  if (lambdas.empty())
    throw std::domain_error("chordal_crossing_exponent: empty argument list");
  double qsum = 0.0;
  for (double lam : lambdas) qsum += q_exponent(lam, a);
  return q_inverse(qsum, a);
}

double crossing_exponent_n(int n, double a) {
  if (n < 1) throw std::domain_error("crossing_exponent_n: n must be >= 1");
  double nn = static_cast<double>(n);
  return (a * nn * nn + (2.0 * a - 1.0) * nn) / 2.0;
}

double radial_beta(double lambda, double a) {
  return lambda / 2.0 + q_exponent(lambda, a) / (4.0 * a);
}

double radial_exponent(double b_arg, double lambda, double a) {
  if (!(a >= 0.25))
    throw std::domain_error("radial_exponent: requires a >= 1/4");
  // Cascade-compatible form: with s = q(b_arg) + q(lambda) - a this equals
  // btilde + s(s+2a)/(4a), which collapses to btilde + lambda/2 + q/(4a)
  // when b_arg is the boundary exponent b = (3a-1)/2 (there q(b) = a).
  double btilde = (3.0 * a - 1.0) / 2.0 * (1.0 - a) / (2.0 * a);
  double s = q_exponent(b_arg, a) + q_exponent(lambda, a) - a;
  return btilde + s * (s + 2.0 * a) / (4.0 * a);
}

double radial_exponent(double b_arg, std::span<const double> lambdas, double a) {
  return radial_exponent(b_arg, chordal_crossing_exponent(lambdas, a), a);
}

namespace {

template <class F>
double adaptive_simpson(const F& f, double lo, double hi, double flo, double fmid,
                        double fhi, double whole, int depth, double tol) {
  double m = 0.5 * (lo + hi);
  double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
  double flm = f(lm), frm = f(rm);
  double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  double right = (hi - m) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::fabs(left + right - whole) < tol * (1.0 + std::fabs(whole)))
    return left + right;
  return adaptive_simpson(f, lo, m, flo, flm, fmid, left, depth - 1, tol) +
         adaptive_simpson(f, m, hi, fmid, frm, fhi, right, depth - 1, tol);
}

template <class F>
double integrate(const F& f, double lo, double hi, double tol = 1e-13) {
  double m = 0.5 * (lo + hi);
  double flo = f(lo), fmid = f(m), fhi = f(hi);
  double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole, 40, tol);
}

// incomplete Beta after u = s^(1/p), which removes the endpoint singularity
// at 0: int_0^x u^(p-1)(1-u)^(p-1) du = (1/p) int_0^(x^p) (1 - s^(1/p))^(p-1) ds
double beta_integral_left(double p, double x) {
  double upper = std::pow(x, p);
  auto f = [p](double s) {
    if (s <= 0.0) return 1.0;  // limit of (1 - s^(1/p))^(p-1) as s -> 0
    double u = std::pow(s, 1.0 / p);
    return std::pow(1.0 - u, p - 1.0);
  };
  return integrate(f, 0.0, upper) / p;
}

}  // namespace

double cardy_phi(double y, double a) {
  if (!(a > 0.0 && a < 0.5))
    throw std::domain_error("cardy_phi: requires 0 < a < 1/2");
  if (!(y > 0.0)) {
    if (y == 0.0) return 0.0;
    throw std::domain_error("cardy_phi: requires y > 0");
  }
  if (std::isinf(y)) return 1.0;
  double p = 1.0 - 2.0 * a;
  double x = y / (y + 1.0);
  double total = std::exp(2.0 * std::lgamma(p) - std::lgamma(2.0 * p));
  double partial;
  if (x <= 0.5)
    partial = beta_integral_left(p, x);
  else
    partial = total - beta_integral_left(p, 1.0 - x);
  double v = partial / total;
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return v;
}

double green_function(std::complex<double> z, double a) {
  if (!(a > 0.25)) throw std::domain_error("green_function: requires a > 1/4");
  double y = z.imag();
  if (!(y > 0.0)) throw std::domain_error("green_function: Im z must be positive");
  double x = z.real() / y;
  double d = 1.0 + 1.0 / (4.0 * a);
  return std::pow(y, d - 2.0) * std::pow(x * x + 1.0, 0.5 - 2.0 * a);
}

double restriction_probability(double phi_prime_at_root) {
  if (!(phi_prime_at_root > 0.0 && phi_prime_at_root <= 1.0))
    throw std::domain_error("restriction_probability: argument must be in (0,1]");
  return std::pow(phi_prime_at_root, 5.0 / 8.0);
}

std::span<const ModelRow> model_table() {
  static const std::array<ModelRow, 6> rows = {{
      {"loop-erased walk", 2.0, 1.0, 1.0, 0.0, -2.0, 5.0 / 4.0},
      {"self-avoiding walk", 8.0 / 3.0, 3.0 / 4.0, 5.0 / 8.0, 5.0 / 48.0, 0.0,
       4.0 / 3.0},
      {"Ising interface", 3.0, 2.0 / 3.0, 1.0 / 2.0, 1.0 / 8.0, 1.0 / 2.0,
       11.0 / 8.0},
      {"harmonic explorer / free field interface", 4.0, 1.0 / 2.0, 1.0 / 4.0,
       1.0 / 8.0, 1.0, 3.0 / 2.0},
      {"percolation interface", 6.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 7.0 / 4.0},
      {"uniform spanning tree", 8.0, 1.0 / 4.0, -1.0 / 8.0, -3.0 / 16.0, -2.0,
       2.0},
  }};
  return rows;
}

}  // namespace slelab
