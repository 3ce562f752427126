#include "slelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slelab {

double MeanVar::variance() const {
  if (n < 2) return 0.0;
  double m = mean();
  double v = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
  return v > 0.0 ? v : 0.0;
}

double MeanVar::std_error() const {
  return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need two equal-length samples");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

double mean_of(std::span<const double> v) {
  MeanVar m;
  for (double x : v) m.add(x);
  return m.mean();
}

double std_error_of(std::span<const double> v) {
  MeanVar m;
  for (double x : v) m.add(x);
  return m.std_error();
}

double median_of_means(std::span<const double> v, int blocks) {
  if (v.empty()) return 0.0;
  if (blocks < 1) blocks = 1;
  if (static_cast<std::size_t>(blocks) > v.size()) blocks = static_cast<int>(v.size());
  std::vector<double> block_means(blocks, 0.0);
  std::vector<std::size_t> counts(blocks, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t b = i % blocks;
    block_means[b] += v[i];
    ++counts[b];
  }
  for (int b = 0; b < blocks; ++b) block_means[b] /= static_cast<double>(counts[b]);
  std::sort(block_means.begin(), block_means.end());
  std::size_t m = block_means.size();
  return (m % 2) ? block_means[m / 2]
                 : 0.5 * (block_means[m / 2 - 1] + block_means[m / 2]);
}

namespace {

// series expansion for P(s,x), x < s+1
double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// continued fraction for Q(s,x), x >= s+1
double gamma_q_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double regularized_gamma_p(double s, double x) {
  if (s <= 0.0 || x < 0.0) throw std::domain_error("regularized_gamma_p: bad args");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_p_series(s, x);
  return 1.0 - gamma_q_cf(s, x);
}

double regularized_gamma_q(double s, double x) {
  if (s <= 0.0 || x < 0.0) throw std::domain_error("regularized_gamma_q: bad args");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double chi_square_gof_pvalue(std::span<const std::uint64_t> observed,
                             std::span<const double> expected_prob,
                             int extra_constraints) {
  if (observed.size() != expected_prob.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_gof_pvalue: bad bins");
  std::uint64_t total = 0;
  for (auto o : observed) total += o;
  double chi2 = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double e = expected_prob[i] * static_cast<double>(total);
    if (e < 1e-12) continue;
    double d = static_cast<double>(observed[i]) - e;
    chi2 += d * d / e;
    ++used;
  }
  int dof = used - 1 - extra_constraints;
  if (dof < 1) dof = 1;
  return regularized_gamma_q(0.5 * dof, 0.5 * chi2);
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample_pvalue: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  double lambda = (ne + 0.12 + 0.11 / ne) * d;
  // Kolmogorov tail sum
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += 2.0 * sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace slelab
