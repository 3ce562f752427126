#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace slelab {

struct MeanVar {
  std::uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double variance() const;
  double std_error() const;
};

// One Monte Carlo answer plus whatever side quantities the experiment fitted.
struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t replicas = 0;
  std::map<std::string, double> extras;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double mean_of(std::span<const double> v);
double std_error_of(std::span<const double> v);
double median_of_means(std::span<const double> v, int blocks = 16);

// regularized incomplete gamma P(s,x) and Q(s,x) = 1 - P(s,x)
double regularized_gamma_p(double s, double x);
double regularized_gamma_q(double s, double x);

// chi-square goodness of fit on binned counts; expected given as probabilities
// summing to ~1; returns the p-value with dof = bins - 1 - extra_constraints
double chi_square_gof_pvalue(std::span<const std::uint64_t> observed,
                             std::span<const double> expected_prob,
                             int extra_constraints = 0);

// two-sample Kolmogorov-Smirnov p-value (asymptotic)
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

}  // namespace slelab
