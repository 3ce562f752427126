#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace slelab {

// kappa together with the exponents derived from it.  All closed-form layers
// below take the capacity rate a = 2/kappa rather than kappa itself; the
// conversion happens once, here.
struct SleParams {
  double kappa;      // variance parameter
  double a;          // capacity growth rate, 2/kappa
  double b;          // boundary scaling exponent, (3a-1)/2
  double btilde;     // one-sided interior exponent, b(1-a)/(2a)
  double bhat;       // two-sided interior exponent, 2-d
  double c_central;  // central charge, 2b(3-4a)/a
  double d_dim;      // path dimension, 1+kappa/8 capped at 2
};

SleParams derive_params(double kappa);

enum class QBranch { plus, minus };

// lower edge of the domain of q(.)
double lambda0(double a);

// the two roots of q^2 + (2a-1)q - 2a*lambda = 0 at a given lambda
struct ExponentValue {
  double lambda;
  double q_plus;
  double q_minus;
  double lambda0;
};
ExponentValue exponent_value(double lambda, double a);

// roots of q^2 + (2a-1)q - 2a*lambda = 0
double q_exponent(double lambda, double a, QBranch branch = QBranch::plus);

// inverse of the plus branch: q_inverse(q(lambda)) = lambda on [lambda0, inf)
double q_inverse(double q, double a);

// chordal crossing exponent: q_inverse(sum of q(lambda_i))
double chordal_crossing_exponent(std::span<const double> lambdas, double a);

// closed form for n identical arguments b(a)
double crossing_exponent_n(int n, double a);

// decay rate of the radial derivative moment, lambda/2 + q(lambda)/(4a)
double radial_beta(double lambda, double a);

// radial exponent xi(b_arg, lambda); reduces to btilde + radial_beta(lambda)
// when b_arg equals the boundary exponent b(a), and satisfies the cascade
// xi(b, l1, l2) = xi(xi_tilde(b, l1), l2) for general first arguments.
double radial_exponent(double b_arg, double lambda, double a);
double radial_exponent(double b_arg, std::span<const double> lambdas, double a);

// crossing probability phi(y) for the swallowing race, 0 < a < 1/2
double cardy_phi(double y, double a);

// Green's function G(y(x+i)) = y^(d-2) (x^2+1)^(1/2-2a), a > 1/4
double green_function(std::complex<double> z, double a);

// probability of staying in a hull complement at kappa = 8/3
double restriction_probability(double phi_prime_at_root);

struct ModelRow {
  std::string model;
  double kappa;
  double a;
  double b;
  double btilde;
  double c_central;
  double d_dim;
};

// the reference table of discrete models and their exponents
std::span<const ModelRow> model_table();

}  // namespace slelab
