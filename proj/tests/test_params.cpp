#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "slelab/params.hpp"
#include "slelab/rng.hpp"

using namespace slelab;

TEST_CASE("derive_params reproduces the model table") {
  for (const auto& row : model_table()) {
    SleParams p = derive_params(row.kappa);
    CAPTURE(row.model);
    CHECK(p.a == doctest::Approx(row.a).epsilon(1e-15));
    CHECK(p.b == doctest::Approx(row.b).epsilon(1e-15));
    CHECK(p.btilde == doctest::Approx(row.btilde).epsilon(1e-15));
    CHECK(p.c_central == doctest::Approx(row.c_central).epsilon(1e-15));
    CHECK(p.d_dim == doctest::Approx(row.d_dim).epsilon(1e-15));
    CHECK(p.bhat == doctest::Approx(2.0 - row.d_dim).epsilon(1e-15));
  }
}

TEST_CASE("derive_params specific rows") {
  SleParams perc = derive_params(6.0);
  CHECK(perc.a == doctest::Approx(1.0 / 3.0));
  CHECK(perc.b == doctest::Approx(0.0));
  CHECK(perc.btilde == doctest::Approx(0.0));
  CHECK(perc.c_central == doctest::Approx(0.0));
  CHECK(perc.d_dim == doctest::Approx(7.0 / 4.0));

  SleParams lerw = derive_params(2.0);
  CHECK(lerw.a == doctest::Approx(1.0));
  CHECK(lerw.b == doctest::Approx(1.0));
  CHECK(lerw.btilde == doctest::Approx(0.0));
  CHECK(lerw.c_central == doctest::Approx(-2.0));
  CHECK(lerw.d_dim == doctest::Approx(5.0 / 4.0));

  SleParams saw = derive_params(8.0 / 3.0);
  CHECK(saw.a == doctest::Approx(3.0 / 4.0));
  CHECK(saw.b == doctest::Approx(5.0 / 8.0));
  CHECK(saw.btilde == doctest::Approx(5.0 / 48.0));
  CHECK(saw.c_central == doctest::Approx(0.0));
  CHECK(saw.d_dim == doctest::Approx(4.0 / 3.0));

  // kappa = 8/3 and kappa = 6 both have vanishing central charge
  CHECK(std::fabs(derive_params(6.0).c_central) < 1e-15);
  CHECK(std::fabs(derive_params(8.0 / 3.0).c_central) < 1e-15);

  // plane-filling regime
  CHECK(derive_params(10.0).d_dim == doctest::Approx(2.0));

  CHECK_THROWS_AS(derive_params(0.0), std::domain_error);
  CHECK_THROWS_AS(derive_params(-1.0), std::domain_error);
  CHECK_THROWS_AS(derive_params(std::nan("")), std::domain_error);
}

TEST_CASE("q exponent closed values") {
  double a = 0.75;
  CHECK(q_exponent(1.0, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q_exponent(2.0, a) == doctest::Approx(1.5).epsilon(1e-14));
  // q(b) = a for the boundary exponent
  for (double aa : {0.3, 0.5, 0.75, 1.0, 1.7}) {
    double b = (3.0 * aa - 1.0) / 2.0;
    CHECK(q_exponent(b, aa) == doctest::Approx(aa).epsilon(1e-12));
  }
  CHECK_THROWS_AS(q_exponent(lambda0(0.75) - 0.01, 0.75), std::domain_error);
  // minus branch is the other root
  double lam = 0.37;
  double qp = q_exponent(lam, a, QBranch::plus);
  double qm = q_exponent(lam, a, QBranch::minus);
  CHECK(qp + qm == doctest::Approx(1.0 - 2.0 * a).epsilon(1e-12));
  CHECK(qp * qm == doctest::Approx(-2.0 * a * lam).epsilon(1e-12));
  CHECK(qp >= qm);
}

TEST_CASE("exponent value bundle") {
  double a = 0.75;
  ExponentValue ev = exponent_value(0.37, a);
  CHECK(ev.q_plus >= ev.q_minus);
  CHECK(ev.q_plus + ev.q_minus == doctest::Approx(1.0 - 2.0 * a));
  CHECK(ev.q_plus * ev.q_minus == doctest::Approx(-2.0 * a * 0.37));
  CHECK(ev.lambda0 == doctest::Approx(lambda0(a)));
  CHECK_THROWS_AS(exponent_value(lambda0(a) - 0.1, a), std::domain_error);
}

TEST_CASE("root identity and inverse") {
  RngStream rng(17);
  for (int i = 0; i < 1000; ++i) {
    double a = rng.uniform(0.26, 2.0);
    double l0 = lambda0(a);
    double l1 = l0 + rng.uniform(0.0, 4.0);
    double l2 = l0 + rng.uniform(0.0, 4.0);
    double lhs = q_exponent(l1, a) + q_exponent(l2, a);
    double rhs = q_exponent(l1 + l2 + q_exponent(l1, a) * q_exponent(l2, a) / a, a);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(q_inverse(q_exponent(l1, a), a) == doctest::Approx(l1).epsilon(1e-12));
  }
}

TEST_CASE("crossing exponent cascade and closed form") {
  RngStream rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    double a = rng.uniform(0.3, 1.5);
    int n = 2 + static_cast<int>(rng.uniform_index(5));
    std::vector<double> lams(n);
    for (auto& l : lams) l = lambda0(a) + rng.uniform(0.0, 3.0);
    double whole = chordal_crossing_exponent(lams, a);
    // cascade: split at every k
    for (int k = 1; k < n; ++k) {
      std::vector<double> left(lams.begin(), lams.begin() + k);
      std::vector<double> right(lams.begin() + k, lams.end());
      std::vector<double> pair = {chordal_crossing_exponent(left, a),
                                  chordal_crossing_exponent(right, a)};
      CHECK(chordal_crossing_exponent(pair, a) ==
            doctest::Approx(whole).epsilon(1e-10));
    }
    // permutation symmetry
    std::vector<double> rev(lams.rbegin(), lams.rend());
    CHECK(chordal_crossing_exponent(rev, a) == doctest::Approx(whole).epsilon(1e-12));
  }
  // n copies of b against the closed form
  for (double a : {0.4, 0.75, 1.0, 1.3}) {
    double b = (3.0 * a - 1.0) / 2.0;
    for (int n = 1; n <= 10; ++n) {
      std::vector<double> lams(n, b);
      CHECK(chordal_crossing_exponent(lams, a) ==
            doctest::Approx(crossing_exponent_n(n, a)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(chordal_crossing_exponent({}, 0.75), std::domain_error);
}

TEST_CASE("crossing exponent worked values at a=3/4") {
  double a = 0.75;
  CHECK(chordal_crossing_exponent(std::vector<double>{5.0 / 8, 5.0 / 8}, a) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(chordal_crossing_exponent(std::vector<double>{5.0 / 8, 1.0 / 8}, a) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("radial exponent") {
  double a = 0.75;
  CHECK(radial_exponent(1.0, 0.0, a) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(radial_exponent(2.0, 0.0, a) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(radial_beta(5.0 / 8.0, a) == doctest::Approx(9.0 / 16.0).epsilon(1e-13));
  // at b_arg = b the simple form applies
  double b = (3.0 * a - 1.0) / 2.0;
  double btilde = b * (1.0 - a) / (2.0 * a);
  for (double lam : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(radial_exponent(b, lam, a) ==
          doctest::Approx(btilde + radial_beta(lam, a)).epsilon(1e-12));
  }
  // multi-argument form goes through the chordal cascade
  std::vector<double> lams = {0.4, 0.9};
  CHECK(radial_exponent(b, lams, a) ==
        doctest::Approx(radial_exponent(b, chordal_crossing_exponent(lams, a), a))
            .epsilon(1e-12));
  // consistency xi(b, l1, l2) = xi(xi~(b,l1), l2)
  double l1 = 0.4, l2 = 0.9;
  double x1 = chordal_crossing_exponent(std::vector<double>{b, l1}, a);
  CHECK(radial_exponent(x1, l2, a) ==
        doctest::Approx(radial_exponent(b, std::vector<double>{l1, l2}, a))
            .epsilon(1e-12));
}

namespace {

// independent oracle: midpoint Riemann sum over the regular region away from
// the endpoint singularities, anchored at the symmetry point phi(1) = 1/2
double cardy_riemann_oracle(double y, double a, int n = 1000000) {
  double x = y / (y + 1.0);
  bool flip = x < 0.5;
  double lo = 0.5, hi = flip ? 1.0 - x : x;
  double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = lo + (i + 0.5) * h;
    s += std::pow(u, -2.0 * a) * std::pow(1.0 - u, -2.0 * a);
  }
  s *= h;
  double norm = std::exp(std::lgamma(2.0 - 4.0 * a) - 2.0 * std::lgamma(1.0 - 2.0 * a));
  double val = 0.5 + norm * s;
  return flip ? 1.0 - val : val;
}

}  // namespace

TEST_CASE("cardy formula") {
  // exact symmetry point for several a
  for (double a : {0.1, 1.0 / 3.0, 0.45}) {
    CHECK(cardy_phi(1.0, a) == doctest::Approx(0.5).epsilon(1e-12));
  }
  // frozen value from the Riemann-sum oracle (a = 1/3, y = 2)
  CHECK(cardy_phi(2.0, 1.0 / 3.0) ==
        doctest::Approx(0.58131518313857823).epsilon(1e-10));
  CHECK(cardy_phi(2.0, 1.0 / 3.0) ==
        doctest::Approx(cardy_riemann_oracle(2.0, 1.0 / 3.0)).epsilon(1e-9));
  CHECK(cardy_phi(0.5, 1.0 / 3.0) ==
        doctest::Approx(cardy_riemann_oracle(0.5, 1.0 / 3.0)).epsilon(1e-9));

  // monotone in y and complementary symmetry
  RngStream rng(5);
  for (int i = 0; i < 50; ++i) {
    double a = rng.uniform(0.05, 0.49);
    double y = std::exp(rng.uniform(-3.0, 3.0));
    CHECK(cardy_phi(y, a) + cardy_phi(1.0 / y, a) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(cardy_phi(y * 1.1, a) > cardy_phi(y, a));
  }
  // limits (approach is slow near the endpoints, rate (1/y)^(1-2a))
  CHECK(cardy_phi(1e8, 1.0 / 3.0) > 0.998);
  CHECK(cardy_phi(1e12, 1.0 / 3.0) > cardy_phi(1e8, 1.0 / 3.0));
  CHECK(cardy_phi(1e-8, 1.0 / 3.0) < 0.002);
  CHECK(cardy_phi(1e-12, 1.0 / 3.0) < cardy_phi(1e-8, 1.0 / 3.0));
  CHECK_THROWS_AS(cardy_phi(1.0, 0.6), std::domain_error);
  CHECK_THROWS_AS(cardy_phi(-1.0, 1.0 / 3.0), std::domain_error);
}

TEST_CASE("green function") {
  double a = 0.75;
  CHECK(green_function({0.0, 1.0}, a) == doctest::Approx(1.0).epsilon(1e-14));
  for (double y : {0.2, 1.0, 3.0}) {
    double d = 1.0 + 1.0 / (4.0 * a);
    CHECK(green_function({0.0, y}, a) ==
          doctest::Approx(std::pow(y, d - 2.0)).epsilon(1e-13));
  }
  CHECK(green_function({1.0, 1.0}, a) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(green_function({1.0, -1.0}, a), std::domain_error);
  CHECK_THROWS_AS(green_function({1.0, 0.0}, a), std::domain_error);
}

TEST_CASE("restriction probability") {
  CHECK(restriction_probability(1.0) == doctest::Approx(1.0));
  CHECK(restriction_probability(15.0 / 16.0) ==
        doctest::Approx(0.96046611517828702).epsilon(1e-14));
  CHECK(restriction_probability(1e-12) < 1e-7);
  CHECK_THROWS_AS(restriction_probability(0.0), std::domain_error);
  CHECK_THROWS_AS(restriction_probability(1.5), std::domain_error);
}
