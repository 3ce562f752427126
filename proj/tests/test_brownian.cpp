#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slelab/brownian.hpp"
#include "slelab/drivers.hpp"
#include "slelab/loewner.hpp"
#include "slelab/parallel.hpp"

using namespace slelab;
using std::numbers::pi;

TEST_CASE("hcap closed half-disk is exact") {
  McResult r = hcap_mc(HullSpec::half_disk(0.0, 1.0), 2000, 3, 0);
  CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.std_error < 1e-12);  // tau = 0, zero variance
}

TEST_CASE("hcap of the empty hull") {
  McResult r = hcap_mc(HullSpec::none(), 10, 3, 0);
  CHECK(r.estimate == 0.0);
}

TEST_CASE("hcap monte carlo against closed forms") {
  struct Case {
    HullSpec hull;
    double expect;
  };
  const Case cases[] = {
      {HullSpec::vertical_slit(0.0, 0.5), 0.125},
      {HullSpec::vertical_slit(0.3, 0.4), 0.08},  // translation invariance
      {HullSpec::half_disk(0.0, 0.5), 0.25},
      {HullSpec::tilted_slit(0.0, 0.5, pi / 3.0),
       HullSpec::tilted_slit(0.0, 0.5, pi / 3.0).hcap()},
  };
  std::uint64_t seed = 17;
  for (const auto& c : cases) {
    McResult r = hcap_mc(c.hull, 20000, seed++, 0);
    CAPTURE(c.hull.to_string());
    CHECK(std::fabs(r.estimate - c.expect) < 3.0 * r.std_error + 0.002);
  }
}

TEST_CASE("bubble mass: integral, quadrature and schwarzian agree") {
  HullSpec hull = HullSpec::half_disk(2.0, 0.5);
  double s = bubble_schwarzian(hull);
  CHECK(s == doctest::Approx(4.0 / 225.0).epsilon(1e-12));
  double q = bubble_gamma_quadrature(hull);
  CHECK(q == doctest::Approx(s).epsilon(1e-6));
  McResult mc = bubble_gamma_integral(hull, 40000, 5, 0);
  CHECK(std::fabs(mc.estimate - s) < 3.0 * mc.std_error);

  // small hull: leading order r^2 / x0^4
  HullSpec tiny = HullSpec::half_disk(4.0, 0.05);
  CHECK(bubble_schwarzian(tiny) ==
        doctest::Approx(0.05 * 0.05 / 256.0).epsilon(2e-3));

  // slit hull: quadrature against the schwarzian (independent routes)
  HullSpec slit = HullSpec::vertical_slit(2.0, 0.5);
  CHECK(bubble_gamma_quadrature(slit) ==
        doctest::Approx(bubble_schwarzian(slit)).epsilon(1e-5));

  // empty hull carries no mass
  CHECK(bubble_schwarzian(HullSpec::none()) == 0.0);
}

TEST_CASE("bubble mass normalization and covariance") {
  // centered half-disk: mass 1/r^2, so exactly 1 at r = 1
  CHECK(bubble_gamma_quadrature(HullSpec::half_disk(0.0, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  McResult mc = bubble_gamma_integral(HullSpec::half_disk(0.0, 1.0), 20000, 6, 0);
  CHECK(std::fabs(mc.estimate - 1.0) < 3.0 * mc.std_error);
  // scaling (x0, r) -> (l x0, l r) divides the mass by l^2
  for (double l : {0.5, 2.0, 4.0}) {
    double g1 = bubble_schwarzian(HullSpec::half_disk(2.0, 0.5));
    double g2 = bubble_schwarzian(HullSpec::half_disk(2.0 * l, 0.5 * l));
    CHECK(g2 == doctest::Approx(g1 / (l * l)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bubble_schwarzian(HullSpec::half_disk(0.3, 0.5)),
                  std::domain_error);
  CHECK_THROWS_AS(bubble_gamma_integral(HullSpec::half_disk(0.3, 0.5), 10, 1, 0),
                  std::domain_error);
}

TEST_CASE("beurling exponent (reduced scale)") {
  BeurlingResult r = beurling_mc({0.25, 0.125, 0.0625}, 20000, 77, 0);
  CHECK(r.fitted_exponent == doctest::Approx(0.5).epsilon(0.3));
  // monotone in eps
  CHECK(r.prob[0] >= r.prob[1]);
  CHECK(r.prob[1] >= r.prob[2]);
  // a single point is polar
  BeurlingResult one = beurling_mc({1.0}, 3000, 78, 0);
  CHECK(one.prob[0] > 0.95);
  CHECK_THROWS_AS(beurling_mc({-0.1}, 10, 1, 0), std::domain_error);
}

TEST_CASE("rooted loop sampler") {
  RngStream rng(2);
  LoopSample ls = sample_rooted_loops(Complex(-1.0, -1.0), Complex(1.0, 1.0),
                                      4000, 0.01, 10.0, 64, rng);
  // total mass of the window
  double area = 4.0;
  CHECK(ls.window_mass ==
        doctest::Approx(area / (2.0 * pi) * (1.0 / 0.01 - 1.0 / 10.0)));
  // bridge closure is exact
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& loop = ls.loops[i];
    CHECK(std::abs(loop.points.front() - loop.root) == 0.0);
    CHECK(std::abs(loop.points.back() - loop.root) == 0.0);
  }
  // sub-window mass matches the 1/(2 pi t^2) density: [s1, s2] = [0.1, 1]
  double mass = 0.0;
  std::uint64_t hits = 0;
  for (const auto& loop : ls.loops) {
    if (loop.duration >= 0.1 && loop.duration <= 1.0) {
      mass += loop.weight;
      ++hits;
    }
  }
  double expect = area / (2.0 * pi) * (1.0 / 0.1 - 1.0 / 1.0);
  double p = static_cast<double>(hits) / 4000.0;
  double se = ls.window_mass * std::sqrt(p * (1.0 - p) / 4000.0);
  CHECK(std::fabs(mass - expect) < 3.0 * se);
  // disk-pair mass estimator is symmetric under swapping the disks
  double m12 = loop_mass_hitting_both(ls, Complex(0.2, 0.1), 0.3,
                                      Complex(-0.4, -0.2), 0.25);
  double m21 = loop_mass_hitting_both(ls, Complex(-0.4, -0.2), 0.25,
                                      Complex(0.2, 0.1), 0.3);
  CHECK(m12 == m21);
  CHECK_THROWS_AS(sample_rooted_loops(Complex(0, 0), Complex(1, 1), 1, -1.0,
                                      1.0, 8, rng),
                  std::domain_error);
}

TEST_CASE("evolved bubble mass: jet against mapped-hull geometry") {
  // freeze a smooth driving path, evolve the hull map jet, and compare the
  // escaping-bubble mass -S(Phi_t)(U_t)/6 with the closed-form mass of a
  // half-disk fitted to the forward-mapped hull boundary (small times)
  double a = 0.75;
  HullSpec hull = HullSpec::half_disk(2.0, 0.5);
  double dt = 1e-4;
  std::size_t steps = 400;  // t = 0.04
  std::vector<double> u(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = static_cast<double>(k) * dt;
    u[k] = 0.4 * std::sin(5.0 * t) + 0.2 * t;
  }
  DrivingPath path(a, dt, u);
  DomainJet jet = DomainJet::initial(hull, a, 0.0);
  for (std::size_t k = 0; k < steps; ++k) jet.advance(dt, u[k + 1] - u[k]);
  double gamma_jet = -jet.schwarzian() / 6.0;

  // forward-map the feet and the arc top, fit a half-disk in the image
  auto map_pt = [&](Complex z) {
    Trajectory tr = evolve_point(path, z, -1.0, 1e-9);
    REQUIRE(!tr.swallowed);
    const auto& s = tr.samples.back();
    return Complex(s.x, s.y);  // relative to U_T already
  };
  Complex left = map_pt(Complex(1.5, 0.0));
  Complex right = map_pt(Complex(2.5, 0.0));
  double x0_img = 0.5 * (left.real() + right.real());
  double r_img = 0.5 * (right.real() - left.real());
  double gamma_geo =
      bubble_schwarzian(HullSpec::half_disk(x0_img, r_img));
  CHECK(gamma_jet == doctest::Approx(gamma_geo).epsilon(0.02));
}

TEST_CASE("restriction martingale with the loop correction at kappa = 2") {
  // for kappa != 8/3 the avoid-martingale carries the accumulated bubble
  // mass: M_t = exp(-c int a S(Phi)(U)/12 ds) Phi'(U)^b stays flat in mean
  double kappa = 2.0, a = 1.0, b = 1.0, c = -2.0;
  HullSpec hull = HullSpec::half_disk(2.0, 0.5);
  double dt = 1e-3;
  std::size_t steps = 300;
  auto vals = run_replicas<double>(
      4000, 909, 0, [&](std::uint64_t, RngStream& rng) -> double {
        DomainJet j = DomainJet::initial(hull, a, 0.0);
        double sd = std::sqrt(dt);
        double log_corr = 0.0;
        double m = std::pow(15.0 / 16.0, b);
        for (std::size_t k = 0; k < steps; ++k) {
          double du = -sd * rng.normal();
          log_corr += -c * a * j.schwarzian() / 12.0 * dt;
          j.advance(dt, du);
          double pp = j.phi_prime();
          if (!(pp > 0.3) || !(pp < 1.0 + 1e-9)) break;
          m = std::exp(log_corr) * std::pow(pp, b);
        }
        return m;
      });
  McResult r = summarize(vals);
  CHECK(std::fabs(r.estimate - std::pow(15.0 / 16.0, b)) <
        3.0 * r.std_error + 0.004);
  (void)kappa;
}
