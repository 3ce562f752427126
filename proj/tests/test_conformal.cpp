#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "slelab/conformal.hpp"
#include "slelab/loewner.hpp"
#include "slelab/rng.hpp"

using namespace slelab;
using std::numbers::pi;

namespace {
double cabs(Complex z) { return std::abs(z); }
}

TEST_CASE("hull parsing round trip") {
  for (const char* text : {"slit:0,0.5", "halfdisk:2,0.5", "tilt:0.3,0.4,1.0471975511965976"}) {
    HullSpec h = HullSpec::parse(text);
    HullSpec h2 = HullSpec::parse(h.to_string());
    CHECK(h.kind == h2.kind);
    CHECK(h.x0 == doctest::Approx(h2.x0));
    CHECK(h.size == doctest::Approx(h2.size));
  }
  CHECK_THROWS(HullSpec::parse("blob:1,2"));
  CHECK_THROWS(HullSpec::parse("slit:1"));
  CHECK_THROWS(HullSpec::parse("slit:1,x"));
}

TEST_CASE("hcap closed forms and scaling") {
  CHECK(HullSpec::vertical_slit(0.0, 0.5).hcap() == doctest::Approx(0.125));
  CHECK(HullSpec::half_disk(0.0, 1.0).hcap() == doctest::Approx(1.0));
  CHECK(HullSpec::none().hcap() == 0.0);
  // hcap(rK) = r^2 hcap(K), translation invariant
  for (double r : {0.5, 2.0, 3.7}) {
    CHECK(HullSpec::vertical_slit(1.0, r * 0.5).hcap() ==
          doctest::Approx(r * r * HullSpec::vertical_slit(5.0, 0.5).hcap()));
    CHECK(HullSpec::half_disk(-2.0, r * 0.3).hcap() ==
          doctest::Approx(r * r * HullSpec::half_disk(0.0, 0.3).hcap()));
    CHECK(HullSpec::tilted_slit(0.0, r * 0.4, 1.1).hcap() ==
          doctest::Approx(r * r * HullSpec::tilted_slit(2.0, 0.4, 1.1).hcap()));
  }
  // monotonicity: slit of height h sits inside the half-disk of radius h
  double h = 0.7;
  CHECK(HullSpec::vertical_slit(0.0, h).hcap() <= HullSpec::half_disk(0.0, h).hcap());
  // hcap(K) <= rad(K)^2
  for (const auto& hull :
       {HullSpec::vertical_slit(0.3, 0.4), HullSpec::half_disk(1.0, 0.2),
        HullSpec::tilted_slit(0.0, 0.5, 2.0)}) {
    CHECK(hull.hcap() <= hull.rad() * hull.rad() + 1e-12);
  }
}

TEST_CASE("slit map closed forms") {
  // vertical slit: g(z) = sqrt(z^2 + h^2)
  HullSpec slit = HullSpec::vertical_slit(0.0, 1.0);
  for (Complex z : {Complex(1.0, 1.0), Complex(-2.0, 0.5), Complex(0.0, 3.0)}) {
    Complex expect = std::sqrt(z * z + 1.0);
    if (expect.imag() < 0.0) expect = -expect;
    CHECK(cabs(slit_map(slit, z) - expect) < 1e-12);
  }
  // half disk: z + 1/z
  HullSpec disk = HullSpec::half_disk(0.0, 1.0);
  for (Complex z : {Complex(1.5, 1.0), Complex(-2.0, 0.25), Complex(0.0, 2.0)}) {
    CHECK(cabs(slit_map(disk, z) - (z + 1.0 / z)) < 1e-12);
  }
  CHECK_THROWS_AS(slit_map(disk, Complex(0.1, 0.1)), std::domain_error);
}

TEST_CASE("slit map hydrodynamic normalization") {
  for (const auto& hull :
       {HullSpec::vertical_slit(0.0, 0.8), HullSpec::half_disk(0.5, 0.6),
        HullSpec::tilted_slit(-0.2, 0.7, 1.2)}) {
    double hc = hull.hcap();
    double rad = hull.rad();
    // |g(iR) - iR - hcap/(iR)| <= C hcap rad / R^2 with a modest constant
    for (double R : {6.0, 12.0, 24.0, 48.0}) {
      Complex z(0.0, R);
      Complex err = slit_map(hull, z) - z - hc / z;
      CHECK(cabs(err) <= 10.0 * hc * std::max(rad, 0.1) / (R * R));
    }
    // boundary maps to the real line
    double far = 2.0 * rad + 1.0;
    CHECK(std::fabs(slit_map(hull, Complex(hull.x0 + far, 0.0)).imag()) < 1e-12);
    CHECK(std::fabs(slit_map(hull, Complex(hull.x0 - far, 0.0)).imag()) < 1e-12);
  }
  // boundary arc of the half-disk maps into R
  HullSpec disk = HullSpec::half_disk(0.5, 0.6);
  for (double th : {0.3, 1.0, 2.2, 2.9}) {
    Complex z = Complex(0.5, 0.0) + 0.6 * std::polar(1.0, th);
    CHECK(std::fabs(slit_map(disk, z).imag()) < 1e-12);
  }
  // slit sides map into R
  HullSpec slit = HullSpec::vertical_slit(0.2, 0.9);
  CHECK(std::fabs(slit_map(slit, Complex(0.2, 0.5)).imag()) < 1e-12);
}

TEST_CASE("slit map inverse round trip") {
  RngStream rng(3);
  for (const auto& hull :
       {HullSpec::vertical_slit(0.0, 0.8), HullSpec::half_disk(0.5, 0.6),
        HullSpec::tilted_slit(-0.2, 0.7, 2.3)}) {
    for (int i = 0; i < 200; ++i) {
      Complex w(rng.uniform(-4.0, 4.0), rng.uniform(0.01, 4.0));
      Complex z = slit_map_inverse(hull, w);
      CHECK(z.imag() > -1e-12);
      CHECK(cabs(slit_map(hull, z) - w) < 1e-9 * (1.0 + cabs(w)));
    }
  }
}

TEST_CASE("tilted slit geometry") {
  double theta = 2.0 * pi / 3.0;
  double len = 0.5;
  HullSpec hull = HullSpec::tilted_slit(0.0, len, theta);
  // tip preimage maps to the slit tip
  double alpha = theta / pi;
  double s = len / (std::pow(1.0 - alpha, 1.0 - alpha) * std::pow(alpha, alpha));
  TiltedStep st{alpha, (1.0 - alpha) * s, alpha * s, (1.0 - 2.0 * alpha) * s};
  Complex tip = tilted_map(st, Complex(st.du, 0.0));
  CHECK(cabs(tip - len * std::polar(1.0, theta)) < 1e-10);
  // base points map to zero
  CHECK(cabs(tilted_map(st, Complex(st.du - st.p, 0.0))) < 1e-12);
  CHECK(cabs(tilted_map(st, Complex(st.du + st.q, 0.0))) < 1e-12);
  // hcap from the step parameters agrees with the hull formula
  CHECK(hull.hcap() == doctest::Approx(st.alpha * (1 - st.alpha) * s * s / 2.0));
}

TEST_CASE("hull_map_jet derivatives against stencils") {
  RngStream rng(11);
  for (const auto& hull :
       {HullSpec::vertical_slit(0.0, 0.8), HullSpec::half_disk(2.0, 0.5),
        HullSpec::tilted_slit(1.0, 0.6, 1.0)}) {
    for (int i = 0; i < 20; ++i) {
      Complex z(rng.uniform(-3.0, 3.0), rng.uniform(0.3, 3.0));
      if (hull.distance(z) < 0.3) continue;
      MapJet j = hull_map_jet(hull, z);
      double h = 1e-4;
      Complex fp = (slit_map(hull, z + h) - slit_map(hull, z - h)) / (2.0 * h);
      Complex fpp = (slit_map(hull, z + h) - 2.0 * j.f + slit_map(hull, z - h)) / (h * h);
      CHECK(cabs(j.fp - fp) < 1e-6 * (1.0 + cabs(fp)));
      CHECK(cabs(j.fpp - fpp) < 1e-4 * (1.0 + cabs(fpp)));
    }
  }
}

TEST_CASE("hull domain map at the origin") {
  // half_disk(2, 1/2): Phi'(0) = 1 - r^2/x0^2 = 15/16
  HullSpec hull = HullSpec::half_disk(2.0, 0.5);
  MapJet j = hull_map_jet(hull, Complex(0.0, 0.0));
  CHECK(j.fp.real() == doctest::Approx(15.0 / 16.0).epsilon(1e-14));
  CHECK(std::fabs(j.fp.imag()) < 1e-14);
  // empty hull is the identity
  MapJet id = hull_map_jet(HullSpec::none(), Complex(0.0, 0.0));
  CHECK(id.fp == Complex(1.0, 0.0));
  // the closure is rejected for derivative evaluation
  CHECK_THROWS_AS(hull_map_jet(hull, Complex(2.0, 0.5)), std::domain_error);
  CHECK_THROWS_AS(hull_map_jet(HullSpec::vertical_slit(1.0, 0.5), Complex(1.0, 0.2)),
                  std::domain_error);
  // Phi'(0) <= 1 across hulls to the side of the origin
  RngStream rng(7);
  for (int i = 0; i < 50; ++i) {
    double x0 = rng.uniform(1.0, 5.0) * (rng.coin() ? 1.0 : -1.0);
    double r = rng.uniform(0.05, 0.6);
    MapJet jj = hull_map_jet(HullSpec::half_disk(x0, r), Complex(0.0, 0.0));
    CHECK(jj.fp.real() <= 1.0 + 1e-12);
    CHECK(jj.fp.real() > 0.0);
  }
}

TEST_CASE("schwarzian closed forms") {
  // Moebius maps are annihilated
  auto moebius = [](Complex z) {
    return (2.0 * z + 1.0) / (0.5 * z + 3.0);
  };
  CHECK(cabs(schwarzian(moebius, Complex(0.3, 0.4))) < 1e-7);

  // Phi(z) = z + r^2/(z - x0) at 0; frozen value -8/75 for x0=2, r=1/2
  HullSpec hull = HullSpec::half_disk(2.0, 0.5);
  MapJet j = hull_map_jet(hull, Complex(0.0, 0.0));
  Complex s_exact = schwarzian(j);
  CHECK(s_exact.real() == doctest::Approx(-8.0 / 75.0).epsilon(1e-12));
  // stencil version agrees
  auto phi = [&](Complex z) { return slit_map(hull, z); };
  Complex s_fd = schwarzian(phi, Complex(0.0, 0.0));
  CHECK(cabs(s_fd - s_exact) < 1e-6);
  // leading order -6 r^2 / x0^4
  double r = 0.5, x0 = 2.0;
  CHECK(std::fabs(s_exact.real() - (-6.0 * r * r / std::pow(x0, 4))) < 0.02);

  // cocycle with a Moebius inner map: S(f o m) = (Sf o m) m'^2
  auto f = [&](Complex z) { return slit_map(hull, z); };
  auto m = [](Complex z) { return z / (1.0 + 0.2 * z); };
  auto fm = [&](Complex z) { return f(m(z)); };
  Complex z0(0.1, 0.0);
  Complex mp = 1.0 / ((1.0 + 0.2 * z0) * (1.0 + 0.2 * z0));
  CHECK(cabs(schwarzian(fm, z0) - schwarzian(f, m(z0)) * mp * mp) < 1e-5);
}

TEST_CASE("poisson kernel half plane") {
  CHECK(poisson_kernel_h(0.0, Complex(0.0, 1.0)) == doctest::Approx(1.0 / pi));
  CHECK(poisson_kernel_h(0.0, Complex(1.0, 1.0)) == doctest::Approx(1.0 / (2.0 * pi)));
  // normalization: integrates to one over the boundary
  double sum = 0.0;
  double h = 0.01;
  for (double x = -200.0; x < 200.0; x += h)
    sum += poisson_kernel_h(x + h / 2.0, Complex(0.3, 0.9)) * h;
  CHECK(sum == doctest::Approx(1.0).epsilon(5e-3));
  CHECK_THROWS_AS(poisson_kernel_h(0.0, Complex(0.0, -1.0)), std::domain_error);
}

TEST_CASE("strip excursion kernel") {
  // reflection symmetry
  Complex z(0.7, 1.1);
  CHECK(excursion_kernel_strip(z, 0.8, 40) ==
        doctest::Approx(excursion_kernel_strip(Complex(0.7, pi - 1.1), pi - 0.8, 40))
            .epsilon(1e-12));
  // first-mode ratio at large x
  double x = 9.0;
  double r = excursion_kernel_strip(Complex(x, pi / 2), pi / 2, 60) /
             excursion_kernel_strip(Complex(x, pi / 2), pi / 4, 60);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  // kernel integrates to the probability of exiting through the left edge;
  // for x -> 0 that probability approaches 1
  double total = 0.0;
  int n = 2000;
  for (int i = 0; i < n; ++i) {
    double yp = (i + 0.5) * pi / n;
    total += excursion_kernel_strip(Complex(0.05, pi / 2), yp, 2000) * (pi / n);
  }
  CHECK(total > 0.8);
  CHECK(total < 1.0 + 1e-6);
  CHECK_THROWS_AS(excursion_kernel_strip(Complex(-1.0, 1.0), 1.0, 10), std::domain_error);
}

TEST_CASE("strip excursion kernel against a random walk estimate") {
  // SRW on the strip grid, spacing pi/200; window-hit probability on the left
  // edge compared with the series kernel integrated over the window
  const int ny = 200;
  const double h = pi / ny;
  const int x_start = 20;   // x = 0.1*pi
  const int y_start = 100;  // y = pi/2
  const int x_far = 800;    // absorb far to the right, e^{-x} negligible
  const int winlo = 50, winhi = 100;  // y' in [pi/4, pi/2)
  RngStream rng(123);
  int hits = 0, total = 60000;
  for (int w = 0; w < total; ++w) {
    int x = x_start, y = y_start;
    while (x > 0 && x < x_far && y > 0 && y < ny) {
      switch (rng.next_u64() & 3ull) {
        case 0: ++x; break;
        case 1: --x; break;
        case 2: ++y; break;
        default: --y; break;
      }
    }
    if (x == 0 && y >= winlo && y < winhi) ++hits;
  }
  double est = static_cast<double>(hits) / total;
  double expect = 0.0;
  for (int m = winlo; m < winhi; ++m)
    expect += excursion_kernel_strip(Complex(x_start * h, y_start * h),
                                     (m + 0.0) * h, 4000) * h;
  CHECK(std::fabs(est - expect) / expect < 0.02);
}

TEST_CASE("lambda flow") {
  // identity map is a fixed point
  PowerSeries id{{0.0, 1.0, 0.0, 0.0, 0.0}};
  PowerSeries lf = lambda_flow(id);
  for (double c : lf.c) CHECK(std::fabs(c) < 1e-15);

  RngStream rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(8);
    c[0] = rng.uniform(-1.0, 1.0);
    c[1] = rng.uniform(0.2, 2.0);
    for (int i = 2; i < 8; ++i) c[i] = rng.uniform(-0.5, 0.5);
    PowerSeries F{c};
    PowerSeries L = lambda_flow(F);
    // LambdaF(0) = -(3/2) F''(0) = -3 c2
    CHECK(L.c[0] == doctest::Approx(-3.0 * c[2]).epsilon(1e-12));
    // Lambda(rF + q0) = r LambdaF
    double r = rng.uniform(0.5, 2.0), q0 = rng.uniform(-1.0, 1.0);
    std::vector<double> c2 = c;
    for (auto& v : c2) v *= r;
    c2[0] += q0;
    PowerSeries L2 = lambda_flow(PowerSeries{c2});
    for (std::size_t i = 0; i < L.c.size(); ++i)
      CHECK(L2.c[i] == doctest::Approx(r * L.c[i]).epsilon(1e-10));
  }
  CHECK_THROWS_AS(lambda_flow(PowerSeries{{0.0, -1.0, 0.2}}), std::domain_error);
}

TEST_CASE("lambda flow matches the factorial-convention expansion") {
  // under coefficients q_n/n! the first coefficients are
  // -3q2/2, q2^2/(4q1) - 2q3/3, q2q3/(6q1) - 5q4/24 - q2^3/(8q1^2)
  double q1 = 1.0, q2 = 0.37, q3 = -0.42, q4 = 0.19;
  PowerSeries F{{0.0, q1, q2 / 2.0, q3 / 6.0, q4 / 24.0}};
  PowerSeries L = lambda_flow(F);
  CHECK(L.c[0] == doctest::Approx(-1.5 * q2).epsilon(1e-12));
  CHECK(L.c[1] == doctest::Approx(q2 * q2 / (4.0 * q1) - 2.0 * q3 / 3.0).epsilon(1e-12));
  CHECK(L.c[2] == doctest::Approx(q2 * q3 / (6.0 * q1) - 5.0 * q4 / 24.0 -
                                  q2 * q2 * q2 / (8.0 * q1 * q1))
                      .epsilon(1e-12));
}

TEST_CASE("lambda flow matches the conjugated Loewner flow") {
  // psi_t = g*_t o F o g_t^{-1} with U == 0, rate 1; dpsi/dt at 0 ~ LambdaF
  RngStream rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> c(6, 0.0);
    c[0] = rng.uniform(-0.3, 0.3);
    c[1] = rng.uniform(0.7, 1.3);
    for (int i = 2; i < 6; ++i) c[i] = rng.uniform(-0.1, 0.1);
    PowerSeries F{c};
    PowerSeries L = lambda_flow(F);

    double dtau = 1e-5;
    double h = std::sqrt(2.0 * dtau);  // slit height at rate a = 1
    // image hull: approximate the image curve by a vertical slit at F(0)
    Complex tip = F.eval(Complex(0.0, h));
    HullSpec image = HullSpec::vertical_slit(tip.real(), tip.imag());
    HullSpec pre = HullSpec::vertical_slit(0.0, h);
    for (double x : {0.10, 0.16, -0.13}) {
      Complex z(x, 0.02);
      Complex psi = slit_map(image, F.eval(slit_map_inverse(pre, z)));
      Complex rate = (psi - F.eval(z)) / dtau;
      CHECK(cabs(rate - L.eval(z)) < 2e-4 + 1e-3 * cabs(L.eval(z)));
    }
  }
}
