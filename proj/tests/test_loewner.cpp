#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "slelab/loewner.hpp"
#include "slelab/rng.hpp"

using namespace slelab;

namespace {

DrivingPath constant_driver(double a, double dt, std::size_t steps, double c) {
  return DrivingPath(a, dt, std::vector<double>(steps + 1, c));
}

DrivingPath brownian_driver(double a, double dt, std::size_t steps, RngStream& rng) {
  std::vector<double> u(steps + 1, 0.0);
  double sd = std::sqrt(dt);
  for (std::size_t k = 1; k <= steps; ++k) u[k] = u[k - 1] - sd * rng.normal();
  return DrivingPath(a, dt, std::move(u));
}

}  // namespace

TEST_CASE("driving path validation") {
  CHECK_THROWS_AS(DrivingPath(0.0, 0.1, {0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(DrivingPath(1.0, -0.1, {0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(DrivingPath(1.0, 0.1, {0.0, std::nan("")}), std::domain_error);
  DrivingPath p(1.0, 0.25, {0.0, 1.0, 1.0});
  CHECK(p.total_time() == doctest::Approx(0.5));
  // sqrt interpolation hits the endpoints
  CHECK(p.value(0.0) == doctest::Approx(0.0));
  CHECK(p.value(0.25) == doctest::Approx(1.0));
  CHECK(p.value(0.25 * 0.25) == doctest::Approx(0.5));  // quarter cell: sqrt(1/4)
}

TEST_CASE("evolve_point with zero driving has the closed form") {
  // g_t(z) = sqrt(z^2 + 2at), so on the imaginary axis Y_t = sqrt(y0^2 - 2at)
  // decreases until the point is swallowed at t = y0^2/(2a)
  double a = 0.5;
  DrivingPath path = constant_driver(a, 1e-3, 2000, 0.0);
  double y0 = 0.7;
  Trajectory traj = evolve_point(path, Complex(0.0, y0));
  CHECK(traj.swallowed);
  double cutoff = std::max(1e-7, 10.0 * std::sqrt(a * path.dt));
  double expected_swallow = (y0 * y0 - cutoff * cutoff) / (2.0 * a);
  CHECK(traj.swallow_time == doctest::Approx(expected_swallow).epsilon(1e-2));
  for (std::size_t i = 0; i + 2 < traj.samples.size(); i += 100) {
    const auto& s = traj.samples[i];
    double expect = std::sqrt(y0 * y0 - 2.0 * a * s.t);
    CHECK(s.y == doctest::Approx(expect).epsilon(1e-8));
    CHECK(std::fabs(s.x) < 1e-12);
    // g' = z/sqrt(z^2+2at) has modulus y0/Y_t here
    CHECK(std::abs(s.gprime) == doctest::Approx(y0 / expect).epsilon(1e-7));
    // conformal radius (y0^2 - 2at)/y0, linear in t
    CHECK(s.upsilon == doctest::Approx(expect * expect / y0).epsilon(1e-7));
  }
  // initial state
  CHECK(traj.samples.front().upsilon == doctest::Approx(y0));
  CHECK(std::abs(traj.samples.front().gprime - Complex(1.0, 0.0)) < 1e-14);
  // with a tiny override cutoff the swallow time approaches y0^2/(2a)
  Trajectory fine = evolve_point(path, Complex(0.0, y0), -1.0, 1e-6);
  CHECK(fine.swallow_time == doctest::Approx(y0 * y0 / (2.0 * a)).epsilon(1e-6));
}

TEST_CASE("evolve_point on the real axis never swallows for zero driving") {
  double a = 1.0;
  DrivingPath path = constant_driver(a, 1e-3, 1000, 0.0);
  double x = 0.8;
  Trajectory traj = evolve_point(path, Complex(x, 0.0));
  REQUIRE(!traj.swallowed);
  const auto& s = traj.samples.back();
  CHECK(s.x == doctest::Approx(std::sqrt(x * x + 2.0 * a * s.t)).epsilon(1e-9));
  CHECK(s.y == doctest::Approx(0.0));
}

TEST_CASE("evolve_point swallows the start point of the driving") {
  DrivingPath path = constant_driver(1.0, 1e-3, 10, 0.3);
  Trajectory traj = evolve_point(path, Complex(0.3, 0.0));
  CHECK(traj.swallowed);
  CHECK(traj.swallow_time == doctest::Approx(0.0));
}

TEST_CASE("upsilon and y are monotone along trajectories") {
  RngStream rng(42);
  DrivingPath path = brownian_driver(0.75, 1e-3, 2000, rng);
  for (Complex z : {Complex(0.4, 0.8), Complex(-1.0, 0.5), Complex(0.0, 2.0)}) {
    Trajectory traj = evolve_point(path, z);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      if (!traj.samples[i].alive) break;
      CHECK(traj.samples[i].y <= traj.samples[i - 1].y + 1e-9);
      CHECK(traj.samples[i].upsilon <= traj.samples[i - 1].upsilon + 1e-9);
    }
  }
}

TEST_CASE("conjugation symmetry through real driving") {
  // g_t(conj z) = conj(g_t(z)) for real-valued driving; the composed
  // elementary maps accept conjugate inputs directly
  RngStream rng(5);
  DrivingPath path = brownian_driver(1.0, 1e-3, 300, rng);
  for (auto kind : {SlitMapChain::StepKind::tilted,
                    SlitMapChain::StepKind::vertical}) {
    SlitMapChain chain = SlitMapChain::from_driving(path, kind);
    for (Complex z : {Complex(0.7, 1.1), Complex(-1.3, 0.6), Complex(2.0, 2.0)}) {
      Complex g_up = chain.forward(z);
      Complex g_dn = chain.forward(std::conj(z));
      CHECK(std::abs(g_dn - std::conj(g_up)) < 1e-12 * (1.0 + std::abs(g_up)));
    }
  }
}

TEST_CASE("koebe interval") {
  PointState p;
  p.upsilon = 1.0;
  p.alive = true;
  Interval iv = koebe_distance(p);
  CHECK(iv.lo == doctest::Approx(0.25));
  CHECK(iv.hi == doctest::Approx(4.0));
  p.alive = false;
  iv = koebe_distance(p);
  CHECK(iv.hi == 0.0);
}

TEST_CASE("koebe interval brackets the true distance for the zero-driving slit") {
  double a = 0.5;
  DrivingPath path = constant_driver(a, 1e-3, 1000, 0.0);
  Complex z(0.3, 0.6);
  Trajectory traj = evolve_point(path, z);
  double prev_mid = 1e300;
  for (std::size_t i = 0; i < traj.samples.size(); i += 100) {
    const auto& s = traj.samples[i];
    // hull at time t is the slit (0, i sqrt(2at)]; pioneer set is R union slit
    double h = std::sqrt(2.0 * a * s.t);
    double dist_slit = (z.imag() <= h) ? std::fabs(z.real())
                                       : std::abs(z - Complex(0.0, h));
    double dist = std::min(dist_slit, z.imag());
    Interval iv = koebe_distance(s);
    CHECK(dist >= iv.lo - 1e-9);
    CHECK(dist <= iv.hi + 1e-9);
    double mid = 0.5 * (iv.lo + iv.hi);
    CHECK(mid <= prev_mid + 1e-9);
    prev_mid = mid;
  }
}

TEST_CASE("reverse trace of constant driving is the vertical slit") {
  double a = 0.75, dt = 1e-3;
  double c = 1.3;
  DrivingPath path = constant_driver(a, dt, 400, c);
  double eps = 1e-7;
  Trace tr = reverse_trace(path, eps);
  REQUIRE(tr.gamma.size() == 401);
  CHECK(std::abs(tr.gamma.front() - Complex(c, 0.0)) < 1e-14);
  for (std::size_t k = 1; k < tr.gamma.size(); k += 40) {
    Complex expect(c, std::sqrt(2.0 * a * tr.t[k]));
    CHECK(std::abs(tr.gamma[k] - expect) < 1e-6 + eps);
  }
}

TEST_CASE("trace tip diagnostic shrinks with the offset") {
  RngStream rng(321);
  DrivingPath path = brownian_driver(0.75, 1e-3, 200, rng);
  Trace coarse = reverse_trace(path, 1e-2);
  Trace fine = reverse_trace(path, 1e-4);
  CHECK(coarse.tip_curve_bound > 0.0);
  CHECK(fine.tip_curve_bound < coarse.tip_curve_bound);
}

TEST_CASE("single step trace with default tip offset") {
  DrivingPath path = constant_driver(1.0, 0.01, 0, 0.5);
  Trace tr = reverse_trace(path);
  REQUIRE(tr.gamma.size() == 1);
  CHECK(std::abs(tr.gamma[0] - Complex(0.5, 0.0)) < 1e-12);
}

TEST_CASE("forward map composition") {
  // empty chain
  DrivingPath path0 = constant_driver(1.0, 0.1, 0, 0.0);
  SlitMapChain chain0 = SlitMapChain::from_driving(path0);
  Complex z(1.0, 2.0);
  CHECK(std::abs(chain0.forward(z) - z) < 1e-15);

  // one zero-shift step equals the vertical slit map
  double a = 0.6, dt = 0.05;
  DrivingPath path1 = constant_driver(a, dt, 1, 0.0);
  SlitMapChain chain1 = SlitMapChain::from_driving(path1);
  HullSpec slit = HullSpec::vertical_slit(0.0, std::sqrt(2.0 * a * dt));
  for (Complex zz : {Complex(1.0, 0.5), Complex(-0.4, 1.2)}) {
    CHECK(std::abs(chain1.forward(zz) - slit_map(slit, zz)) < 1e-10);
  }
}

TEST_CASE("forward map agrees with evolve_point on a Brownian chain") {
  RngStream rng(2024);
  double a = 0.75, dt = 1e-4;
  DrivingPath path = brownian_driver(a, dt, 100, rng);
  SlitMapChain chain = SlitMapChain::from_driving(path);
  for (Complex z : {Complex(0.0, 2.0), Complex(1.5, 1.0), Complex(-2.0, 0.7)}) {
    Trajectory traj = evolve_point(path, z);
    REQUIRE(!traj.swallowed);
    Complex g_ode = Complex(traj.samples.back().x + path.u.back(),
                            traj.samples.back().y);
    Complex g_chain = chain.forward(z);
    CHECK(std::abs(g_chain - g_ode) < 1e-6);
  }
}

TEST_CASE("vertical chain kind matches piecewise-constant evolve") {
  RngStream rng(77);
  double a = 1.0, dt = 1e-3;
  std::vector<double> u(101, 0.0);
  double sd = std::sqrt(dt);
  for (std::size_t k = 1; k < u.size(); ++k) u[k] = u[k - 1] - sd * rng.normal();
  DrivingPath path(a, dt, u, DrivingPath::Interp::piecewise_const);
  SlitMapChain chain = SlitMapChain::from_driving(path);
  CHECK(chain.kind == SlitMapChain::StepKind::vertical);
  Complex z(0.3, 1.4);
  Trajectory traj = evolve_point(path, z);
  Complex g_ode = Complex(traj.samples.back().x + path.u.back(), traj.samples.back().y);
  CHECK(std::abs(chain.forward(z) - g_ode) < 1e-6);
}

TEST_CASE("chain hcap additivity and large-z expansion") {
  RngStream rng(8);
  double a = 0.5, dt = 2e-3;
  DrivingPath path = brownian_driver(a, dt, 250, rng);
  SlitMapChain chain = SlitMapChain::from_driving(path);
  double T = path.total_time();
  CHECK(chain.total_hcap() == doctest::Approx(a * T).epsilon(1e-12));
  // g(iR) ~ iR + aT/(iR)
  for (double R : {50.0, 100.0}) {
    Complex g = chain.forward(Complex(0.0, R));
    Complex err = g - Complex(0.0, R) - a * T / Complex(0.0, R);
    CHECK(std::abs(err) < 10.0 * a * T / (R * R) + 1e-9);
  }
}

TEST_CASE("scaling covariance of the discretized engine") {
  // scaling (du, sqrt(dt)) by r scales the trace by r
  RngStream rng(13);
  double a = 0.75, dt = 4e-4;
  DrivingPath path = brownian_driver(a, dt, 200, rng);
  double r = 2.5;
  std::vector<double> su(path.u.size());
  for (std::size_t i = 0; i < su.size(); ++i) su[i] = r * path.u[i];
  DrivingPath scaled(a, dt * r * r, su);
  double eps = 1e-9;
  Trace t1 = reverse_trace(path, eps);
  Trace t2 = reverse_trace(scaled, r * eps);
  REQUIRE(t1.gamma.size() == t2.gamma.size());
  for (std::size_t k = 0; k < t1.gamma.size(); k += 20) {
    CHECK(std::abs(t2.gamma[k] - r * t1.gamma[k]) < 1e-9 * (1.0 + std::abs(r * t1.gamma[k])));
  }
}

TEST_CASE("reverse/forward duality for smooth driving") {
  // the chain-composed tip f_T(u_T + i eps) must invert the ODE forward map:
  // Newton on g_T(z) = u_T + i eps using evolve_point for value and derivative
  double a = 1.0, dt = 1e-3;
  std::size_t M = 200;
  std::vector<double> u(M + 1);
  for (std::size_t k = 0; k <= M; ++k) {
    double t = static_cast<double>(k) * dt;
    u[k] = 0.8 * std::sin(3.0 * t) + 0.2 * t;
  }
  DrivingPath path(a, dt, u);
  double eps = 1e-3;
  Trace tr = reverse_trace(path, eps);
  Complex target(u.back(), eps);
  Complex z = tr.gamma.back();  // chain answer as the starting guess
  for (int it = 0; it < 30; ++it) {
    Trajectory traj = evolve_point(path, z, -1.0, 1e-9);
    REQUIRE(!traj.swallowed);
    const auto& s = traj.samples.back();
    Complex g(s.x + u.back(), s.y);
    Complex resid = g - target;
    if (std::abs(resid) < 1e-12) break;
    z -= resid / s.gprime;
  }
  // z is now the ODE-route preimage; it must agree with the chain tip
  CHECK(std::abs(z - tr.gamma.back()) < 1e-6);
}

TEST_CASE("refinement consistency of the trace on a fixed Brownian path") {
  // halving dt moves trace points by a bounded amount on a coarse sample path
  RngStream rng(1001);
  double a = 0.75;
  std::size_t coarse_steps = 128;
  double dt = 1.0 / static_cast<double>(coarse_steps);
  DrivingPath coarse = brownian_driver(a, dt, coarse_steps, rng);
  // refine by sqrt interpolation midpoints (deterministic refinement of the
  // declared interpolation)
  std::vector<double> fine_u;
  for (std::size_t k = 0; k < coarse_steps; ++k) {
    fine_u.push_back(coarse.u[k]);
    fine_u.push_back(coarse.u[k] + (coarse.u[k + 1] - coarse.u[k]) * std::sqrt(0.5));
  }
  fine_u.push_back(coarse.u.back());
  DrivingPath fine(a, dt / 2.0, fine_u);
  Trace t1 = reverse_trace(coarse, 1e-6);
  Trace t2 = reverse_trace(fine, 1e-6);
  double max_dev = 0.0;
  for (std::size_t k = 1; k <= coarse_steps; ++k) {
    max_dev = std::max(max_dev, std::abs(t1.gamma[k] - t2.gamma[2 * k]));
  }
  CHECK(max_dev < 2.0 * std::sqrt(dt));
}

TEST_CASE("sqrt driving generates a straight ray") {
  // driving c*sqrt(t) grows a straight slit at angle pi*(1 - c/sqrt(8a+c^2))/2;
  // the composed trace must land on that ray
  double a = 1.0, c = 2.0, dt = 1e-4;
  std::size_t M = 2000;
  std::vector<double> u(M + 1);
  for (std::size_t k = 0; k <= M; ++k)
    u[k] = c * std::sqrt(static_cast<double>(k) * dt);
  DrivingPath path(a, dt, u);
  Trace tr = reverse_trace(path, 1e-8);
  double angle = std::numbers::pi * (1.0 - c / std::sqrt(8.0 * a + c * c)) / 2.0;
  for (std::size_t k = 100; k <= M; k += 200) {
    double arg = std::arg(tr.gamma[k]);
    CHECK(arg == doctest::Approx(angle).epsilon(0.01));
  }
  // hcap additivity pins |gamma(T)| through the slit-length relation as well:
  // the ray tip satisfies hcap(gamma(0,T]) = a T exactly in the composition
  SlitMapChain chain = SlitMapChain::from_driving(path);
  CHECK(chain.total_hcap() == doctest::Approx(a * dt * M).epsilon(1e-12));
}

TEST_CASE("radial disk flow") {
  // center is fixed, log g'(0) = rate * t exactly by construction
  DrivingPath angles = constant_driver(1.0, 1e-3, 500, 0.0);
  auto samples = radial_disk_flow(angles, Complex(0.0, 0.0), -1.0, 1.0);
  CHECK(samples.back().log_gp0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(samples.back().gz) < 1e-12);

  // zero angle driving keeps the real segment real and pushes it toward -1...
  auto s2 = radial_disk_flow(angles, Complex(-0.5, 0.0));
  for (const auto& s : s2) {
    if (!s.alive) break;
    CHECK(std::fabs(s.gz.imag()) < 1e-10);
  }

  // g'(0) cross-check against a finite difference of small interior points
  auto s3 = radial_disk_flow(angles, Complex(1e-4, 0.0));
  double gp0 = s3.back().gz.real() / 1e-4;
  CHECK(gp0 == doctest::Approx(std::exp(s3.back().log_gp0)).epsilon(1e-3));
}

TEST_CASE("radial angular variable satisfies the cot drift equation") {
  // with driving frozen at angle u0 and rate 2a, the angle of the boundary
  // image psi = h(theta) - u0 obeys dpsi/dt = a cot(psi)
  double a = 0.75;
  double rate = 2.0 * a;
  double u0 = 0.2;
  DrivingPath angles = constant_driver(1.0, 1e-5, 200, u0);
  double theta0 = 1.1;
  Complex z = 0.999999 * std::exp(Complex(0.0, 2.0 * theta0));
  auto samples = radial_disk_flow(angles, z, -1.0, rate);
  auto angle_of = [](Complex w) { return 0.5 * std::arg(w); };
  for (std::size_t i = 50; i + 50 < samples.size(); i += 50) {
    double t_lo = samples[i - 1].t, t_hi = samples[i + 1].t;
    double psi = angle_of(samples[i].gz) - u0;
    double dpsi = (angle_of(samples[i + 1].gz) - angle_of(samples[i - 1].gz)) / (t_hi - t_lo);
    CHECK(dpsi == doctest::Approx(a / std::tan(psi)).epsilon(2e-3));
  }
}

TEST_CASE("trace and chain csv export") {
  DrivingPath path = constant_driver(1.0, 0.1, 2, 0.0);
  Trace tr = reverse_trace(path, 1e-3);
  std::ostringstream os;
  write_trace_csv(os, tr);
  CHECK(os.str().substr(0, 8) == "t,re,im\n");
  std::ostringstream os2;
  write_chain_csv(os2, SlitMapChain::from_driving(path));
  CHECK(os2.str().substr(0, 6) == "dt,du\n");
}
