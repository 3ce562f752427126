#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <sstream>

#include "slelab/brownian.hpp"
#include "slelab/conformal.hpp"
#include "slelab/drivers.hpp"
#include "slelab/experiment.hpp"
#include "slelab/lattice.hpp"
#include "slelab/loewner.hpp"
#include "slelab/params.hpp"

namespace py = pybind11;
using namespace slelab;

namespace {

py::dict mc_dict(const McResult& r) {
  py::dict d;
  d["estimate"] = r.estimate;
  d["stderr"] = r.std_error;
  d["replicas"] = r.replicas;
  for (const auto& [k, v] : r.extras) d[py::str(k)] = v;
  return d;
}

py::dict curve_dict(const MomentCurve& mc) {
  py::dict d;
  d["t"] = mc.t;
  d["mean"] = mc.mean;
  d["stderr"] = mc.std_error;
  d["median_of_means"] = mc.mom;
  d["martingale"] = mc.martingale;
  d["martingale_stderr"] = mc.martingale_se;
  d["slope"] = mc.slope;
  d["absorbed"] = mc.absorbed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_slelab, m) {
  m.doc() = "Loewner evolution laboratory: closed-form exponents, the chordal "
            "engine, and the Monte Carlo estimators";

  // closed-form layer
  m.def("derive_params", [](double kappa) {
    SleParams p = derive_params(kappa);
    py::dict d;
    d["kappa"] = p.kappa;
    d["a"] = p.a;
    d["b"] = p.b;
    d["btilde"] = p.btilde;
    d["bhat"] = p.bhat;
    d["c_central"] = p.c_central;
    d["d_dim"] = p.d_dim;
    return d;
  }, py::arg("kappa"));
  m.def("lambda0", &lambda0, py::arg("a"));
  m.def("q_exponent",
        [](double lam, double a, bool plus) {
          return q_exponent(lam, a, plus ? QBranch::plus : QBranch::minus);
        },
        py::arg("lam"), py::arg("a"), py::arg("plus") = true);
  m.def("q_inverse", &q_inverse, py::arg("q"), py::arg("a"));
  m.def("chordal_crossing_exponent",
        [](std::vector<double> lams, double a) {
          return chordal_crossing_exponent(lams, a);
        },
        py::arg("lams"), py::arg("a"));
  m.def("crossing_exponent_n", &crossing_exponent_n, py::arg("n"), py::arg("a"));
  m.def("radial_exponent",
        [](double b_arg, double lam, double a) {
          return radial_exponent(b_arg, lam, a);
        },
        py::arg("b_arg"), py::arg("lam"), py::arg("a"));
  m.def("radial_beta", &radial_beta, py::arg("lam"), py::arg("a"));
  m.def("cardy_phi", &cardy_phi, py::arg("y"), py::arg("a"));
  m.def("green_function", &green_function, py::arg("z"), py::arg("a"));
  m.def("restriction_probability", &restriction_probability, py::arg("phi_prime"));

  // conformal maps
  m.def("hull_hcap",
        [](const std::string& spec) { return HullSpec::parse(spec).hcap(); },
        py::arg("hull"));
  m.def("slit_map",
        [](const std::string& spec, std::complex<double> z) {
          return slit_map(HullSpec::parse(spec), z);
        },
        py::arg("hull"), py::arg("z"));
  m.def("slit_map_inverse",
        [](const std::string& spec, std::complex<double> w) {
          return slit_map_inverse(HullSpec::parse(spec), w);
        },
        py::arg("hull"), py::arg("w"));

  // loewner engine
  m.def("chordal_trace",
        [](double kappa, double dt, std::size_t steps, std::uint64_t seed,
           double tip_eps) {
          RngStream rng(seed);
          DrivingPath path = sample_chordal_driver(kappa, dt, steps, rng);
          Trace tr = reverse_trace(path, tip_eps);
          return py::make_tuple(tr.t, tr.gamma);
        },
        py::arg("kappa"), py::arg("dt"), py::arg("steps"), py::arg("seed"),
        py::arg("tip_eps") = -1.0);
  m.def("trace_from_driving",
        [](double a, double dt, std::vector<double> u, double tip_eps) {
          DrivingPath path(a, dt, std::move(u));
          Trace tr = reverse_trace(path, tip_eps);
          return py::make_tuple(tr.t, tr.gamma);
        },
        py::arg("a"), py::arg("dt"), py::arg("u"), py::arg("tip_eps") = -1.0);
  m.def("evolve_point",
        [](double a, double dt, std::vector<double> u, std::complex<double> z) {
          DrivingPath path(a, dt, std::move(u));
          Trajectory tr = evolve_point(path, z);
          py::dict d;
          std::vector<double> t, x, y, ups;
          for (const auto& s : tr.samples) {
            t.push_back(s.t);
            x.push_back(s.x);
            y.push_back(s.y);
            ups.push_back(s.upsilon);
          }
          d["t"] = t;
          d["x"] = x;
          d["y"] = y;
          d["upsilon"] = ups;
          d["swallowed"] = tr.swallowed;
          d["swallow_time"] = tr.swallow_time;
          return d;
        },
        py::arg("a"), py::arg("dt"), py::arg("u"), py::arg("z"));
  m.def("sample_chordal_driver",
        [](double kappa, double dt, std::size_t steps, std::uint64_t seed) {
          RngStream rng(seed);
          return sample_chordal_driver(kappa, dt, steps, rng).u;
        },
        py::arg("kappa"), py::arg("dt"), py::arg("steps"), py::arg("seed"));

  // monte carlo estimators
  m.def("cardy_hitting_mc",
        [](double kappa, double y, std::uint64_t replicas, double dt,
           std::uint64_t seed, int workers) {
          return mc_dict(cardy_hitting_mc(kappa, y, replicas, dt, seed, workers));
        },
        py::arg("kappa"), py::arg("y"), py::arg("replicas"),
        py::arg("dt") = 1e-4, py::arg("seed") = 1, py::arg("workers") = 0);
  m.def("bessel_hit_probability",
        [](double a, double x, double horizon, std::uint64_t replicas,
           std::uint64_t seed, int workers) {
          return mc_dict(
              bessel_hit_probability(a, x, horizon, replicas, seed, workers));
        },
        py::arg("a"), py::arg("x"), py::arg("horizon"), py::arg("replicas"),
        py::arg("seed") = 1, py::arg("workers") = 0);
  m.def("boundary_moment",
        [](double lam, double a, double x, std::vector<double> tgrid,
           std::uint64_t replicas, std::uint64_t seed, int workers) {
          return curve_dict(
              boundary_moment(lam, a, x, tgrid, replicas, seed, workers));
        },
        py::arg("lam"), py::arg("a"), py::arg("x"), py::arg("tgrid"),
        py::arg("replicas"), py::arg("seed") = 1, py::arg("workers") = 0);
  m.def("radial_moment",
        [](double lam, double a, double theta, std::vector<double> tgrid,
           std::uint64_t replicas, std::uint64_t seed, int workers) {
          return curve_dict(
              radial_moment(lam, a, theta, tgrid, replicas, seed, workers));
        },
        py::arg("lam"), py::arg("a"), py::arg("theta"), py::arg("tgrid"),
        py::arg("replicas"), py::arg("seed") = 1, py::arg("workers") = 0);
  m.def("green_tail_mc",
        [](double kappa, std::complex<double> z, std::vector<double> deltas,
           std::uint64_t replicas, std::uint64_t seed, int workers,
           double horizon) {
          TailResult t =
              green_tail_mc(kappa, z, deltas, replicas, seed, workers, horizon);
          py::dict d;
          d["delta"] = t.delta;
          d["p"] = t.prob;
          d["stderr"] = t.std_error;
          d["fitted_exponent"] = t.fitted_exponent;
          d["censored"] = t.censored;
          return d;
        },
        py::arg("kappa"), py::arg("z"), py::arg("deltas"), py::arg("replicas"),
        py::arg("seed") = 1, py::arg("workers") = 0, py::arg("horizon") = 2000.0);
  m.def("restriction_avoid_mc",
        [](double kappa, const std::string& hull, std::uint64_t replicas,
           double dt, std::uint64_t seed, int workers) {
          return mc_dict(restriction_avoid_mc(kappa, HullSpec::parse(hull),
                                              replicas, dt, seed, workers));
        },
        py::arg("kappa"), py::arg("hull"), py::arg("replicas"),
        py::arg("dt") = 1e-3, py::arg("seed") = 1, py::arg("workers") = 0);

  // brownian measures
  m.def("hcap_mc",
        [](const std::string& hull, std::uint64_t replicas, std::uint64_t seed,
           int workers) {
          return mc_dict(hcap_mc(HullSpec::parse(hull), replicas, seed, workers));
        },
        py::arg("hull"), py::arg("replicas"), py::arg("seed") = 1,
        py::arg("workers") = 0);
  m.def("bubble_gamma_integral",
        [](const std::string& hull, std::uint64_t replicas, std::uint64_t seed,
           int workers) {
          return mc_dict(bubble_gamma_integral(HullSpec::parse(hull), replicas,
                                               seed, workers));
        },
        py::arg("hull"), py::arg("replicas"), py::arg("seed") = 1,
        py::arg("workers") = 0);
  m.def("bubble_schwarzian",
        [](const std::string& hull) {
          return bubble_schwarzian(HullSpec::parse(hull));
        },
        py::arg("hull"));
  m.def("beurling_mc",
        [](std::vector<double> grid, std::uint64_t replicas, std::uint64_t seed,
           int workers) {
          BeurlingResult r = beurling_mc(grid, replicas, seed, workers);
          py::dict d;
          d["eps"] = r.eps;
          d["p"] = r.prob;
          d["stderr"] = r.std_error;
          d["fitted_exponent"] = r.fitted_exponent;
          return d;
        },
        py::arg("grid"), py::arg("replicas"), py::arg("seed") = 1,
        py::arg("workers") = 0);

  // discrete models
  m.def("saw_count", &saw_count, py::arg("n"));
  m.def("connective_bounds", &connective_bounds, py::arg("n"));
  m.def("loop_erase",
        [](std::vector<std::pair<int, int>> pts) {
          WalkPath w;
          for (auto [x, y] : pts) w.pts.push_back({x, y});
          WalkPath e = loop_erase(w);
          std::vector<std::pair<int, int>> out;
          for (const auto& p : e.pts) out.emplace_back(p.x, p.y);
          return out;
        },
        py::arg("points"));
  m.def("triangle_crossing_mc",
        [](double x, int n, std::uint64_t replicas, std::uint64_t seed,
           int workers, bool round_up) {
          return mc_dict(triangle_crossing_mc(x, n, replicas, seed, workers,
                                              round_up));
        },
        py::arg("x"), py::arg("n"), py::arg("replicas"), py::arg("seed") = 1,
        py::arg("workers") = 0, py::arg("round_up") = false);

  // acceptance hooks
  m.def("acceptance_names", &acceptance_names);
  m.def("run_acceptance_criterion",
        [](const std::string& name, int workers) {
          CriterionResult r = run_acceptance_criterion(name, workers);
          py::dict d;
          d["id"] = r.id;
          d["title"] = r.title;
          d["pass"] = r.pass;
          d["details"] = r.details;
          d["wall_seconds"] = r.wall_seconds;
          return d;
        },
        py::arg("name"), py::arg("workers") = 0);
}
