#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slelab/brownian.hpp"
#include "slelab/conformal.hpp"
#include "slelab/drivers.hpp"
#include "slelab/experiment.hpp"
#include "slelab/lattice.hpp"
#include "slelab/loewner.hpp"
#include "slelab/params.hpp"
#include "slelab/parallel.hpp"

using namespace slelab;
using nlohmann::json;

namespace {

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

std::string out_path(const std::string& path) {
  if (path.empty() || path == "-") return path;
  if (const char* dir = std::getenv("SLELAB_OUTDIR")) {
    std::filesystem::path p(path);
    if (p.is_relative()) return (std::filesystem::path(dir) / p).string();
  }
  return path;
}

int write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream os(out_path(path));
  if (!os) {
    std::cerr << "cannot open output file: " << path << "\n";
    return static_cast<int>(ExitCode::numerical_error);
  }
  os << text;
  return 0;
}

json mc_json(const McResult& r, std::uint64_t seed, json params) {
  json j;
  j["estimate"] = r.estimate;
  j["stderr"] = r.std_error;
  j["replicas"] = r.replicas;
  j["seed"] = seed;
  j["params"] = std::move(params);
  for (const auto& [k, v] : r.extras) j[k] = v;
  return j;
}

DrivingPath load_driving(const std::string& spec, double kappa, double dt,
                         std::size_t steps, std::uint64_t seed) {
  if (spec == "brownian") {
    RngStream rng(seed);
    return sample_chordal_driver(kappa, dt, steps, rng);
  }
  std::ifstream is(spec);
  if (!is) throw std::invalid_argument("cannot open driving file: " + spec);
  std::string header;
  std::getline(is, header);
  if (header != "dt,du")
    throw std::invalid_argument("driving file must start with 'dt,du'");
  std::vector<double> u = {0.0};
  double cell_dt = -1.0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("bad driving row: " + line);
    double d = std::stod(line.substr(0, comma));
    double du = std::stod(line.substr(comma + 1));
    if (cell_dt < 0.0) cell_dt = d;
    if (std::fabs(d - cell_dt) > 1e-12 * (1.0 + cell_dt))
      throw std::invalid_argument("driving grid must be uniform in dt");
    u.push_back(u.back() + du);
  }
  if (cell_dt <= 0.0) throw std::invalid_argument("empty driving file");
  return DrivingPath(2.0 / kappa, cell_dt, std::move(u));
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);
  CLI::App app{"numerical laboratory for Schramm-Loewner evolution"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers,
                 "worker threads (default: SLELAB_WORKERS or hardware)");

  try {
    // ---- params ------------------------------------------------------
    auto* sc_params = app.add_subcommand("params", "derived exponent table row");
    double kappa = 6.0;
    sc_params->add_option("--kappa", kappa, "variance parameter")->required();
    sc_params->callback([&] {
      SleParams p = derive_params(kappa);
      json j = {{"kappa", p.kappa},   {"a", p.a},
                {"b", p.b},           {"btilde", p.btilde},
                {"bhat", p.bhat},     {"c_central", p.c_central},
                {"d_dim", p.d_dim}};
      std::cout << j.dump(2) << "\n";
    });

    // ---- conformal ----------------------------------------------------
    auto* sc_conf = app.add_subcommand("conformal", "closed-form conformal maps");
    auto* sc_hcap = sc_conf->add_subcommand("hcap", "half-plane capacity of a hull");
    std::string hull_spec = "slit:0,1";
    sc_hcap->add_option("--hull", hull_spec,
                        "slit:x0,h | halfdisk:x0,r | tilt:x0,l,theta")
        ->required();
    sc_hcap->callback([&] {
      std::printf("%.17g\n", HullSpec::parse(hull_spec).hcap());
    });
    auto* sc_map = sc_conf->add_subcommand("map", "evaluate the hull map g_K(z)");
    double map_re = 0.0, map_im = 1.0;
    sc_map->add_option("--hull", hull_spec)->required();
    sc_map->add_option("--re", map_re);
    sc_map->add_option("--im", map_im);
    sc_map->callback([&] {
      Complex w = slit_map(HullSpec::parse(hull_spec), Complex(map_re, map_im));
      std::printf("%.17g %.17g\n", w.real(), w.imag());
    });

    // ---- loewner ------------------------------------------------------
    auto* sc_loe = app.add_subcommand("loewner", "loewner engine");
    auto* sc_trace = sc_loe->add_subcommand("trace", "extract a trace");
    std::string driving = "brownian", trace_out = "-";
    double tr_kappa = 8.0 / 3.0, tr_dt = 1e-3, tip_eps = -1.0;
    std::size_t tr_steps = 1000;
    std::uint64_t tr_seed = 1;
    sc_trace->add_option("--driving", driving, "brownian or a dt,du csv file");
    sc_trace->add_option("--kappa", tr_kappa);
    sc_trace->add_option("--steps", tr_steps);
    sc_trace->add_option("--dt", tr_dt);
    sc_trace->add_option("--tip-eps", tip_eps);
    sc_trace->add_option("--seed", tr_seed);
    sc_trace->add_option("--out", trace_out);
    sc_trace->callback([&] {
      DrivingPath path = load_driving(driving, tr_kappa, tr_dt, tr_steps, tr_seed);
      Trace trace = reverse_trace(path, tip_eps);
      std::ostringstream os;
      write_trace_csv(os, trace);
      std::exit(write_text(trace_out, os.str()));
    });
    auto* sc_chain = sc_loe->add_subcommand("chain", "export driving increments");
    sc_chain->add_option("--kappa", tr_kappa);
    sc_chain->add_option("--steps", tr_steps);
    sc_chain->add_option("--dt", tr_dt);
    sc_chain->add_option("--seed", tr_seed);
    sc_chain->add_option("--out", trace_out);
    sc_chain->callback([&] {
      RngStream rng(tr_seed);
      DrivingPath path = sample_chordal_driver(tr_kappa, tr_dt, tr_steps, rng);
      std::ostringstream os;
      write_chain_csv(os, SlitMapChain::from_driving(path));
      std::exit(write_text(trace_out, os.str()));
    });

    // ---- sle ----------------------------------------------------------
    auto* sc_sle = app.add_subcommand("sle", "stochastic drivers and estimators");
    auto* sc_sample = sc_sle->add_subcommand("sample", "sample a driving path");
    std::string kind = "chordal", sample_out = "-";
    double s_kappa = 8.0 / 3.0, s_dt = 1e-3, s_rho = 0.0, s_x = 1.0;
    double s_zre = 0.0, s_zim = 1.0;
    std::string s_hull = "halfdisk:2,0.5";
    std::size_t s_steps = 1000;
    std::uint64_t s_seed = 1;
    sc_sample->add_option("--kind", kind,
                          "chordal|kapparho|radial|two-sided|subdomain");
    sc_sample->add_option("--kappa", s_kappa);
    sc_sample->add_option("--rho", s_rho);
    sc_sample->add_option("--x", s_x, "force point (kapparho)");
    sc_sample->add_option("--zre", s_zre);
    sc_sample->add_option("--zim", s_zim);
    sc_sample->add_option("--hull", s_hull, "subdomain hull spec");
    sc_sample->add_option("--dt", s_dt);
    sc_sample->add_option("--steps", s_steps);
    sc_sample->add_option("--seed", s_seed);
    sc_sample->add_option("--out", sample_out);
    sc_sample->callback([&] {
      RngStream rng(s_seed);
      DrivingPath path;
      if (kind == "chordal") {
        path = sample_chordal_driver(s_kappa, s_dt, s_steps, rng);
      } else if (kind == "kapparho") {
        path = sample_kappa_rho_driver(s_kappa, s_rho, s_x, s_dt, s_steps, rng)
                   .driving;
      } else if (kind == "radial") {
        path = sample_radial_driver(s_kappa, Complex(s_zre, s_zim), s_dt,
                                    s_steps, rng)
                   .driving;
      } else if (kind == "two-sided") {
        path = sample_two_sided_driver(s_kappa, Complex(s_zre, s_zim), s_dt,
                                       s_steps, rng)
                   .driving;
      } else if (kind == "subdomain") {
        path = subdomain_driver(s_kappa, HullSpec::parse(s_hull), s_dt, s_steps,
                                rng)
                   .driving;
      } else {
        throw std::invalid_argument("unknown driver kind: " + kind);
      }
      std::ostringstream os;
      write_chain_csv(os, SlitMapChain::from_driving(path));
      std::exit(write_text(sample_out, os.str()));
    });

    auto* sc_cardy = sc_sle->add_subcommand("cardy-mc", "swallowing race");
    double c_kappa = 6.0, c_y = 1.0, c_dt = 1e-4;
    std::uint64_t c_reps = 100000, c_seed = 1;
    std::string c_out = "-";
    sc_cardy->add_option("--kappa", c_kappa);
    sc_cardy->add_option("--y", c_y)->required();
    sc_cardy->add_option("--replicas", c_reps);
    sc_cardy->add_option("--dt", c_dt);
    sc_cardy->add_option("--seed", c_seed);
    sc_cardy->add_option("--out", c_out);
    sc_cardy->callback([&] {
      McResult r = cardy_hitting_mc(c_kappa, c_y, c_reps, c_dt, c_seed, workers);
      json j = mc_json(r, c_seed,
                       {{"kappa", c_kappa}, {"y", c_y}, {"dt", c_dt}});
      j["closed_form"] = cardy_phi(c_y, 2.0 / c_kappa);
      std::exit(write_text(c_out, j.dump(2) + "\n"));
    });

    auto* sc_fit = sc_sle->add_subcommand("exponent-fit", "moment decay fits");
    std::string fit_kind = "boundary", fit_out = "-", fit_grid = "10,31.6,100,316,1000";
    double f_a = 0.75, f_lambda = 1.0, f_lambda2 = 0.0, f_x = 1.0, f_y = -1.0;
    double f_theta = 1.5707963267948966;
    std::uint64_t f_reps = 100000, f_seed = 1;
    sc_fit->add_option("--kind", fit_kind, "boundary|radial|two-sided");
    sc_fit->add_option("--a", f_a);
    sc_fit->add_option("--lambda", f_lambda);
    sc_fit->add_option("--lambda2", f_lambda2);
    sc_fit->add_option("--x", f_x);
    sc_fit->add_option("--y", f_y);
    sc_fit->add_option("--theta", f_theta);
    sc_fit->add_option("--tgrid", fit_grid);
    sc_fit->add_option("--replicas", f_reps);
    sc_fit->add_option("--seed", f_seed);
    sc_fit->add_option("--out", fit_out);
    sc_fit->callback([&] {
      std::vector<double> grid;
      std::stringstream ss(fit_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
      MomentCurve mc;
      if (fit_kind == "boundary")
        mc = boundary_moment(f_lambda, f_a, f_x, grid, f_reps, f_seed, workers);
      else if (fit_kind == "radial")
        mc = radial_moment(f_lambda, f_a, f_theta, grid, f_reps, f_seed, workers);
      else if (fit_kind == "two-sided")
        mc = two_sided_moment(f_lambda, f_lambda2, f_a, f_x, f_y, grid, f_reps,
                              f_seed, workers);
      else
        throw std::invalid_argument("unknown fit kind: " + fit_kind);
      json j;
      j["slope"] = mc.slope;
      j["t"] = mc.t;
      j["mean"] = mc.mean;
      j["stderr"] = mc.std_error;
      j["median_of_means"] = mc.mom;
      j["martingale"] = mc.martingale;
      j["martingale_stderr"] = mc.martingale_se;
      j["absorbed"] = mc.absorbed;
      j["replicas"] = f_reps;
      j["seed"] = f_seed;
      if (fit_kind == "radial") j["beta"] = -mc.slope / (2.0 * f_a);
      std::exit(write_text(fit_out, j.dump(2) + "\n"));
    });

    auto* sc_tail = sc_sle->add_subcommand("green-tail", "conformal radius tail");
    double g_kappa = 8.0 / 3.0, g_zre = 0.0, g_zim = 1.0, g_horizon = 2000.0;
    std::string g_deltas = "0.2,0.1,0.05,0.025", g_out = "-";
    std::uint64_t g_reps = 20000, g_seed = 1;
    sc_tail->add_option("--kappa", g_kappa);
    sc_tail->add_option("--zre", g_zre);
    sc_tail->add_option("--zim", g_zim);
    sc_tail->add_option("--deltas", g_deltas);
    sc_tail->add_option("--horizon", g_horizon);
    sc_tail->add_option("--replicas", g_reps);
    sc_tail->add_option("--seed", g_seed);
    sc_tail->add_option("--out", g_out);
    sc_tail->callback([&] {
      std::vector<double> ds;
      std::stringstream ss(g_deltas);
      std::string tok;
      while (std::getline(ss, tok, ',')) ds.push_back(std::stod(tok));
      TailResult t = green_tail_mc(g_kappa, Complex(g_zre, g_zim), ds, g_reps,
                                   g_seed, workers, g_horizon);
      json j;
      j["delta"] = t.delta;
      j["p"] = t.prob;
      j["stderr"] = t.std_error;
      j["fitted_exponent"] = t.fitted_exponent;
      j["censored"] = t.censored;
      j["replicas"] = g_reps;
      j["seed"] = g_seed;
      std::exit(write_text(g_out, j.dump(2) + "\n"));
    });

    // ---- bm -----------------------------------------------------------
    auto* sc_bm = app.add_subcommand("bm", "brownian measures");
    auto* sc_bhcap = sc_bm->add_subcommand("hcap", "capacity by exit heights");
    std::string b_hull = "slit:0,0.5", b_out = "-";
    std::uint64_t b_reps = 20000, b_seed = 1;
    sc_bhcap->add_option("--hull", b_hull)->required();
    sc_bhcap->add_option("--replicas", b_reps);
    sc_bhcap->add_option("--seed", b_seed);
    sc_bhcap->add_option("--out", b_out);
    sc_bhcap->callback([&] {
      HullSpec hull = HullSpec::parse(b_hull);
      McResult r = hcap_mc(hull, b_reps, b_seed, workers);
      json j = mc_json(r, b_seed, {{"hull", b_hull}});
      j["closed_form"] = hull.hcap();
      std::exit(write_text(b_out, j.dump(2) + "\n"));
    });
    auto* sc_bub = sc_bm->add_subcommand("bubble", "escaping bubble mass");
    sc_bub->add_option("--hull", b_hull)->required();
    sc_bub->add_option("--replicas", b_reps);
    sc_bub->add_option("--seed", b_seed);
    sc_bub->add_option("--out", b_out);
    sc_bub->callback([&] {
      HullSpec hull = HullSpec::parse(b_hull);
      McResult r = bubble_gamma_integral(hull, b_reps, b_seed, workers);
      json j = mc_json(r, b_seed, {{"hull", b_hull}});
      if (hull.distance(Complex(0.0, 0.0)) > 0.0)
        j["schwarzian"] = bubble_schwarzian(hull);
      std::exit(write_text(b_out, j.dump(2) + "\n"));
    });
    auto* sc_beu = sc_bm->add_subcommand("beurling", "segment avoidance");
    std::string beu_grid = "0.25,0.125,0.0625,0.03125,0.015625,0.0078125";
    sc_beu->add_option("--grid", beu_grid);
    sc_beu->add_option("--replicas", b_reps);
    sc_beu->add_option("--seed", b_seed);
    sc_beu->add_option("--out", b_out);
    sc_beu->callback([&] {
      std::vector<double> grid;
      std::stringstream ss(beu_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
      BeurlingResult r = beurling_mc(grid, b_reps, b_seed, workers);
      json j;
      j["eps"] = r.eps;
      j["p"] = r.prob;
      j["stderr"] = r.std_error;
      j["fitted_exponent"] = r.fitted_exponent;
      j["replicas"] = b_reps;
      j["seed"] = b_seed;
      std::exit(write_text(b_out, j.dump(2) + "\n"));
    });
    auto* sc_loops = sc_bm->add_subcommand("loops", "rooted loop sampler");
    std::string box = "-1,0,1,2";
    double smin = 1e-3, smax = 100.0;
    std::size_t loop_count = 1000, bridge_steps = 128;
    sc_loops->add_option("--box", box, "x0,y0,x1,y1");
    sc_loops->add_option("--count", loop_count);
    sc_loops->add_option("--smin", smin);
    sc_loops->add_option("--smax", smax);
    sc_loops->add_option("--bridge-steps", bridge_steps);
    sc_loops->add_option("--seed", b_seed);
    sc_loops->add_option("--out", b_out);
    sc_loops->callback([&] {
      std::vector<double> bb;
      std::stringstream ss(box);
      std::string tok;
      while (std::getline(ss, tok, ',')) bb.push_back(std::stod(tok));
      if (bb.size() != 4) throw std::invalid_argument("box needs x0,y0,x1,y1");
      RngStream rng(b_seed);
      LoopSample ls = sample_rooted_loops(Complex(bb[0], bb[1]),
                                          Complex(bb[2], bb[3]), loop_count,
                                          smin, smax, bridge_steps, rng);
      json j;
      j["count"] = ls.loops.size();
      j["window_mass"] = ls.window_mass;
      j["weight_each"] = ls.window_mass / static_cast<double>(ls.loops.size());
      j["s_min"] = smin;
      j["s_max"] = smax;
      j["seed"] = b_seed;
      j["truncation_note"] =
          "durations outside [s_min, s_max] carry mass area/(2 pi s_max) "
          "(upper tail) and are excluded by construction";
      std::exit(write_text(b_out, j.dump(2) + "\n"));
    });

    // ---- lattice ------------------------------------------------------
    auto* sc_lat = app.add_subcommand("lattice", "discrete models");
    auto* sc_saw = sc_lat->add_subcommand("saw-count", "exact SAW enumeration");
    int saw_n = 10;
    sc_saw->add_option("--n", saw_n)->required();
    sc_saw->callback([&] {
      auto [lo, hi] = connective_bounds(saw_n);
      json j = {{"n", saw_n},
                {"count", saw_count(saw_n)},
                {"connective_lower", lo},
                {"connective_upper", hi}};
      std::cout << j.dump(2) << "\n";
    });
    auto* sc_lerw = sc_lat->add_subcommand("lerw", "loop-erased walk sample");
    int lerw_size = 64;
    std::uint64_t lerw_seed = 1;
    std::string lerw_out = "-";
    sc_lerw->add_option("--size", lerw_size);
    sc_lerw->add_option("--seed", lerw_seed);
    sc_lerw->add_option("--out", lerw_out);
    sc_lerw->callback([&] {
      GridRegion region{lerw_size + 1, lerw_size + 1};
      RngStream rng(lerw_seed);
      WalkPath w = sample_lerw(region, {lerw_size / 2, lerw_size / 2},
                               [](LatticePoint) { return true; }, rng);
      std::ostringstream os;
      os << "x,y\n";
      for (const auto& p : w.pts) os << p.x << "," << p.y << "\n";
      std::exit(write_text(lerw_out, os.str()));
    });
    auto* sc_perc = sc_lat->add_subcommand("perc-cross", "triangle crossing");
    double perc_x = 0.5;
    int perc_size = 256;
    std::uint64_t perc_reps = 20000, perc_seed = 1;
    std::string perc_out = "-";
    sc_perc->add_option("--x", perc_x)->required();
    sc_perc->add_option("--size", perc_size);
    sc_perc->add_option("--replicas", perc_reps);
    sc_perc->add_option("--seed", perc_seed);
    sc_perc->add_option("--out", perc_out);
    sc_perc->callback([&] {
      McResult r = triangle_crossing_mc(perc_x, perc_size, perc_reps, perc_seed,
                                        workers, false);
      json j = mc_json(r, perc_seed, {{"x", perc_x}, {"size", perc_size}});
      std::exit(write_text(perc_out, j.dump(2) + "\n"));
    });

    // ---- accept / plot / run -------------------------------------------
    auto* sc_accept = app.add_subcommand("accept", "acceptance suite");
    std::string suite = "all";
    sc_accept->add_option("--suite", suite, "all or c01..c15");
    sc_accept->callback([&] {
      ExitCode code = run_acceptance(suite, std::cout, workers);
      std::exit(static_cast<int>(code));
    });

    auto* sc_plot = app.add_subcommand("plot", "emit plot csv from a record");
    std::string plot_kind = "tail", plot_in, plot_out = "-";
    sc_plot->add_option("--kind", plot_kind, "trace|tail|fit");
    sc_plot->add_option("--in", plot_in)->required();
    sc_plot->add_option("--out", plot_out);
    sc_plot->callback([&] {
      std::ifstream is(plot_in);
      if (!is) throw std::invalid_argument("cannot open " + plot_in);
      std::stringstream buf;
      buf << is.rdbuf();
      std::ostringstream os;
      if (plot_kind == "trace") {
        std::string text = buf.str();
        if (text.rfind("t,re,im", 0) != 0)
          throw std::invalid_argument("not a trace csv");
        os << text;
      } else if (plot_kind == "tail") {
        json j = json::parse(buf.str());
        std::vector<double> d = j.at("delta"), p = j.at("p"),
                            se = j.at("stderr");
        emit_tail_csv(os, d, p, se, j.at("fitted_exponent"));
      } else if (plot_kind == "fit") {
        json j = json::parse(buf.str());
        std::vector<double> t = j.at("t"), m = j.at("mean");
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (m[i] > 0.0) {
            lx.push_back(std::log(t[i]));
            ly.push_back(std::log(m[i]));
          }
        }
        if (lx.size() < 2) {
          os << "x,y,fit\n";
        } else {
          emit_fit_csv(os, lx, ly, fit_line(lx, ly));
        }
      } else {
        throw std::invalid_argument("unknown plot kind: " + plot_kind);
      }
      std::exit(write_text(plot_out, os.str()));
    });

    auto* sc_run = app.add_subcommand("run", "run a declarative experiment");
    std::string cfg_path;
    std::string run_out;
    sc_run->add_option("--config", cfg_path)->required();
    sc_run->add_option("--out", run_out, "override the config's out path");
    sc_run->callback([&] {
      std::ifstream is(cfg_path);
      if (!is) throw std::invalid_argument("cannot open config: " + cfg_path);
      std::stringstream buf;
      buf << is.rdbuf();
      ExperimentConfig cfg = ExperimentConfig::parse(buf.str());
      if (workers) cfg.workers = workers;
      auto [rec, code] = run_experiment(cfg);
      if (g_interrupted.load()) rec.notes.push_back("interrupted: partial results");
      std::string path = !run_out.empty() ? run_out : cfg.out;
      int wrc = write_text(path, rec.to_json() + "\n");
      if (wrc != 0) std::exit(wrc);
      std::exit(static_cast<int>(code));
    });

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return static_cast<int>(ExitCode::config_error);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::numerical_error);
  }
  return 0;
}
