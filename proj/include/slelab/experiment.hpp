#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slelab/stats.hpp"

namespace slelab {

inline constexpr const char* kEngineVersion = "slelab 0.1.0";

enum class ExitCode : int {
  ok = 0,
  criterion_failed = 1,
  config_error = 2,
  numerical_error = 3,
};

// Flat key = value experiment description.  Known top-level keys are
// experiment, op, replicas, seed, workers, out; operation parameters live
// under param.<name> and tolerances under tolerance.<name>.  Anything else
// is rejected.
struct ExperimentConfig {
  std::string experiment;
  std::string op;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out;
  std::vector<std::pair<std::string, std::string>> params;      // ordered
  std::vector<std::pair<std::string, std::string>> tolerances;  // ordered

  static ExperimentConfig parse(const std::string& text);
  std::string serialize() const;

  std::optional<std::string> param(const std::string& key) const;
  double param_num(const std::string& key, double fallback) const;
  double require_num(const std::string& key) const;
};

struct ResultRecord {
  ExperimentConfig config;
  std::map<std::string, double> estimates;
  std::map<std::string, double> std_errors;
  std::map<std::string, double> extras;
  std::vector<std::string> notes;
  bool pass = true;
  bool tolerance_checked = false;
  double wall_seconds = 0.0;
  std::string engine_version = kEngineVersion;

  std::string to_json() const;
  static ResultRecord from_json(const std::string& text);
};

// deterministic dispatch to the module operations; never throws, failures are
// encoded in the exit code (and the record's notes)
std::pair<ResultRecord, ExitCode> run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// acceptance suite
// ---------------------------------------------------------------------------

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;
  double wall_seconds = 0.0;
};

std::vector<std::string> acceptance_names();

// run one named criterion at its pinned desk-scale parameters
CriterionResult run_acceptance_criterion(const std::string& name, int workers = 0);

// run all (or one) and stream one PASS/FAIL line per criterion; returns
// ok when everything passed, criterion_failed otherwise
ExitCode run_acceptance(const std::string& which, std::ostream& os,
                        int workers = 0);

// ---------------------------------------------------------------------------
// plot data
// ---------------------------------------------------------------------------

// tail records: delta,p,stderr rows plus a fitted-exponent footer comment;
// fit records: x,y,fit rows
void emit_tail_csv(std::ostream& os, const std::vector<double>& delta,
                   const std::vector<double>& p, const std::vector<double>& se,
                   double fitted_exponent);
void emit_fit_csv(std::ostream& os, const std::vector<double>& x,
                  const std::vector<double>& y, const LineFit& fit);

}  // namespace slelab
