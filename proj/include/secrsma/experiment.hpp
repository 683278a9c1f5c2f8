#pragma once

// Declarative sweeps over the specific-channel and random-channel scenarios,
// convergence traces, and the validation suite. Config files are INI with
// sections [scenario], [algorithm], [sweep] and [output].

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secrsma/mulp.hpp"

namespace secrsma {

enum class ScenarioKind { Specific, Random };
enum class SurrogateChoice { Auto, AsPrinted, ConservativeCone };

struct ExperimentConfig {
  // [scenario]
  std::string name = "experiment";
  ScenarioKind kind = ScenarioKind::Specific;
  std::size_t users = 2;
  std::size_t antennas = 2;
  double gamma = 1.0;              // specific channel strength of user 2
  std::vector<double> thetas;      // specific channel angles, radians
  std::vector<double> weights;     // empty: uniform
  std::size_t trials = 1;
  std::uint64_t seed = 1;

  // [algorithm]
  std::vector<Scheme> schemes = {Scheme::RS, Scheme::MULP};
  std::vector<CsitMode> csit = {CsitMode::Perfect};
  double csit_quality = 1.0;  // gamma_e
  double csit_scaling = 0.6;  // delta
  std::size_t samples = 1000;
  double tolerance = 1e-4;        // SCA / outer alternating loop
  double inner_tolerance = 1e-5;  // inner alternating loop
  int max_iterations = 200;
  int max_inner = 50;
  double kappa = 0.5;
  std::vector<double> trace_kappas = {0.1, 0.5, 0.8};
  SurrogateChoice surrogate = SurrogateChoice::Auto;
  bool continuation = true;
  double feasibility_tolerance = 1e-3;
  double solve_tolerance = 1e-8;

  // [sweep]
  std::vector<double> snr_db = {20.0};
  std::vector<double> thresholds = {0.0};

  // [output]
  std::filesystem::path out_dir = "out";
  std::string results_file = "results.csv";
  std::string traces_file = "traces.jsonl";
  std::string manifest_file = "manifest.json";
  std::string timings_file = "timings.csv";
  bool mean_rows = true;

  RVec user_weights() const;
  SolverOptions solver_options() const;
  void validate() const;
};

/// Throws Error(ConfigError) on unknown keys, malformed values or failed validation.
ExperimentConfig parse_config(std::string_view ini_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Accepts "0.7", "pi", "2pi/9", "2*pi/9", "-pi/4".
double parse_angle(std::string_view text);

/// Every effective setting as sorted key=value lines; the config hash is
/// taken over this so overrides are covered.
std::string canonical_form(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const ExperimentConfig& cfg);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> tolerance;
};
void apply(ExperimentConfig& cfg, const Overrides& o);

struct ResultRow {
  std::string scenario;
  int trial = 0;  // -1 marks the across-trial mean
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::RS;
  CsitMode csit = CsitMode::Perfect;
  double snr_db = 0.0;
  double rth = 0.0;
  std::optional<double> theta, gamma;
  double wsr = 0.0;
  RVec common_rates, private_rates, secrecy_rates;
  double power_common = 0.0;  // fraction of P_t
  RVec power_private;         // fractions of P_t
  double iterations = 0.0;
  bool converged = false;
  bool feasible = false;
  std::string status;
};

/// Fixed column order of results.csv.
const std::vector<std::string>& result_columns();
std::string csv_line(const ResultRow& row);

/// Per-trial rows in deterministic order: csit, snr, theta, trial, threshold,
/// scheme. Mean rows follow each group of trials in the random scenario.
/// `sink` receives rows in that order as soon as they are final.
struct SweepStats {
  std::size_t cells = 0, rows = 0, failed = 0;
  double seconds = 0.0;
};
SweepStats run_sweep(const ExperimentConfig& cfg, unsigned jobs, const std::function<void(const ResultRow&)>& sink,
                     const std::function<void(const std::string&)>& timing_sink = {});

/// Writes results.csv, timings.csv and manifest.json under cfg.out_dir.
SweepStats write_sweep(const ExperimentConfig& cfg, unsigned jobs);

/// One JSON object per iteration record for every (csit, snr, theta, rth,
/// scheme, kappa); the first trial only in the random scenario.
SweepStats write_traces(const ExperimentConfig& cfg, unsigned jobs);

struct ValidationResult {
  bool passed = false;
  std::string report;
};
/// Rate/WMMSE identity, surrogate probes, and SCA against the grid oracle on
/// real 2x2 channels.
ValidationResult run_validation(std::uint64_t seed, unsigned jobs, double tolerance = 1e-3);

std::string manifest_json(const ExperimentConfig& cfg, const std::string& command, unsigned jobs);

const char* version();

}  // namespace secrsma
