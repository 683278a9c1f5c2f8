// Command-line front end; talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "secrsma/secrsma.h"

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  unsigned jobs = 1;
  std::optional<double> tolerance;
};

int report(secrsma_status s) {
  std::fprintf(stderr, "error (%s): %s\n", secrsma_status_string(s), secrsma_last_error());
  return 2;
}

// Loads the config and applies the global overrides.
secrsma_status prepare(const std::string& path, const Globals& g, secrsma_config** cfg) {
  secrsma_status s = secrsma_config_load(path.c_str(), cfg);
  if (s != SECRSMA_OK) return s;
  if (g.seed && (s = secrsma_config_set_seed(*cfg, *g.seed)) != SECRSMA_OK) return s;
  if (g.out_dir && (s = secrsma_config_set_out_dir(*cfg, g.out_dir->c_str())) != SECRSMA_OK) return s;
  if (g.tolerance && (s = secrsma_config_set_tolerance(*cfg, *g.tolerance)) != SECRSMA_OK) return s;
  return SECRSMA_OK;
}

int run_config(const std::string& path, const Globals& g, bool trace) {
  secrsma_config* cfg = nullptr;
  secrsma_status s = prepare(path, g, &cfg);
  if (s != SECRSMA_OK) {
    secrsma_config_free(cfg);
    return report(s);
  }
  secrsma_run_summary sum{};
  s = trace ? secrsma_run_trace(cfg, g.jobs, &sum) : secrsma_run_sweep(cfg, g.jobs, &sum);
  if (s != SECRSMA_OK) {
    secrsma_config_free(cfg);
    return report(s);
  }
  char hash[32];
  secrsma_config_hash(cfg, hash, sizeof hash);
  std::size_t need = 0;
  secrsma_config_out_dir(cfg, nullptr, 0, &need);
  std::string dir(need, '\0');
  secrsma_config_out_dir(cfg, dir.data(), dir.size(), &need);
  dir.resize(need - 1);
  if (trace)
    std::printf("trace: %zu runs, %zu records -> %s (%s, %.1f s)\n", sum.cells, sum.rows, dir.c_str(), hash,
                sum.seconds);
  else
    std::printf("sweep: %zu cells, %zu rows, %zu without a feasible solution -> %s (%s, %.1f s)\n", sum.cells,
                sum.rows, sum.failed, dir.c_str(), hash, sum.seconds);
  secrsma_config_free(cfg);
  return 0;
}

int run_validate(const Globals& g) {
  int passed = 0;
  char* text = nullptr;
  const secrsma_status s = secrsma_validate(g.seed.value_or(1), g.jobs, g.tolerance.value_or(1e-3), &passed, &text);
  if (s != SECRSMA_OK) return report(s);
  std::fputs(text, stdout);
  if (g.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*g.out_dir, ec);
    std::ofstream f(std::filesystem::path(*g.out_dir) / "validation.txt");
    if (!f) {
      secrsma_string_free(text);
      std::fprintf(stderr, "error: cannot write %s/validation.txt\n", g.out_dir->c_str());
      return 2;
    }
    f << text;
  }
  secrsma_string_free(text);
  std::printf("validation %s\n", passed ? "passed" : "FAILED");
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-constrained rate-splitting precoder experiments"};
  app.set_version_flag("--version", std::string(secrsma_version()));
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  std::string out_dir;
  double tol = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides [scenario] seed)");
  auto* dir_opt = app.add_option("--out-dir", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  auto* tol_opt = app.add_option("--tolerance-override", tol,
                                 "Stopping tolerance for sweeps/traces; oracle margin for validate")
                      ->check(CLI::PositiveNumber);

  std::string config;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write the results table");
  sweep->add_option("config", config, "INI config file")->required()->check(CLI::ExistingFile);
  sweep->fallthrough();
  auto* trace = app.add_subcommand("trace", "Write per-iteration convergence traces");
  trace->add_option("config", config, "INI config file")->required()->check(CLI::ExistingFile);
  trace->fallthrough();
  auto* validate = app.add_subcommand("validate", "Run the oracle and identity checks");
  validate->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;
  if (*dir_opt) g.out_dir = out_dir;
  if (*tol_opt) g.tolerance = tol;

  if (sweep->parsed()) return run_config(config, g, false);
  if (trace->parsed()) return run_config(config, g, true);
  return run_validate(g);
}
