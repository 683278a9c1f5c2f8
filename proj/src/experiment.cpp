#include "secrsma/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/version.hpp>
#include "json.hpp"

namespace secrsma {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// Runs work(i) for i < n on `jobs` threads and hands results to emit() in
// index order, as soon as the prefix is complete.
template <class R, class Work, class Emit>
void ordered_parallel(std::size_t n, unsigned jobs, Work work, Emit emit) {
  std::vector<std::optional<R>> done(n);
  std::size_t flushed = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      std::optional<R> r;
      try {
        r.emplace(work(i));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
      std::lock_guard lock(mu);
      done[i] = std::move(r);
      while (flushed < n && done[flushed] && !error) {
        try {
          emit(flushed, std::move(*done[flushed]));
        } catch (...) {
          error = std::current_exception();
          next = n;
        }
        done[flushed].reset();
        ++flushed;
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vec(const RVec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v(i));
  return s;
}

std::string clean(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ' ';
  return s;
}

struct Cell {
  CsitMode csit;
  double snr_db;
  std::optional<double> theta;
  int trial;
  std::uint64_t seed;
};

std::vector<Cell> cells_of(const ExperimentConfig& cfg) {
  std::vector<std::optional<double>> thetas;
  if (cfg.kind == ScenarioKind::Specific)
    for (double t : cfg.thetas) thetas.emplace_back(t);
  else
    thetas.emplace_back();
  std::vector<Cell> out;
  for (CsitMode m : cfg.csit)
    for (double snr : cfg.snr_db)
      for (const auto& th : thetas)
        for (std::size_t t = 0; t < cfg.trials; ++t)
          out.push_back({m, snr, th, static_cast<int>(t), derive_seed(cfg.seed, t)});
  return out;
}

// The estimate is drawn unit-variance here; sampling scales it by
// sqrt(1 - sigma_e^2) so that H = H_hat + H_err keeps unit entry variance.
Instance instance_of(const ExperimentConfig& cfg, const Cell& c) {
  Instance inst;
  inst.csit = c.csit;
  inst.power = db_to_linear(c.snr_db);
  inst.channels = cfg.kind == ScenarioKind::Specific ? specific_channels(cfg.gamma, *c.theta, cfg.antennas)
                                                     : random_channels(cfg.users, cfg.antennas, c.seed);
  if (c.csit == CsitMode::Imperfect)
    inst.error_variance = cfg.csit_quality * std::pow(inst.power, -cfg.csit_scaling);
  return inst;
}

SolverOptions options_of(const ExperimentConfig& cfg, const Cell& c) {
  auto o = cfg.solver_options();
  o.ao.seed = derive_seed(c.seed, 1);
  return o;
}

ResultRow row_of(const ExperimentConfig& cfg, const Cell& c, double rth, double power, const PrecoderSolution& s) {
  ResultRow r;
  r.scenario = cfg.name;
  r.trial = c.trial;
  r.seed = c.seed;
  r.scheme = s.scheme;
  r.csit = c.csit;
  r.snr_db = c.snr_db;
  r.rth = rth;
  r.theta = c.theta;
  if (cfg.kind == ScenarioKind::Specific) r.gamma = cfg.gamma;
  r.wsr = s.wsr;
  const bool solved = !std::isnan(s.wsr);
  const auto K = static_cast<Eigen::Index>(cfg.users);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (solved) {
    r.common_rates = s.common_rates;
    r.private_rates = s.rates.priv;
    r.secrecy_rates = s.rates.secrecy;
    r.power_common = s.power_common() / power;
    r.power_private.resize(K);
    for (Eigen::Index k = 0; k < K; ++k)
      r.power_private(k) = s.precoders.priv(static_cast<std::size_t>(k)).squaredNorm() / power;
  } else {
    r.common_rates = r.private_rates = r.secrecy_rates = r.power_private = RVec::Constant(K, nan);
    r.power_common = nan;
  }
  r.iterations = s.iterations;
  r.converged = s.converged;
  r.feasible = solved && s.secrecy_ok;
  r.status = clean(s.status);
  if (solved && !s.secrecy_ok) {
    // no start met the thresholds; the rate columns describe the least-violating point
    r.wsr = nan;
    r.status = "infeasible";
  }
  return r;
}

ResultRow mean_of(const std::vector<const ResultRow*>& rows) {
  ResultRow m = *rows.front();
  m.trial = -1;
  const auto K = rows.front()->private_rates.size();
  m.wsr = m.power_common = m.iterations = 0.0;
  m.common_rates = m.private_rates = m.secrecy_rates = m.power_private = RVec::Zero(K);
  m.converged = m.feasible = true;
  std::size_t n = 0;  // averages run over secrecy-feasible trials only
  for (const auto* r : rows) {
    m.converged = m.converged && r->converged;
    m.feasible = m.feasible && r->feasible;
    if (!r->feasible) continue;
    ++n;
    m.wsr += r->wsr;
    m.common_rates += r->common_rates;
    m.private_rates += r->private_rates;
    m.secrecy_rates += r->secrecy_rates;
    m.power_common += r->power_common;
    m.power_private += r->power_private;
    m.iterations += r->iterations;
  }
  const double w = n ? 1.0 / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
  m.wsr *= w;
  m.common_rates *= w;
  m.private_rates *= w;
  m.secrecy_rates *= w;
  m.power_common *= w;
  m.power_private *= w;
  m.iterations *= w;
  m.status = "mean " + std::to_string(n) + "/" + std::to_string(rows.size());
  return m;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write " + p.string());
  return f;
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

json rates_json(const RVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const char* version() { return kVersion; }

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols = {
      "scenario",      "trial",         "seed",          "scheme",       "csit",          "snr_db",
      "rth",           "theta",         "gamma",         "wsr",          "common_rates",  "private_rates",
      "secrecy_rates", "power_common",  "power_private", "iterations",   "converged",     "feasible",
      "status"};
  return cols;
}

std::string csv_line(const ResultRow& r) {
  std::string s;
  auto put = [&](const std::string& f) { s += (s.empty() ? "" : ",") + f; };
  put(r.scenario);
  put(r.trial < 0 ? "mean" : std::to_string(r.trial));
  put(std::to_string(r.seed));
  put(to_string(r.scheme));
  put(to_string(r.csit));
  put(num(r.snr_db));
  put(num(r.rth));
  put(r.theta ? num(*r.theta) : "");
  put(r.gamma ? num(*r.gamma) : "");
  put(num(r.wsr));
  put(vec(r.common_rates));
  put(vec(r.private_rates));
  put(vec(r.secrecy_rates));
  put(num(r.power_common));
  put(vec(r.power_private));
  put(num(r.iterations));
  put(r.converged ? "1" : "0");
  put(r.feasible ? "1" : "0");
  put(r.status);
  return s;
}

SweepStats run_sweep(const ExperimentConfig& cfg, unsigned jobs, const std::function<void(const ResultRow&)>& sink,
                     const std::function<void(const std::string&)>& timing_sink) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = cells_of(cfg);
  const RVec weights = cfg.user_weights();
  SweepStats stats;
  stats.cells = cells.size();

  struct Done {
    std::vector<ResultRow> rows;
    double ms = 0.0;
  };
  std::vector<ResultRow> group;  // rows of the current (csit, snr, theta) group, for the mean
  const bool means = cfg.kind == ScenarioKind::Random && cfg.trials > 1 && cfg.mean_rows;

  auto emit_row = [&](const ResultRow& r) {
    ++stats.rows;
    if (r.trial >= 0 && !r.feasible) ++stats.failed;
    sink(r);
  };

  ordered_parallel<Done>(
      cells.size(), jobs,
      [&](std::size_t i) {
        const auto& c = cells[i];
        const auto start = std::chrono::steady_clock::now();
        const auto inst = instance_of(cfg, c);
        Done d;
        const auto path = solve_threshold_path(inst, weights, cfg.thresholds, options_of(cfg, c), cfg.continuation);
        for (std::size_t t = 0; t < cfg.thresholds.size(); ++t)
          for (Scheme s : cfg.schemes)
            d.rows.push_back(row_of(cfg, c, cfg.thresholds[t], inst.power,
                                    s == Scheme::RS ? path[t].rs : path[t].mulp));
        d.ms = 1e3 * seconds_since(start);
        return d;
      },
      [&](std::size_t i, Done&& d) {
        const auto& c = cells[i];
        for (const auto& r : d.rows) emit_row(r);
        if (timing_sink) {
          std::string line = cfg.name + "," + std::to_string(c.trial) + "," + to_string(c.csit) + "," +
                             num(c.snr_db) + "," + (c.theta ? num(*c.theta) : "") + "," + num(d.ms);
          timing_sink(line);
        }
        if (!means) return;
        group.insert(group.end(), d.rows.begin(), d.rows.end());
        if (static_cast<std::size_t>(c.trial) + 1 < cfg.trials) return;
        const std::size_t per_trial = cfg.thresholds.size() * cfg.schemes.size();
        for (std::size_t j = 0; j < per_trial; ++j) {
          std::vector<const ResultRow*> same;
          for (std::size_t t = 0; t < cfg.trials; ++t) same.push_back(&group[t * per_trial + j]);
          auto m = mean_of(same);
          m.seed = cfg.seed;
          emit_row(m);
        }
        group.clear();
      });
  stats.seconds = seconds_since(t0);
  return stats;
}

std::string manifest_json(const ExperimentConfig& cfg, const std::string& command, unsigned jobs) {
  json m;
  m["tool"] = "secrsma";
  m["command"] = command;
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.seed;
  m["jobs"] = jobs;
  m["scenario"] = cfg.name;
  m["versions"] = {{"secrsma", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"boost", BOOST_LIB_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"cxx_standard", __cplusplus}};
  m["conventions"] = {
      {"noise_variance", 1.0},
      {"rate_units", "bits/s/Hz (log2)"},
      {"transmit_power", "P_t = 10^(snr_db/10)"},
      {"imperfect_csit",
       "sigma_e^2 = csit_quality * P_t^(-csit_scaling); samples H = sqrt(1 - sigma_e^2) H' + sigma_e E with H' the "
       "unit-variance estimate draw (random scenario) or the specific channel, E ~ CN(0, I)"},
      {"trial_seed", "derive_seed(seed, trial); error samples use derive_seed(trial_seed, 1)"},
      {"mean_rows", "trial = mean averages the secrecy-feasible trials (status mean n/N); feasible/converged require every trial"},
      {"wall_time", "per cell in the timings file, kept out of the results table so it stays reproducible"}};
  m["outputs"] = {{"results", cfg.results_file},
                  {"timings", cfg.timings_file},
                  {"traces", cfg.traces_file},
                  {"columns", result_columns()}};
  m["config"] = canonical_form(cfg);
  return m.dump(2) + "\n";
}

SweepStats write_sweep(const ExperimentConfig& cfg, unsigned jobs) {
  make_dir(cfg.out_dir);
  auto results = open_out(cfg.out_dir / cfg.results_file);
  auto timings = open_out(cfg.out_dir / cfg.timings_file);
  std::string header;
  for (const auto& c : result_columns()) header += (header.empty() ? "" : ",") + c;
  results << header << "\n";
  timings << "scenario,trial,csit,snr_db,theta,wall_ms\n";
  const auto stats = run_sweep(
      cfg, jobs, [&](const ResultRow& r) { results << csv_line(r) << "\n" << std::flush; },
      [&](const std::string& line) { timings << line << "\n"; });
  if (!results || !timings) fail(ErrorCode::Io, "write failed under " + cfg.out_dir.string());
  auto manifest = open_out(cfg.out_dir / cfg.manifest_file);
  manifest << manifest_json(cfg, "sweep", jobs);
  return stats;
}

SweepStats write_traces(const ExperimentConfig& cfg, unsigned jobs) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  make_dir(cfg.out_dir);
  auto out = open_out(cfg.out_dir / cfg.traces_file);

  struct Task {
    Cell cell;
    double rth;
    Scheme scheme;
    double kappa;
  };
  std::vector<Task> tasks;
  for (const auto& c : cells_of(cfg)) {
    if (c.trial != 0) continue;
    for (double rth : cfg.thresholds)
      for (Scheme s : cfg.schemes)
        for (double k : cfg.trace_kappas) tasks.push_back({c, rth, s, k});
  }
  const RVec weights = cfg.user_weights();
  SweepStats stats;
  stats.cells = tasks.size();

  ordered_parallel<std::vector<std::string>>(
      tasks.size(), jobs,
      [&](std::size_t i) {
        const auto& t = tasks[i];
        const auto inst = instance_of(cfg, t.cell);
        auto o = options_of(cfg, t.cell);
        o.sca.kappa = o.ao.kappa = t.kappa;
        o.sca.fallback_kappas.clear();  // the trace must belong to this kappa
        o.ao.fallback_kappas.clear();
        SecrecySpec spec;
        spec.weights = weights;
        spec.thresholds = RVec::Constant(weights.size(), t.rth);
        const auto sol = solve_scheme(inst, t.scheme, spec, o);

        json base;
        base["scenario"] = cfg.name;
        base["csit"] = to_string(t.cell.csit);
        base["scheme"] = to_string(t.scheme);
        base["snr_db"] = t.cell.snr_db;
        base["theta"] = t.cell.theta ? json(*t.cell.theta) : json(nullptr);
        base["rth"] = t.rth;
        base["kappa"] = t.kappa;
        base["seed"] = t.cell.seed;
        base["status"] = sol.status;
        std::vector<std::string> lines;
        for (const auto& r : sol.trace) {
          json j = base;
          j["phase"] = r.phase;
          j["outer"] = r.outer;
          j["inner"] = r.inner;
          j["objective"] = r.objective;
          j["wsr"] = r.wsr;
          if (r.priv.size()) {
            j["common_rates"] = rates_json(r.common);
            j["private_rates"] = rates_json(r.priv);
            j["secrecy_rates"] = rates_json(r.secrecy);
          }
          lines.push_back(j.dump());
        }
        if (sol.trace.empty()) {
          json j = base;
          j["phase"] = "none";
          j["message"] = sol.origin;
          lines.push_back(j.dump());
        }
        return lines;
      },
      [&](std::size_t, std::vector<std::string>&& lines) {
        for (const auto& l : lines) out << l << "\n";
        stats.rows += lines.size();
      });
  if (!out) fail(ErrorCode::Io, "write failed under " + cfg.out_dir.string());
  auto manifest = open_out(cfg.out_dir / ("trace_" + cfg.manifest_file));
  manifest << manifest_json(cfg, "trace", jobs);
  stats.seconds = seconds_since(t0);
  return stats;
}

}  // namespace secrsma
