#include "secrsma/secrsma.h"

#include <cstring>
#include <new>
#include <string>

#include "secrsma/experiment.hpp"

struct secrsma_config {
  secrsma::ExperimentConfig cfg;
};

struct secrsma_solution {
  secrsma::PrecoderSolution sol;
};

namespace {

thread_local std::string last_error;

secrsma_status set_error(secrsma_status s, const char* what) {
  last_error = what ? what : "";
  return s;
}

secrsma_status map(secrsma::ErrorCode c) {
  using secrsma::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return SECRSMA_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return SECRSMA_DIMENSION;
    case ErrorCode::InfeasibleThresholds: return SECRSMA_INFEASIBLE;
    case ErrorCode::SolverFailure: return SECRSMA_SOLVER;
    case ErrorCode::Config: return SECRSMA_CONFIG;
    case ErrorCode::Io: return SECRSMA_IO;
  }
  return SECRSMA_INTERNAL;
}

template <class F>
secrsma_status guarded(F&& f) {
  try {
    f();
    return SECRSMA_OK;
  } catch (const secrsma::Error& e) {
    return set_error(map(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SECRSMA_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SECRSMA_INTERNAL, e.what());
  } catch (...) {
    return set_error(SECRSMA_INTERNAL, "unknown error");
  }
}

#define SECRSMA_NONNULL(p)                                                        \
  do {                                                                            \
    if (!(p)) return set_error(SECRSMA_INVALID_ARGUMENT, #p " must not be NULL"); \
  } while (0)

void summarize(const secrsma::SweepStats& s, secrsma_run_summary* out) {
  if (!out) return;
  out->cells = s.cells;
  out->rows = s.rows;
  out->failed = s.failed;
  out->seconds = s.seconds;
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* secrsma_version(void) { return secrsma::version(); }

const char* secrsma_status_string(secrsma_status s) {
  switch (s) {
    case SECRSMA_OK: return "ok";
    case SECRSMA_INVALID_ARGUMENT: return "invalid argument";
    case SECRSMA_DIMENSION: return "dimension mismatch";
    case SECRSMA_INFEASIBLE: return "infeasible thresholds";
    case SECRSMA_SOLVER: return "solver failure";
    case SECRSMA_IO: return "i/o error";
    case SECRSMA_CONFIG: return "configuration error";
    case SECRSMA_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* secrsma_last_error(void) { return last_error.c_str(); }

secrsma_status secrsma_config_load(const char* path, secrsma_config** out) {
  SECRSMA_NONNULL(path);
  SECRSMA_NONNULL(out);
  *out = nullptr;
  return guarded([&] { *out = new secrsma_config{secrsma::load_config(path)}; });
}

secrsma_status secrsma_config_parse(const char* text, secrsma_config** out) {
  SECRSMA_NONNULL(text);
  SECRSMA_NONNULL(out);
  *out = nullptr;
  return guarded([&] { *out = new secrsma_config{secrsma::parse_config(text)}; });
}

void secrsma_config_free(secrsma_config* cfg) { delete cfg; }

secrsma_status secrsma_config_set_seed(secrsma_config* cfg, uint64_t seed) {
  SECRSMA_NONNULL(cfg);
  cfg->cfg.seed = seed;
  return SECRSMA_OK;
}

secrsma_status secrsma_config_set_out_dir(secrsma_config* cfg, const char* dir) {
  SECRSMA_NONNULL(cfg);
  SECRSMA_NONNULL(dir);
  if (!*dir) return set_error(SECRSMA_INVALID_ARGUMENT, "output directory must be non-empty");
  return guarded([&] { cfg->cfg.out_dir = dir; });
}

secrsma_status secrsma_config_set_tolerance(secrsma_config* cfg, double tolerance) {
  SECRSMA_NONNULL(cfg);
  return guarded([&] {
    secrsma::Overrides o;
    o.tolerance = tolerance;
    secrsma::apply(cfg->cfg, o);
  });
}

secrsma_status secrsma_config_hash(const secrsma_config* cfg, char* buf, size_t len) {
  SECRSMA_NONNULL(cfg);
  SECRSMA_NONNULL(buf);
  return guarded([&] {
    const auto h = secrsma::config_hash(cfg->cfg);
    if (len < h.size() + 1) secrsma::fail(secrsma::ErrorCode::InvalidArgument, "hash buffer too small");
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

secrsma_status secrsma_config_out_dir(const secrsma_config* cfg, char* buf, size_t len, size_t* needed) {
  SECRSMA_NONNULL(cfg);
  const std::string d = cfg->cfg.out_dir.string();
  if (needed) *needed = d.size() + 1;
  if (!buf) return SECRSMA_OK;
  if (len < d.size() + 1) return set_error(SECRSMA_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, d.c_str(), d.size() + 1);
  return SECRSMA_OK;
}

secrsma_status secrsma_run_sweep(const secrsma_config* cfg, unsigned jobs, secrsma_run_summary* summary) {
  SECRSMA_NONNULL(cfg);
  return guarded([&] { summarize(secrsma::write_sweep(cfg->cfg, jobs), summary); });
}

secrsma_status secrsma_run_trace(const secrsma_config* cfg, unsigned jobs, secrsma_run_summary* summary) {
  SECRSMA_NONNULL(cfg);
  return guarded([&] { summarize(secrsma::write_traces(cfg->cfg, jobs), summary); });
}

secrsma_status secrsma_validate(uint64_t seed, unsigned jobs, double tolerance, int* passed, char** report) {
  SECRSMA_NONNULL(passed);
  if (report) *report = nullptr;
  if (!(tolerance >= 0.0)) return set_error(SECRSMA_INVALID_ARGUMENT, "tolerance must be non-negative");
  return guarded([&] {
    const auto r = secrsma::run_validation(seed, jobs, tolerance);
    *passed = r.passed ? 1 : 0;
    if (report) *report = dup(r.report);
  });
}

void secrsma_string_free(char* s) { delete[] s; }

void secrsma_problem_init(secrsma_problem* p) {
  if (!p) return;
  *p = secrsma_problem{};
  p->snr_db = 20.0;
  p->scheme = SECRSMA_RS;
  p->csit = SECRSMA_PERFECT;
  p->samples = 1000;
  p->seed = 1;
  p->kappa = 0.5;
  p->tolerance = 1e-4;
}

secrsma_status secrsma_solve(const secrsma_problem* p, secrsma_solution** out) {
  SECRSMA_NONNULL(p);
  SECRSMA_NONNULL(out);
  *out = nullptr;
  SECRSMA_NONNULL(p->channel_real);
  if (p->users == 0 || p->antennas == 0) return set_error(SECRSMA_DIMENSION, "users and antennas must be positive");
  return guarded([&] {
    using namespace secrsma;
    const auto K = static_cast<Eigen::Index>(p->users), N = static_cast<Eigen::Index>(p->antennas);
    CMat H(N, K);
    for (Eigen::Index k = 0; k < K; ++k)
      for (Eigen::Index n = 0; n < N; ++n) {
        const auto i = static_cast<std::size_t>(k * N + n);
        H(n, k) = cplx(p->channel_real[i], p->channel_imag ? p->channel_imag[i] : 0.0);
      }
    SecrecySpec spec = SecrecySpec::uniform(p->users, 0.0);
    if (p->weights) spec.weights = Eigen::Map<const RVec>(p->weights, K);
    if (p->thresholds) spec.thresholds = Eigen::Map<const RVec>(p->thresholds, K);
    const Scheme scheme = p->scheme == SECRSMA_MULP ? Scheme::MULP : Scheme::RS;
    require(p->scheme == SECRSMA_RS || p->scheme == SECRSMA_MULP, "unknown scheme");
    require(p->csit == SECRSMA_PERFECT || p->csit == SECRSMA_IMPERFECT, "unknown CSIT mode");
    const double power = db_to_linear(p->snr_db);

    PrecoderSolution sol;
    if (p->csit == SECRSMA_PERFECT) {
      ScaOptions o;
      o.scheme = scheme;
      o.kappa = p->kappa;
      o.tolerance = p->tolerance;
      o.wiretap = p->users <= 2 ? WiretapSurrogate::AsPrinted : WiretapSurrogate::ConservativeCone;
      sol = solve_wsr(ChannelSet(H), spec, power, o);
    } else {
      AoOptions o;
      o.scheme = scheme;
      o.kappa = p->kappa;
      o.outer_tolerance = p->tolerance;
      o.samples = p->samples;
      o.seed = p->seed;
      sol = solve_wesr(CsitModel::with_variance(ChannelSet(H), p->error_variance), spec, power, o);
    }
    *out = new secrsma_solution{std::move(sol)};
  });
}

void secrsma_solution_free(secrsma_solution* s) { delete s; }

secrsma_status secrsma_solution_wsr(const secrsma_solution* s, double* wsr) {
  SECRSMA_NONNULL(s);
  SECRSMA_NONNULL(wsr);
  *wsr = s->sol.wsr;
  return SECRSMA_OK;
}

secrsma_status secrsma_solution_rates(const secrsma_solution* s, double* common, double* priv, double* secrecy) {
  SECRSMA_NONNULL(s);
  const auto& r = s->sol;
  for (Eigen::Index k = 0; k < r.rates.priv.size(); ++k) {
    if (common) common[k] = k < r.common_rates.size() ? r.common_rates(k) : 0.0;
    if (priv) priv[k] = r.rates.priv(k);
    if (secrecy) secrecy[k] = r.rates.secrecy(k);
  }
  return SECRSMA_OK;
}

secrsma_status secrsma_solution_precoders(const secrsma_solution* s, double* real, double* imag) {
  SECRSMA_NONNULL(s);
  const auto& P = s->sol.precoders.matrix();
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    if (real) real[i] = P.data()[i].real();
    if (imag) imag[i] = P.data()[i].imag();
  }
  return SECRSMA_OK;
}

secrsma_status secrsma_solution_info(const secrsma_solution* s, int* iterations, int* converged, int* feasible) {
  SECRSMA_NONNULL(s);
  if (iterations) *iterations = s->sol.iterations;
  if (converged) *converged = s->sol.converged ? 1 : 0;
  if (feasible) *feasible = s->sol.secrecy_ok ? 1 : 0;
  return SECRSMA_OK;
}

}  // extern "C"
