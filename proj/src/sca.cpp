#include "secrsma/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secrsma {

using conic::ComplexQuadraticForm;
using conic::ComplexVar;
using conic::Index;
using conic::LinearExpr;

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kRestorationMargin = 1e-3;

bool has_common(Scheme s) { return s == Scheme::RS; }

Eigen::Index ei(std::size_t i) { return static_cast<Eigen::Index>(i); }

bool secrecy_active(const SecrecySpec& spec, std::size_t k) { return spec.thresholds(ei(k)) > 0.0; }

}  // namespace

double secrecy_violation(const RVec& secrecy, const RVec& thresholds) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < secrecy.size(); ++k)
    if (thresholds(k) > 0.0) worst = std::max(worst, thresholds(k) - secrecy(k));
  return worst;
}

double single_user_capacity(const ChannelSet& channels, std::size_t k, double power, double noise) {
  return std::log2(1.0 + power * channels.h(k).squaredNorm() / noise);
}

Precoders initial_precoders(const ChannelSet& channels, double power, double kappa, Scheme scheme) {
  require(kappa >= 0.0 && kappa <= 1.0, "kappa must lie in [0, 1]");
  require(power > 0.0, "transmit power must be positive");
  const std::size_t K = channels.users();
  const CMat& H = channels.matrix();
  require(H.cwiseAbs().maxCoeff() > 0.0, "all-zero channel has no dominant direction");
  if (scheme == Scheme::MULP) kappa = 0.0;

  Precoders P(channels.antennas(), K);
  if (kappa > 0.0) {
    Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinU);
    P.common() = std::sqrt(kappa * power) * svd.matrixU().col(0);
  }
  const double each = std::sqrt((1.0 - kappa) * power / static_cast<double>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const double n = channels.h(k).norm();
    if (n > 0.0) P.priv(k) = each * channels.h(k) / n;
  }
  return P;
}

ScaState state_from_precoders(const ChannelSet& channels, const Precoders& P, const RVec& common,
                              const RVec& weights, double noise, Scheme scheme) {
  const auto K = ei(channels.users());
  require_dims(weights.size() == K, "weight vector length must equal K");
  const auto br = compute_sinrs(channels, P, noise);
  const RMat gains = (channels.matrix().adjoint() * P.matrix()).cwiseAbs2();

  ScaState s;
  s.P = P;
  s.alpha_p = br.rates.priv;
  s.rho_p = br.sinr_private;
  s.beta_p.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) s.beta_p(k) = gains.row(k).tail(K).sum() - gains(k, k + 1) + noise;
  if (has_common(scheme)) {
    s.alpha_c = br.rates.common;
    s.rho_c = br.sinr_common;
    s.beta_c.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) s.beta_c(k) = gains.row(k).tail(K).sum() + noise;
    if (common.size() == K) {
      s.common = common.cwiseMax(0.0);
    } else {
      s.common = RVec::Constant(K, br.rates.min_common() / static_cast<double>(K));
    }
  } else {
    s.common = RVec::Zero(K);
  }
  s.rho_w = br.sinr_wiretap;
  s.alpha_w = br.rates.wiretap;
  s.beta_w = RMat::Zero(K, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    const double residual = gains.row(j).tail(K).sum() - gains(j, j + 1);
    for (Eigen::Index k = 0; k < K; ++k)
      if (k != j) s.beta_w(k, j) = residual - gains(j, k + 1) + noise;
  }
  s.objective = weights.dot(s.common + s.alpha_p);
  return s;
}

ScaState initialize(const ChannelSet& channels, double power, double kappa, const RVec& weights, double noise,
                    Scheme scheme) {
  return state_from_precoders(channels, initial_precoders(channels, power, kappa, scheme), RVec(), weights, noise,
                              scheme);
}

std::size_t ScaSubproblem::count(std::string_view tag) const {
  return static_cast<std::size_t>(std::count_if(problem.blocks().begin(), problem.blocks().end(),
                                                [&](const conic::Block& b) { return b.tag == tag; }));
}

ScaSubproblem build_subproblem(const ScaState& st, const ChannelSet& channels, const SecrecySpec& spec,
                               double power, const ScaOptions& opt, bool restoration) {
  const std::size_t K = channels.users();
  const auto nt = ei(channels.antennas());
  spec.validate(K);
  require_dims(st.P.users() == K && st.P.antennas() == channels.antennas(), "state does not match channels");
  const bool rs = has_common(opt.scheme);
  const double noise = opt.noise;

  ScaSubproblem sp;
  auto& pr = sp.problem;
  auto var = [&](const std::string& name) { return pr.add_variable(name); };
  auto v = [](Index i, double c = 1.0) { return LinearExpr::var(i, c); };
  const auto nm = [](const char* base, std::size_t k) { return std::string(base) + std::to_string(k + 1); };
  const auto nm2 = [](const char* base, std::size_t k, std::size_t j) {
    return std::string(base) + std::to_string(k + 1) + "," + std::to_string(j + 1);
  };

  if (rs) sp.pc = conic::add_complex_vector(pr, nt, "pc");
  for (std::size_t k = 0; k < K; ++k) sp.pk.push_back(conic::add_complex_vector(pr, nt, nm("p", k)));

  sp.alpha_w.assign(K, std::vector<Index>(K, -1));
  sp.rho_w = sp.alpha_w;
  sp.beta_w = sp.alpha_w;
  for (std::size_t k = 0; k < K; ++k) {
    if (rs) {
      sp.C.push_back(var(nm("C", k)));
      sp.alpha_c.push_back(var(nm("alpha_c", k)));
      sp.rho_c.push_back(var(nm("rho_c", k)));
      sp.beta_c.push_back(var(nm("beta_c", k)));
    }
    sp.alpha_p.push_back(var(nm("alpha_p", k)));
    sp.rho_p.push_back(var(nm("rho_p", k)));
    sp.beta_p.push_back(var(nm("beta_p", k)));
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (!secrecy_active(spec, k)) continue;
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      sp.alpha_w[k][j] = var(nm2("alpha_w", k, j));
      sp.rho_w[k][j] = var(nm2("rho_w", k, j));
      if (opt.wiretap == WiretapSurrogate::ConservativeCone) sp.beta_w[k][j] = var(nm2("beta_w", k, j));
    }
  }
  if (restoration) sp.slack = var("slack");

  const CVec zero = CVec::Zero(nt);
  auto p_now = [&](std::size_t stream) -> CVec {  // 0 = common
    return stream == 0 ? CVec(st.P.common()) : CVec(st.P.priv(stream - 1));
  };

  // objective
  if (restoration) {
    pr.minimize(v(*sp.slack));
    pr.add_nonnegative(v(*sp.slack) + kRestorationMargin, "slack_floor");
  } else {
    LinearExpr obj;
    for (std::size_t k = 0; k < K; ++k) {
      const double u = spec.weights(ei(k));
      if (rs) obj -= v(sp.C[k], u);
      obj -= v(sp.alpha_p[k], u);
    }
    pr.minimize(obj);
  }

  // secrecy rows: alpha_p,k - alpha_{k,j} >= R_th,k
  for (std::size_t k = 0; k < K; ++k) {
    if (!secrecy_active(spec, k)) continue;
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      LinearExpr row = v(sp.alpha_p[k]) - v(sp.alpha_w[k][j]) - spec.thresholds(ei(k));
      if (restoration) row += v(*sp.slack);
      pr.add_nonnegative(row, "secrecy");
    }
  }

  if (rs) {
    // common-rate decodability
    for (std::size_t k = 0; k < K; ++k) {
      LinearExpr row = v(sp.alpha_c[k]);
      for (std::size_t j = 0; j < K; ++j) row -= v(sp.C[j]);
      pr.add_nonnegative(row, "common");
    }
  }

  // 1 + rho >= 2^alpha
  for (std::size_t k = 0; k < K; ++k) {
    if (rs) conic::add_exp_rate_link(pr, sp.rho_c[k], sp.alpha_c[k], "exp");
    conic::add_exp_rate_link(pr, sp.rho_p[k], sp.alpha_p[k], "exp");
  }

  // tangent upper bound on 1 + rho_{k,j}
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < K; ++j) {
      if (sp.alpha_w[k][j] < 0) continue;
      const double a0 = st.alpha_w(ei(k), ei(j));
      const double e0 = std::exp2(a0);
      pr.add_nonnegative(e0 * (1.0 + kLn2 * (v(sp.alpha_w[k][j]) - a0)) - 1.0 - v(sp.rho_w[k][j]), "taylor_exp");
    }

  // denominators
  for (std::size_t k = 0; k < K; ++k) {
    const CVec hk = channels.h(k);
    if (rs) {
      ComplexQuadraticForm q;
      for (std::size_t j = 0; j < K; ++j) q.terms.emplace_back(hk, &sp.pk[j]);
      q.constant = noise;
      conic::add_quadratic_le_linear(pr, q, v(sp.beta_c[k]), "denominator");
    }
    ComplexQuadraticForm q;
    for (std::size_t j = 0; j < K; ++j)
      if (j != k) q.terms.emplace_back(hk, &sp.pk[j]);
    q.constant = noise;
    conic::add_quadratic_le_linear(pr, q, v(sp.beta_p[k]), "denominator");
  }

  // tangent lower bound on |h^H p|^2 / beta
  auto add_ratio_bound = [&](const CVec& h, const ComplexVar& p, const CVec& p0, Index beta, double beta0, Index rho) {
    const cplx hp0 = h.dot(p0);
    const CVec w = h * hp0;
    const double g0 = std::norm(hp0);
    pr.add_nonnegative((2.0 / beta0) * conic::real_inner(w, p) - v(beta, g0 / (beta0 * beta0)) - v(rho), "taylor_ratio");
  };
  for (std::size_t k = 0; k < K; ++k) {
    const CVec hk = channels.h(k);
    if (rs) add_ratio_bound(hk, *sp.pc, p_now(0), sp.beta_c[k], st.beta_c(ei(k)), sp.rho_c[k]);
    add_ratio_bound(hk, sp.pk[k], p_now(k + 1), sp.beta_p[k], st.beta_p(ei(k)), sp.rho_p[k]);
  }

  // eavesdropper SINR bound
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < K; ++j) {
      if (sp.rho_w[k][j] < 0) continue;
      const CVec hj = channels.h(j);
      LinearExpr lin;  // linearised interference from the remaining private streams
      double interf0 = 0.0;
      for (std::size_t kk = 0; kk < K; ++kk) {
        if (kk == k || kk == j) continue;
        const cplx hp0 = hj.dot(p_now(kk + 1));
        lin += 2.0 * conic::real_inner(hj * hp0, sp.pk[kk]);
        lin -= std::norm(hp0);
        interf0 += std::norm(hp0);
      }
      ComplexQuadraticForm q;
      q.terms.emplace_back(hj, &sp.pk[k]);
      if (opt.wiretap == WiretapSurrogate::AsPrinted) {
        const double rho0 = st.rho_w(ei(k), ei(j));
        conic::add_quadratic_le_linear(pr, q, rho0 * lin + v(sp.rho_w[k][j], interf0 + noise), "wiretap");
      } else {
        const Index b = sp.beta_w[k][j];
        pr.add_nonnegative(lin + noise - v(b), "wiretap_denominator");
        std::vector<LinearExpr> u;
        auto [re, im] = conic::inner(hj, sp.pk[k]);
        u.push_back(std::move(re));
        u.push_back(std::move(im));
        pr.add_rotated(v(sp.rho_w[k][j]), v(b), std::move(u), "wiretap");
      }
    }

  // transmit power
  {
    std::vector<LinearExpr> coords;
    auto push = [&](const ComplexVar& p) {
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        coords.push_back(v(p.re[static_cast<std::size_t>(i)]));
        coords.push_back(v(p.im[static_cast<std::size_t>(i)]));
      }
    };
    if (rs) push(*sp.pc);
    for (const auto& p : sp.pk) push(p);
    pr.add_second_order(LinearExpr(std::sqrt(power)), std::move(coords), "power");
  }

  // c >= 0 and boxes that keep every variable bounded
  for (std::size_t k = 0; k < K; ++k) {
    const double cap = 2.0 * (noise + channels.h(k).squaredNorm() * power);
    if (rs) {
      pr.add_nonnegative(v(sp.C[k]), "common_nonneg");
      pr.add_nonnegative(cap - v(sp.beta_c[k]), "box");
    }
    pr.add_nonnegative(cap - v(sp.beta_p[k]), "box");
    pr.add_nonnegative(v(sp.alpha_p[k]) + 10.0, "box");
    for (std::size_t j = 0; j < K; ++j) {
      if (sp.rho_w[k][j] < 0) continue;
      pr.add_nonnegative(v(sp.rho_w[k][j]), "box");
      if (sp.beta_w[k][j] >= 0) {
        const double capj = 2.0 * (noise + channels.h(j).squaredNorm() * power);
        pr.add_nonnegative(capj - v(sp.beta_w[k][j]), "box");
      }
    }
  }
  return sp;
}

ScaState extract_state(const ScaSubproblem& sp, const RVec& x, const RVec& weights, int iteration) {
  const std::size_t K = sp.pk.size();
  const auto nt = sp.pk.front().size();
  ScaState s;
  s.iteration = iteration;
  s.P = Precoders(static_cast<std::size_t>(nt), K);
  if (sp.pc) s.P.common() = sp.pc->value(x);
  for (std::size_t k = 0; k < K; ++k) s.P.priv(k) = sp.pk[k].value(x);

  auto gather = [&](const std::vector<Index>& idx) {
    RVec out(ei(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(ei(i)) = x(idx[i]);
    return out;
  };
  auto gather2 = [&](const std::vector<std::vector<Index>>& idx) {
    RMat out = RMat::Zero(ei(K), ei(K));
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t j = 0; j < K; ++j)
        if (idx[k][j] >= 0) out(ei(k), ei(j)) = x(idx[k][j]);
    return out;
  };
  s.common = sp.pc ? gather(sp.C) : RVec::Zero(ei(K));
  s.alpha_c = gather(sp.alpha_c);
  s.rho_c = gather(sp.rho_c);
  s.beta_c = gather(sp.beta_c);
  s.alpha_p = gather(sp.alpha_p);
  s.rho_p = gather(sp.rho_p);
  s.beta_p = gather(sp.beta_p);
  s.alpha_w = gather2(sp.alpha_w);
  s.rho_w = gather2(sp.rho_w);
  s.beta_w = gather2(sp.beta_w);
  s.objective = weights.dot(s.common + s.alpha_p);
  return s;
}

ScaState iterate(const ScaState& state, const ChannelSet& channels, const SecrecySpec& spec, double power,
                 const ScaOptions& options, int* newton_steps) {
  auto sp = build_subproblem(state, channels, spec, power, options);
  conic::SolveOptions so;
  so.tolerance = options.solve_tolerance;
  const auto out = conic::solve(sp.problem, so);
  if (newton_steps) *newton_steps = out.newton_steps;
  if (!out.ok())
    fail(ErrorCode::SolverFailure, std::string("SCA subproblem: ") + conic::to_string(out.status) + " " + out.message);
  return extract_state(sp, *out.primal, spec.weights, state.iteration + 1);
}

// ---------------------------------------------------------------------------

namespace {

struct Run {
  ScaState state;
  std::vector<TraceRecord> trace;
  double initial_wsr = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status = "ok";
};

double true_wsr(const ChannelSet& H, const ScaState& s, const SecrecySpec& spec, double noise) {
  const auto br = compute_sinrs(H, s.P, noise);
  return spec.weights.dot(s.common.cwiseMax(0.0) + br.rates.priv);
}

double secrecy_margin(const ScaState& s, const SecrecySpec& spec) {
  double worst = std::numeric_limits<double>::infinity();
  const auto K = spec.thresholds.size();
  for (Eigen::Index k = 0; k < K; ++k) {
    if (spec.thresholds(k) <= 0.0) continue;
    for (Eigen::Index j = 0; j < K; ++j)
      if (j != k) worst = std::min(worst, s.alpha_p(k) - s.alpha_w(k, j) - spec.thresholds(k));
  }
  return worst;
}

// Minimise the largest secrecy shortfall by SCA until a strictly feasible
// expansion point is found.
ScaState restore(ScaState s, const ChannelSet& H, const SecrecySpec& spec, double power, const ScaOptions& opt,
                 std::vector<TraceRecord>& trace) {
  conic::SolveOptions so;
  so.tolerance = opt.solve_tolerance;
  double previous = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= opt.max_restoration_iterations; ++r) {
    auto sp = build_subproblem(s, H, spec, power, opt, true);
    const auto out = conic::solve(sp.problem, so);
    if (!out.ok()) fail(ErrorCode::SolverFailure, std::string("restoration subproblem: ") + out.message);
    const double slack = (*out.primal)(*sp.slack);
    s = extract_state(sp, *out.primal, spec.weights, 0);
    trace.push_back({"restoration", r, 0, slack, true_wsr(H, s, spec, opt.noise), out.newton_steps});
    if (slack <= -kRestorationMargin / 2.0) return s;
    if (previous - slack < 1e-7) break;
    previous = slack;
  }
  fail(ErrorCode::InfeasibleThresholds,
       "secrecy thresholds could not be met: restoration stalled with shortfall " + std::to_string(previous));
}

Run run_sca(ScaState s, const ChannelSet& H, const SecrecySpec& spec, double power, const ScaOptions& opt) {
  Run run;
  run.initial_wsr = true_wsr(H, s, spec, opt.noise);
  if (secrecy_margin(s, spec) < -1e-9) {
    s = restore(std::move(s), H, spec, power, opt, run.trace);
  }
  s.iteration = 0;
  double previous = s.objective;
  for (int n = 1; n <= opt.max_iterations; ++n) {
    int steps = 0;
    ScaState next;
    try {
      next = iterate(s, H, spec, power, opt, &steps);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SolverFailure || n == 1) throw;
      run.status = "solver_failure";
      break;
    }
    run.trace.push_back({"sca", n, 0, next.objective, true_wsr(H, next, spec, opt.noise), steps});
    {
      const auto br = compute_sinrs(H, next.P, opt.noise);
      auto& t = run.trace.back();
      t.common = next.common.cwiseMax(0.0);
      t.priv = br.rates.priv;
      t.secrecy = br.rates.secrecy;
    }
    run.iterations = n;
    s = std::move(next);
    if (std::abs(s.objective - previous) <= opt.tolerance) {
      run.converged = true;
      break;
    }
    previous = s.objective;
  }
  if (!run.converged && run.status == "ok") run.status = "not_converged";
  run.state = std::move(s);
  return run;
}

PrecoderSolution to_solution(const ChannelSet& H, const Precoders& P, RVec common, const SecrecySpec& spec,
                             const ScaOptions& opt) {
  PrecoderSolution sol;
  sol.scheme = opt.scheme;
  sol.csit = CsitMode::Perfect;
  sol.precoders = P;
  const auto br = compute_sinrs(H, P, opt.noise);
  // guard against roundoff: the allocation must be decodable by every user
  common = common.cwiseMax(0.0);
  const double total = common.sum();
  const double cap = has_common(opt.scheme) ? br.rates.min_common() : 0.0;
  if (total > cap && total > 0.0) common *= cap / total;
  sol.common_rates = common;
  sol.rates = br.rates;
  sol.weights = spec.weights;
  sol.thresholds = spec.thresholds;
  sol.wsr = spec.weights.dot(common + br.rates.priv);
  sol.max_secrecy_violation = secrecy_violation(br.rates.secrecy, spec.thresholds);
  sol.secrecy_ok = sol.max_secrecy_violation <= opt.feasibility_tolerance;
  sol.status = sol.secrecy_ok ? "ok" : "secrecy_violation";
  return sol;
}

}  // namespace

PrecoderSolution solve_wsr(const ChannelSet& channels, const SecrecySpec& spec, double power,
                           const ScaOptions& opt) {
  const std::size_t K = channels.users();
  spec.validate(K);
  require(power > 0.0, "transmit power must be positive");
  require(opt.noise > 0.0, "noise variance must be positive");
  require(opt.tolerance > 0.0 && opt.max_iterations >= 1, "invalid SCA stopping rule");
  for (std::size_t k = 0; k < K; ++k)
    if (spec.thresholds(ei(k)) > single_user_capacity(channels, k, power, opt.noise))
      fail(ErrorCode::InfeasibleThresholds,
           "threshold of user " + std::to_string(k + 1) + " exceeds its single-user capacity");

  std::vector<PrecoderSolution> candidates;
  std::string last_failure;
  bool any_infeasible = false;

  auto attempt = [&](ScaState s0, const std::string& origin, double kappa) {
    try {
      Run run = run_sca(std::move(s0), channels, spec, power, opt);
      auto sol = to_solution(channels, run.state.P, run.state.common, spec, opt);
      sol.trace = std::move(run.trace);
      sol.initial_wsr = run.initial_wsr;
      sol.iterations = run.iterations;
      sol.converged = run.converged;
      sol.kappa = kappa;
      sol.origin = origin;
      if (sol.secrecy_ok && run.status != "ok") sol.status = run.status;
      candidates.push_back(std::move(sol));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InfeasibleThresholds) any_infeasible = true;
      else if (e.code() != ErrorCode::SolverFailure) throw;
      last_failure = e.what();
    }
  };

  attempt(initialize(channels, power, opt.kappa, spec.weights, opt.noise, opt.scheme), "cold", opt.kappa);

  for (const auto& ws : opt.warm_starts) {
    require_dims(ws.precoders.antennas() == channels.antennas() && ws.precoders.users() == K,
                 "warm start does not match the channel dimensions");
    Precoders P = ws.precoders;
    RVec common = ws.common_rates;
    if (!has_common(opt.scheme)) {
      P.common().setZero();
      common = RVec::Zero(ei(K));
    }
    if (P.total_power() > power) P.matrix() *= std::sqrt(power / P.total_power());

    // the point itself is a candidate: iterating can only improve on it
    if (common.size() != ei(K)) common = RVec::Zero(ei(K));
    auto as_is = to_solution(channels, P, common, spec, opt);
    as_is.origin = ws.label + "-as-is";
    as_is.initial_wsr = as_is.wsr;
    as_is.converged = true;
    candidates.push_back(as_is);

    if (has_common(opt.scheme) && P.common().squaredNorm() <= 1e-9 * power) {
      // a start without a common stream sits on the cone boundary; seed a small one
      const double used = std::max(P.total_power(), 1e-3 * power);
      Eigen::JacobiSVD<CMat> svd(channels.matrix(), Eigen::ComputeThinU);
      for (std::size_t k = 0; k < K; ++k) P.priv(k) *= std::sqrt(0.9);
      P.common() = std::sqrt(0.1 * used) * svd.matrixU().col(0);
      common = RVec();
    }
    attempt(state_from_precoders(channels, P, common, spec.weights, opt.noise, opt.scheme), ws.label, 0.0);
  }

  auto best_feasible = [&]() -> const PrecoderSolution* {
    const PrecoderSolution* best = nullptr;
    for (const auto& c : candidates)
      if (c.secrecy_ok && (!best || c.wsr > best->wsr)) best = &c;
    return best;
  };

  if (!best_feasible()) {
    for (double kappa : opt.fallback_kappas) {
      attempt(initialize(channels, power, kappa, spec.weights, opt.noise, opt.scheme),
              "kappa=" + std::to_string(kappa), kappa);
      if (best_feasible()) break;
    }
  }
  if (const auto* best = best_feasible()) return *best;

  if (candidates.empty()) {
    if (any_infeasible) fail(ErrorCode::InfeasibleThresholds, last_failure);
    fail(ErrorCode::SolverFailure, last_failure);
  }
  // nothing passed the post-hoc check: return the least-violating point, flagged
  const PrecoderSolution* least = &candidates.front();
  for (const auto& c : candidates)
    if (c.max_secrecy_violation < least->max_secrecy_violation) least = &c;
  return *least;
}

}  // namespace secrsma
