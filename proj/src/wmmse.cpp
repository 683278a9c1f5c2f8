#include "secrsma/wmmse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secrsma/sca.hpp"

namespace secrsma {

using conic::ComplexQuadraticForm;
using conic::ComplexVar;
using conic::Index;
using conic::LinearExpr;

namespace {

constexpr double kRestorationMargin = 1e-3;

Eigen::Index ei(std::size_t i) { return static_cast<Eigen::Index>(i); }

bool has_common(Scheme s) { return s == Scheme::RS; }

StreamMmse make_stream(double T, cplx signal) {
  StreamMmse s;
  s.T = T;
  s.signal = signal;
  s.I = std::max(T - std::norm(signal), std::numeric_limits<double>::min());
  s.g = std::conj(signal) / T;
  s.eps = s.I / T;
  s.omega = T / s.I;
  return s;
}

AveragedStream zero_stream(Eigen::Index nt) {
  AveragedStream a;
  a.Psi = CMat::Zero(nt, nt);
  a.f = CVec::Zero(nt);
  return a;
}

void accumulate(AveragedStream& a, const StreamMmse& s, const CVec& h) {
  const double t = s.omega * std::norm(s.g);
  a.t += t;
  a.Psi.noalias() += t * (h * h.adjoint());
  a.f += (s.omega * std::conj(s.g)) * h;
  a.u += s.omega;
  a.v += std::log2(s.omega);
}

void scale(AveragedStream& a, double w) {
  a.t *= w;
  a.Psi *= w;
  a.f *= w;
  a.u *= w;
  a.v *= w;
}

// Constant part of the averaged WMSE: s (t sigma^2 + u) - v + 1 - s.
double wmse_constant(const AveragedStream& a, double noise) {
  return kWmseScale * (a.t * noise + a.u) - a.v + 1.0 - kWmseScale;
}

// Factors w_e with Psi = sum_e w_e w_e^H (Psi is Hermitian PSD by construction).
std::vector<CVec> factor(const CMat& Psi) {
  const CMat herm = 0.5 * (Psi + Psi.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm);
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<CVec> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-14 * top && l > 0.0) out.emplace_back(std::sqrt(l) * es.eigenvectors().col(i));
  }
  return out;
}

double max_eigenvalue(const CMat& Psi) {
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(0.5 * (Psi + Psi.adjoint())), Eigen::EigenvaluesOnly);
  return std::max(es.eigenvalues().maxCoeff(), 0.0);
}

}  // namespace

// ---- per-realisation receiver quantities --------------------------------------

MmseSample mmse_sample(const ChannelSet& channels, const Precoders& P, double noise, Scheme scheme) {
  const std::size_t K = channels.users();
  require_dims(P.users() == K && P.antennas() == channels.antennas(), "precoders do not match channels");
  require(noise > 0.0, "noise variance must be positive");
  const CMat A = channels.matrix().adjoint() * P.matrix();  // (k, s): h_k^H p_s
  const RMat gains = A.cwiseAbs2();

  MmseSample out;
  RVec Tp(ei(K));
  for (std::size_t k = 0; k < K; ++k) Tp(ei(k)) = gains.row(ei(k)).tail(ei(K)).sum() + noise;
  for (std::size_t k = 0; k < K; ++k) {
    const auto kk = ei(k);
    if (has_common(scheme)) out.common.push_back(make_stream(Tp(kk) + gains(kk, 0), A(kk, 0)));
    out.priv.push_back(make_stream(Tp(kk), A(kk, kk + 1)));
  }
  out.wiretap.assign(K, std::vector<StreamMmse>(K));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < K; ++j) {
      if (j == k) continue;
      const auto jj = ei(j);
      out.wiretap[k][j] = make_stream(Tp(jj) - gains(jj, jj + 1), A(jj, ei(k) + 1));
    }
  return out;
}

MmseState update_equalizers_and_weights(const Precoders& P, const std::vector<ChannelSet>& samples, double noise,
                                        Scheme scheme) {
  require(!samples.empty(), "need at least one channel sample");
  MmseState st;
  st.samples.reserve(samples.size());
  for (const auto& H : samples) st.samples.push_back(mmse_sample(H, P, noise, scheme));
  return st;
}

double mse(cplx g, double T, cplx signal) { return std::norm(g) * T - 2.0 * std::real(g * signal) + 1.0; }

double wmse(double omega, double eps) {
  require(omega > 0.0, "WMSE weight must be positive");
  return kWmseScale * omega * eps - std::log2(omega) + 1.0 - kWmseScale;
}

double RateWmmseGap::max() const {
  double m = 0.0;
  if (common.size()) m = std::max(m, common.maxCoeff());
  if (priv.size()) m = std::max(m, priv.maxCoeff());
  if (wiretap.size()) m = std::max(m, wiretap.maxCoeff());
  return m;
}

RateWmmseGap rate_wmmse_gap(const ChannelSet& channels, const Precoders& P, double noise, Scheme scheme) {
  const auto s = mmse_sample(channels, P, noise, scheme);
  const auto br = compute_sinrs(channels, P, noise);
  const auto K = ei(channels.users());
  auto gap = [](const StreamMmse& m, double rate) {
    return std::abs(wmse(m.omega, mse(m.g, m.T, m.signal)) - (1.0 - rate));
  };
  RateWmmseGap out;
  out.priv.resize(K);
  out.wiretap = RMat::Zero(K, K);
  if (has_common(scheme)) out.common.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (has_common(scheme)) out.common(k) = gap(s.common[ku], br.rates.common(k));
    out.priv(k) = gap(s.priv[ku], br.rates.priv(k));
    for (Eigen::Index j = 0; j < K; ++j)
      if (j != k) out.wiretap(k, j) = gap(s.wiretap[ku][static_cast<std::size_t>(j)], br.rates.wiretap(k, j));
  }
  return out;
}

// ---- sample averages ---------------------------------------------------------

AveragedCoefficients compute_averages(const MmseState& state, const std::vector<ChannelSet>& samples,
                                      Scheme scheme) {
  require_dims(state.samples.size() == samples.size() && !samples.empty(), "state and samples differ in length");
  const std::size_t K = samples.front().users();
  const auto nt = ei(samples.front().antennas());
  AveragedCoefficients a;
  if (has_common(scheme)) a.common.assign(K, zero_stream(nt));
  a.priv.assign(K, zero_stream(nt));
  a.wiretap.assign(K, std::vector<AveragedStream>(K, zero_stream(nt)));

  for (std::size_t m = 0; m < samples.size(); ++m) {
    const auto& s = state.samples[m];
    const auto& H = samples[m];
    for (std::size_t k = 0; k < K; ++k) {
      const CVec hk = H.h(k);
      if (has_common(scheme)) accumulate(a.common[k], s.common[k], hk);
      accumulate(a.priv[k], s.priv[k], hk);
      for (std::size_t j = 0; j < K; ++j)
        if (j != k) accumulate(a.wiretap[k][j], s.wiretap[k][j], H.h(j));
    }
  }
  const double w = 1.0 / static_cast<double>(samples.size());
  for (auto& x : a.common) scale(x, w);
  for (auto& x : a.priv) scale(x, w);
  for (auto& row : a.wiretap)
    for (auto& x : row) scale(x, w);
  return a;
}

double averaged_wmse(const AveragedStream& a, const std::vector<CVec>& streams, const CVec& signal, double noise) {
  double q = 0.0;
  for (const auto& p : streams) q += std::real(p.dot(a.Psi * p));
  return kWmseScale * (q - 2.0 * std::real(a.f.dot(signal))) + wmse_constant(a, noise);
}

double linearized_wiretap_wmse(const AveragedStream& a, const Precoders& P, const Precoders& P0, std::size_t k,
                               std::size_t j, double noise) {
  double q = 0.0;
  for (std::size_t i = 0; i < P.users(); ++i) {
    if (i == j) continue;
    const CVec Pp0 = a.Psi * P0.priv(i);
    q += 2.0 * std::real(Pp0.dot(P.priv(i))) - std::real(P0.priv(i).dot(Pp0));
  }
  return kWmseScale * (q - 2.0 * std::real(a.f.dot(P.priv(k)))) + wmse_constant(a, noise);
}

RateSummary saf_rates(const Precoders& P, const std::vector<ChannelSet>& samples, double noise) {
  require(!samples.empty(), "need at least one channel sample");
  const auto K = ei(samples.front().users());
  RateSummary r;
  r.common = RVec::Zero(K);
  r.priv = RVec::Zero(K);
  r.wiretap = RMat::Zero(K, K);
  for (const auto& H : samples) {
    const auto br = compute_sinrs(H, P, noise);
    r.common += br.rates.common;
    r.priv += br.rates.priv;
    r.wiretap += br.rates.wiretap;
  }
  const double w = 1.0 / static_cast<double>(samples.size());
  r.common *= w;
  r.priv *= w;
  r.wiretap *= w;
  r.secrecy = secrecy_rates(r.priv, r.wiretap);
  return r;
}

// ---- the inner convex problem ----------------------------------------------------

std::size_t AoSubproblem::count(std::string_view tag) const {
  return static_cast<std::size_t>(std::count_if(problem.blocks().begin(), problem.blocks().end(),
                                                [&](const conic::Block& b) { return b.tag == tag; }));
}

Precoders AoSubproblem::precoders(const RVec& x) const {
  Precoders P(static_cast<std::size_t>(pk.front().size()), pk.size());
  if (pc) P.common() = pc->value(x);
  for (std::size_t k = 0; k < pk.size(); ++k) P.priv(k) = pk[k].value(x);
  return P;
}

AoSubproblem build_inner_subproblem(const Precoders& P0, const AveragedCoefficients& avg, const SecrecySpec& spec,
                                    double power, const AoOptions& opt, bool restoration) {
  const std::size_t K = P0.users();
  const auto nt = ei(P0.antennas());
  spec.validate(K);
  const bool rs = has_common(opt.scheme);
  require_dims(avg.priv.size() == K && (!rs || avg.common.size() == K), "averages do not match the scheme");
  const double noise = opt.noise;
  const double sw = kWmseScale;

  AoSubproblem sp;
  auto& pr = sp.problem;
  auto v = [](Index i, double c = 1.0) { return LinearExpr::var(i, c); };
  const auto nm = [](const char* base, std::size_t k) { return std::string(base) + std::to_string(k + 1); };

  if (rs) sp.pc = conic::add_complex_vector(pr, nt, "pc");
  for (std::size_t k = 0; k < K; ++k) sp.pk.push_back(conic::add_complex_vector(pr, nt, nm("p", k)));
  for (std::size_t k = 0; k < K; ++k) {
    sp.tau.push_back(pr.add_variable(nm("tau", k)));
    if (rs) sp.X.push_back(pr.add_variable(nm("X", k)));
  }
  sp.alpha.assign(K, std::vector<Index>(K, -1));
  for (std::size_t k = 0; k < K; ++k) {
    if (spec.thresholds(ei(k)) <= 0.0) continue;
    for (std::size_t j = 0; j < K; ++j)
      if (j != k)
        sp.alpha[k][j] = pr.add_variable("alpha" + std::to_string(k + 1) + "," + std::to_string(j + 1));
  }
  if (restoration) sp.slack = pr.add_variable("slack");

  if (restoration) {
    pr.minimize(v(*sp.slack));
    pr.add_nonnegative(v(*sp.slack) + kRestorationMargin, "slack_floor");
  } else {
    LinearExpr obj;
    for (std::size_t k = 0; k < K; ++k) {
      const double u = spec.weights(ei(k));
      obj += v(sp.tau[k], u);
      if (rs) obj += v(sp.X[k], u);
    }
    pr.minimize(obj);
  }

  auto quadratic = [&](const AveragedStream& a, const std::vector<const ComplexVar*>& streams) {
    ComplexQuadraticForm q;
    const double r = std::sqrt(sw);
    for (const auto& w : factor(a.Psi))
      for (const auto* p : streams) q.terms.emplace_back(r * w, p);
    return q;
  };
  std::vector<const ComplexVar*> privs;
  for (const auto& p : sp.pk) privs.push_back(&p);

  // tau_k >= averaged private WMSE
  for (std::size_t k = 0; k < K; ++k) {
    const auto& a = avg.priv[k];
    LinearExpr bound = v(sp.tau[k]) + 2.0 * sw * conic::real_inner(a.f, sp.pk[k]) - wmse_constant(a, noise);
    conic::add_quadratic_le_linear(pr, quadratic(a, privs), std::move(bound), "private_wmse");
  }

  // averaged common WMSE - sum X <= 1, X <= 0
  if (rs) {
    std::vector<const ComplexVar*> all{&*sp.pc};
    all.insert(all.end(), privs.begin(), privs.end());
    for (std::size_t k = 0; k < K; ++k) {
      const auto& a = avg.common[k];
      LinearExpr bound = 1.0 + 2.0 * sw * conic::real_inner(a.f, *sp.pc) - wmse_constant(a, noise);
      for (std::size_t i = 0; i < K; ++i) bound += v(sp.X[i]);
      conic::add_quadratic_le_linear(pr, quadratic(a, all), std::move(bound), "common_wmse");
      pr.add_nonnegative(-v(sp.X[k]), "common_nonpositive");
    }
  }

  // secrecy: tau_k - alpha_kj <= -R_th,k and alpha_kj below the linearised eavesdropper WMSE
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < K; ++j) {
      const Index a_kj = sp.alpha[k][j];
      if (a_kj < 0) continue;
      LinearExpr row = v(a_kj) - v(sp.tau[k]) - spec.thresholds(ei(k));
      if (restoration) row += v(*sp.slack);
      pr.add_nonnegative(std::move(row), "secrecy");

      const auto& a = avg.wiretap[k][j];
      LinearExpr lin = wmse_constant(a, noise) - 2.0 * sw * conic::real_inner(a.f, sp.pk[k]);
      for (std::size_t i = 0; i < K; ++i) {
        if (i == j) continue;
        const CVec p0 = P0.priv(i);
        const CVec Pp0 = a.Psi * p0;
        lin += 2.0 * sw * conic::real_inner(Pp0, sp.pk[i]);
        lin -= sw * std::real(p0.dot(Pp0));
      }
      pr.add_nonnegative(std::move(lin) - v(a_kj), "wiretap_linear");
    }

  // transmit power
  {
    std::vector<LinearExpr> coords;
    auto push = [&](const ComplexVar& p) {
      for (std::size_t i = 0; i < p.re.size(); ++i) {
        coords.push_back(v(p.re[i]));
        coords.push_back(v(p.im[i]));
      }
    };
    if (rs) push(*sp.pc);
    for (const auto& p : sp.pk) push(p);
    pr.add_second_order(LinearExpr(std::sqrt(power)), std::move(coords), "power");
  }

  // tau above the largest value its WMSE can take inside the power ball is never useful
  for (std::size_t k = 0; k < K; ++k) {
    const auto& a = avg.priv[k];
    const double cap = sw * (max_eigenvalue(a.Psi) * power + 2.0 * a.f.norm() * std::sqrt(power)) +
                       wmse_constant(a, noise) + 1.0;
    pr.add_nonnegative(cap - v(sp.tau[k]), "box");
  }
  return sp;
}

// ---- alternating optimisation ------------------------------------------------------

namespace {

struct Evaluation {
  RateSummary rates;
  RVec common;
  double wasr = 0.0;
  double violation = 0.0;
};

// Clip the allocation to what every user decodes on average, then score it.
Evaluation evaluate(const Precoders& P, RVec common, const std::vector<ChannelSet>& samples, const SecrecySpec& spec,
                    const AoOptions& opt) {
  Evaluation e;
  e.rates = saf_rates(P, samples, opt.noise);
  const auto K = spec.weights.size();
  if (!has_common(opt.scheme) || common.size() != K) common = RVec::Zero(K);
  common = common.cwiseMax(0.0);
  const double cap = has_common(opt.scheme) ? std::max(e.rates.min_common(), 0.0) : 0.0;
  if (common.sum() > cap && common.sum() > 0.0) common *= cap / common.sum();
  e.common = common;
  e.wasr = spec.weights.dot(common + e.rates.priv);
  e.violation = secrecy_violation(e.rates.secrecy, spec.thresholds);
  return e;
}

void fill_rates(TraceRecord& t, const Evaluation& e) {
  t.common = e.common;
  t.priv = e.rates.priv;
  t.secrecy = e.rates.secrecy;
}

double secrecy_margin(const RateSummary& r, const SecrecySpec& spec) {
  double worst = std::numeric_limits<double>::infinity();
  const auto K = spec.thresholds.size();
  for (Eigen::Index k = 0; k < K; ++k) {
    if (spec.thresholds(k) <= 0.0) continue;
    for (Eigen::Index j = 0; j < K; ++j)
      if (j != k) worst = std::min(worst, r.priv(k) - r.wiretap(k, j) - spec.thresholds(k));
  }
  return worst;
}

struct AoRun {
  Precoders P;
  RVec common;
  std::vector<TraceRecord> trace;
  double initial_wsr = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status = "ok";
};

RVec read_common(const AoSubproblem& sp, const RVec& x) {
  RVec c = RVec::Zero(ei(sp.pk.size()));
  for (std::size_t k = 0; k < sp.X.size(); ++k) c(ei(k)) = -x(sp.X[k]);
  return c;
}

// Alternating slack minimisation: refresh the weights at the current point,
// then reduce the largest secrecy-row shortfall, until the sample-average
// secrecy constraints hold at the point itself. With stale weights the
// eavesdropper term is only first-order accurate, so each step is
// backtracked on the true margin.
Precoders restore(Precoders P, const std::vector<ChannelSet>& samples, const SecrecySpec& spec, double power,
                  const AoOptions& opt, int outer, std::vector<TraceRecord>& trace) {
  conic::SolveOptions so;
  so.tolerance = opt.solve_tolerance;
  const RVec none;
  double margin = secrecy_margin(evaluate(P, none, samples, spec, opt).rates, spec);
  int idle = 0;
  for (int r = 1; r <= opt.max_restoration_iterations; ++r) {
    const auto avg = compute_averages(update_equalizers_and_weights(P, samples, opt.noise, opt.scheme), samples,
                                      opt.scheme);
    auto sp = build_inner_subproblem(P, avg, spec, power, opt, true);
    const auto out = conic::solve(sp.problem, so);
    if (!out.ok()) fail(ErrorCode::SolverFailure, std::string("restoration subproblem: ") + out.message);
    const Precoders target = sp.precoders(*out.primal);

    Precoders next = P;
    double next_margin = margin, next_wasr = 0.0;
    for (double step = 1.0; step >= 1.0 / 1024; step *= 0.5) {
      Precoders trial(CMat(P.matrix() + step * (target.matrix() - P.matrix())));
      const auto ev = evaluate(trial, none, samples, spec, opt);
      const double m = secrecy_margin(ev.rates, spec);
      if (m > next_margin) {
        next = std::move(trial);
        next_margin = m;
        next_wasr = ev.wasr;
        break;
      }
    }
    trace.push_back({"restoration", outer, r, (*out.primal)(*sp.slack), next_wasr, out.newton_steps});
    if (next_margin >= 0.0) return next;
    if (next_margin > margin + 1e-7) {
      idle = 0;
    } else if (++idle >= 5) {
      margin = std::max(margin, next_margin);
      break;
    }
    P = std::move(next);
    margin = std::max(margin, next_margin);
  }
  fail(ErrorCode::InfeasibleThresholds,
       "secrecy thresholds could not be met: restoration stalled with shortfall " + std::to_string(-margin));
}

AoRun run_ao(Precoders P, RVec common, const std::vector<ChannelSet>& samples, const SecrecySpec& spec,
             double power, const AoOptions& opt) {
  AoRun run;
  auto ev = evaluate(P, common, samples, spec, opt);
  if (has_common(opt.scheme) && common.size() != spec.weights.size())
    ev = evaluate(P, RVec::Constant(spec.weights.size(), ev.rates.min_common() / double(spec.weights.size())),
                  samples, spec, opt);
  run.initial_wsr = ev.wasr;
  common = ev.common;

  // best point that passes the sample-average secrecy check
  std::optional<std::pair<Precoders, RVec>> best;
  double best_wasr = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Precoders& Pn, const Evaluation& e) {
    if (e.violation <= opt.feasibility_tolerance && e.wasr > best_wasr) {
      best_wasr = e.wasr;
      best.emplace(Pn, e.common);
    }
  };
  consider(P, ev);

  conic::SolveOptions so;
  so.tolerance = opt.solve_tolerance;
  double wasr_prev = ev.wasr;
  for (int n = 1; n <= opt.max_outer; ++n) {
    if (secrecy_margin(ev.rates, spec) < 0.0) {
      // the previous update left the sample-average secrecy region; repair first
      try {
        P = restore(std::move(P), samples, spec, power, opt, n, run.trace);
        ev = evaluate(P, common, samples, spec, opt);
        common = ev.common;
      } catch (const Error& e) {
        if (n == 1 || e.code() == ErrorCode::InvalidArgument) throw;
        run.status = e.code() == ErrorCode::InfeasibleThresholds ? "restoration_stalled" : "solver_failure";
        break;
      }
    }
    const auto state = update_equalizers_and_weights(P, samples, opt.noise, opt.scheme);
    const auto avg = compute_averages(state, samples, opt.scheme);
    Precoders Pexp = P;

    RVec X_common = common;
    double J_prev = std::numeric_limits<double>::infinity();
    bool failed = false;
    for (int m = 1; m <= opt.max_inner; ++m) {
      auto sp = build_inner_subproblem(Pexp, avg, spec, power, opt);
      const auto out = conic::solve(sp.problem, so);
      if (!out.ok()) {
        if (n == 1 && m == 1)
          fail(ErrorCode::SolverFailure, std::string("inner subproblem: ") + conic::to_string(out.status) + " " +
                                             out.message);
        failed = true;
        break;
      }
      Pexp = sp.precoders(*out.primal);
      X_common = read_common(sp, *out.primal);
      const double J = out.objective;
      run.trace.push_back({"inner", n, m, J, evaluate(Pexp, X_common, samples, spec, opt).wasr, out.newton_steps});
      if (std::abs(J - J_prev) <= opt.inner_tolerance) break;
      J_prev = J;
    }
    if (failed) run.status = "solver_failure";

    // The eavesdropper rows use stale weights and can overshoot the true
    // secrecy region. From a feasible iterate, backtrack along the segment
    // until the point is feasible and no worse; the surrogate is first-order
    // exact at P so short steps eventually qualify.
    auto next_ev = evaluate(Pexp, X_common, samples, spec, opt);
    if (secrecy_margin(ev.rates, spec) >= 0.0) {
      const Precoders target = Pexp;
      const RVec target_common = X_common;
      auto ok = [&](const Evaluation& e) {
        return secrecy_margin(e.rates, spec) >= 0.0 && e.wasr >= ev.wasr - 1e-12;
      };
      bool accepted = ok(next_ev);
      for (double step = 0.5; !accepted && step >= 1.0 / 1024; step *= 0.5) {
        Pexp = Precoders(CMat(P.matrix() + step * (target.matrix() - P.matrix())));
        X_common = common + step * (target_common - common);
        next_ev = evaluate(Pexp, X_common, samples, spec, opt);
        accepted = ok(next_ev);
      }
      if (!accepted) {
        // no feasible ascent along the update: the iterate is a fixed point
        run.trace.push_back({"outer", n, 0, spec.weights.sum() - ev.wasr, ev.wasr, 0});
        fill_rates(run.trace.back(), ev);
        run.iterations = n;
        run.converged = true;
        break;
      }
    }
    P = std::move(Pexp);
    ev = next_ev;
    common = ev.common;
    // Sum_k u_k (xi_p,k^MMSE + X_k) at the refreshed weights
    const double outer_objective = spec.weights.sum() - ev.wasr;
    run.trace.push_back({"outer", n, 0, outer_objective, ev.wasr, 0});
    fill_rates(run.trace.back(), ev);
    run.iterations = n;
    consider(P, ev);
    if (failed) break;
    if (std::abs(ev.wasr - wasr_prev) <= opt.outer_tolerance) {
      run.converged = true;
      break;
    }
    wasr_prev = ev.wasr;
  }
  if (!run.converged && run.status == "ok") run.status = "not_converged";

  if (best && ev.violation > opt.feasibility_tolerance) {
    run.P = best->first;
    run.common = best->second;
  } else {
    run.P = std::move(P);
    run.common = common;
  }
  return run;
}

PrecoderSolution to_solution(const Precoders& P, const RVec& common, const std::vector<ChannelSet>& samples,
                             const SecrecySpec& spec, const AoOptions& opt) {
  const auto ev = evaluate(P, common, samples, spec, opt);
  PrecoderSolution sol;
  sol.scheme = opt.scheme;
  sol.csit = CsitMode::Imperfect;
  sol.precoders = P;
  sol.common_rates = ev.common;
  sol.rates = ev.rates;
  sol.weights = spec.weights;
  sol.thresholds = spec.thresholds;
  sol.wsr = ev.wasr;
  sol.max_secrecy_violation = ev.violation;
  sol.secrecy_ok = ev.violation <= opt.feasibility_tolerance;
  sol.status = sol.secrecy_ok ? "ok" : "secrecy_violation";
  return sol;
}

}  // namespace

PrecoderSolution solve_wesr_samples(const ChannelSet& estimate, const std::vector<ChannelSet>& samples,
                                    const SecrecySpec& spec, double power, const AoOptions& opt) {
  const std::size_t K = estimate.users();
  spec.validate(K);
  require(!samples.empty(), "need at least one channel sample");
  for (const auto& H : samples)
    require_dims(H.users() == K && H.antennas() == estimate.antennas(), "sample does not match the estimate");
  require(power > 0.0, "transmit power must be positive");
  require(opt.noise > 0.0, "noise variance must be positive");
  require(opt.outer_tolerance > 0.0 && opt.inner_tolerance > 0.0 && opt.max_outer >= 1 && opt.max_inner >= 1,
          "invalid stopping rule");
  for (std::size_t k = 0; k < K; ++k) {
    double cap = 0.0;
    for (const auto& H : samples) cap += single_user_capacity(H, k, power, opt.noise);
    cap /= static_cast<double>(samples.size());
    if (spec.thresholds(ei(k)) > cap)
      fail(ErrorCode::InfeasibleThresholds,
           "threshold of user " + std::to_string(k + 1) + " exceeds its average single-user capacity");
  }

  std::vector<PrecoderSolution> candidates;
  std::string last_failure;
  bool any_infeasible = false;

  auto attempt = [&](Precoders P0, RVec common, const std::string& origin, double kappa) {
    try {
      AoRun run = run_ao(std::move(P0), std::move(common), samples, spec, power, opt);
      auto sol = to_solution(run.P, run.common, samples, spec, opt);
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

  attempt(initial_precoders(estimate, power, opt.kappa, opt.scheme), RVec(), "cold", opt.kappa);

  for (const auto& ws : opt.warm_starts) {
    require_dims(ws.precoders.antennas() == estimate.antennas() && ws.precoders.users() == K,
                 "warm start does not match the channel dimensions");
    Precoders P = ws.precoders;
    RVec common = ws.common_rates;
    if (!has_common(opt.scheme)) {
      P.common().setZero();
      common = RVec::Zero(ei(K));
    }
    if (P.total_power() > power) P.matrix() *= std::sqrt(power / P.total_power());
    if (common.size() != ei(K)) common = RVec::Zero(ei(K));

    auto as_is = to_solution(P, common, samples, spec, opt);
    as_is.origin = ws.label + "-as-is";
    as_is.initial_wsr = as_is.wsr;
    as_is.converged = true;
    candidates.push_back(as_is);

    if (has_common(opt.scheme) && P.common().squaredNorm() <= 1e-9 * power) {
      const double used = std::max(P.total_power(), 1e-3 * power);
      Eigen::JacobiSVD<CMat> svd(estimate.matrix(), Eigen::ComputeThinU);
      for (std::size_t k = 0; k < K; ++k) P.priv(k) *= std::sqrt(0.9);
      P.common() = std::sqrt(0.1 * used) * svd.matrixU().col(0);
      common = RVec();
    }
    attempt(P, common, ws.label, 0.0);
  }

  auto best_feasible = [&]() -> const PrecoderSolution* {
    const PrecoderSolution* best = nullptr;
    for (const auto& c : candidates)
      if (c.secrecy_ok && (!best || c.wsr > best->wsr)) best = &c;
    return best;
  };
  if (!best_feasible()) {
    for (double kappa : opt.fallback_kappas) {
      attempt(initial_precoders(estimate, power, kappa, opt.scheme), RVec(), "kappa=" + std::to_string(kappa), kappa);
      if (best_feasible()) break;
    }
  }
  if (const auto* best = best_feasible()) return *best;
  if (candidates.empty()) {
    if (any_infeasible) fail(ErrorCode::InfeasibleThresholds, last_failure);
    fail(ErrorCode::SolverFailure, last_failure);
  }
  const PrecoderSolution* least = &candidates.front();
  for (const auto& c : candidates)
    if (c.max_secrecy_violation < least->max_secrecy_violation) least = &c;
  return *least;
}

PrecoderSolution solve_wesr(const CsitModel& model, const SecrecySpec& spec, double power, const AoOptions& opt) {
  const auto samples = sample_csit(model, opt.samples, opt.seed);
  return solve_wesr_samples(model.estimate, samples, spec, power, opt);
}

}  // namespace secrsma
