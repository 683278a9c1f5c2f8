#include "secrsma/mulp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace secrsma {

PrecoderSolution solve_mulp_wsr(const ChannelSet& channels, const SecrecySpec& spec, double power,
                                ScaOptions options) {
  options.scheme = Scheme::MULP;
  return solve_wsr(channels, spec, power, options);
}

PrecoderSolution solve_mulp_wesr(const CsitModel& model, const SecrecySpec& spec, double power, AoOptions options) {
  options.scheme = Scheme::MULP;
  return solve_wesr(model, spec, power, options);
}

PrecoderSolution failed_solution(Scheme scheme, CsitMode csit, const SecrecySpec& spec, const Error& e) {
  PrecoderSolution s;
  s.scheme = scheme;
  s.csit = csit;
  s.weights = spec.weights;
  s.thresholds = spec.thresholds;
  s.wsr = std::numeric_limits<double>::quiet_NaN();
  s.initial_wsr = s.wsr;
  s.status = e.code() == ErrorCode::InfeasibleThresholds ? "infeasible" : "solver_failure";
  s.origin = e.what();
  return s;
}

PrecoderSolution solve_scheme(const Instance& inst, Scheme scheme, const SecrecySpec& spec,
                              const SolverOptions& options, const std::vector<WarmStart>& warm) {
  try {
    if (inst.csit == CsitMode::Perfect) {
      ScaOptions o = options.sca;
      o.scheme = scheme;
      o.warm_starts.insert(o.warm_starts.end(), warm.begin(), warm.end());
      return solve_wsr(inst.channels, spec, inst.power, o);
    }
    AoOptions o = options.ao;
    o.scheme = scheme;
    o.warm_starts.insert(o.warm_starts.end(), warm.begin(), warm.end());
    return solve_wesr(CsitModel::with_variance(inst.channels, inst.error_variance), spec, inst.power, o);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InfeasibleThresholds && e.code() != ErrorCode::SolverFailure) throw;
    return failed_solution(scheme, inst.csit, spec, e);
  }
}

namespace {

bool usable(const PrecoderSolution& s) { return s.secrecy_ok && s.precoders.users() > 0; }

WarmStart as_warm(const PrecoderSolution& s, const std::string& label) {
  return WarmStart{s.precoders, s.common_rates, label};
}

}  // namespace

SchemePair solve_pair(const Instance& inst, const SecrecySpec& spec, const SolverOptions& options,
                      const std::vector<WarmStart>& rs_warm, const std::vector<WarmStart>& mulp_warm) {
  SchemePair out;
  std::vector<WarmStart> mulp_starts = mulp_warm, warm = rs_warm;
  if (options.single_user_starts && inst.channels.users() > 1)
    for (std::size_t k = 0; k < inst.channels.users(); ++k) {
      Precoders P(inst.channels.antennas(), inst.channels.users());
      const CVec h = inst.channels.h(k);
      if (h.norm() == 0.0) continue;
      P.priv(k) = std::sqrt(inst.power) * h / h.norm();
      WarmStart w{P, RVec::Zero(static_cast<Eigen::Index>(inst.channels.users())), "user" + std::to_string(k + 1)};
      mulp_starts.push_back(w);
      warm.push_back(w);
    }
  out.mulp = solve_scheme(inst, Scheme::MULP, spec, options, mulp_starts);
  if (usable(out.mulp)) warm.push_back(as_warm(out.mulp, "mulp"));
  out.rs = solve_scheme(inst, Scheme::RS, spec, options, warm);
  return out;
}

std::vector<SchemePair> solve_threshold_path(const Instance& inst, const RVec& weights,
                                             const std::vector<double>& thresholds, const SolverOptions& options,
                                             bool continuation) {
  const auto K = static_cast<std::size_t>(weights.size());
  std::vector<std::size_t> order(thresholds.size());
  std::iota(order.begin(), order.end(), 0);
  if (continuation)
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return thresholds[a] > thresholds[b]; });

  std::vector<SchemePair> out(thresholds.size());
  const SchemePair* previous = nullptr;
  for (std::size_t idx : order) {
    SecrecySpec spec;
    spec.weights = weights;
    spec.thresholds = RVec::Constant(static_cast<Eigen::Index>(K), thresholds[idx]);
    std::vector<WarmStart> rs_warm, mulp_warm;
    if (continuation && previous) {
      if (usable(previous->rs)) rs_warm.push_back(as_warm(previous->rs, "continuation"));
      if (usable(previous->mulp)) mulp_warm.push_back(as_warm(previous->mulp, "continuation"));
    }
    out[idx] = solve_pair(inst, spec, options, rs_warm, mulp_warm);
    previous = &out[idx];
  }
  if (!continuation) return out;

  auto spec_at = [&](double rth) {
    SecrecySpec spec;
    spec.weights = weights;
    spec.thresholds = RVec::Constant(static_cast<Eigen::Index>(K), rth);
    return spec;
  };

  // Climbing back up: a threshold whose own starts never reached the secrecy
  // region is retried from the solution one step below, which is usually far
  // closer to it than any cold start.
  SolverOptions retry = options;
  retry.single_user_starts = false;
  const PrecoderSolution *rs_below = nullptr, *mulp_below = nullptr;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& cur = out[*it];
    if ((!usable(cur.rs) && rs_below) || (!usable(cur.mulp) && mulp_below)) {
      std::vector<WarmStart> rs_warm, mulp_warm;
      if (rs_below) rs_warm.push_back(as_warm(*rs_below, "continuation-up"));
      if (mulp_below) {
        mulp_warm.push_back(as_warm(*mulp_below, "continuation-up"));
        rs_warm.push_back(as_warm(*mulp_below, "continuation-up"));
      }
      auto again = solve_pair(inst, spec_at(thresholds[*it]), retry, rs_warm, mulp_warm);
      if (!usable(cur.mulp) && usable(again.mulp)) cur.mulp = std::move(again.mulp);
      if (!usable(cur.rs) && usable(again.rs)) cur.rs = std::move(again.rs);
    }
    if (usable(cur.rs)) rs_below = &cur.rs;
    if (usable(cur.mulp)) mulp_below = &cur.mulp;
  }

  // Going down again: a point that meets a stricter threshold meets every
  // looser one, so it replaces a weaker (or missing) solution there.
  auto carry = [&](PrecoderSolution& cur, const PrecoderSolution* above, double rth) {
    if (!above || (usable(cur) && cur.wsr >= above->wsr)) return;
    cur = *above;
    cur.thresholds = RVec::Constant(static_cast<Eigen::Index>(K), rth);
    cur.origin = "stricter threshold";
  };
  const PrecoderSolution *rs_above = nullptr, *mulp_above = nullptr;
  for (std::size_t idx : order) {
    auto& cur = out[idx];
    carry(cur.rs, rs_above, thresholds[idx]);
    carry(cur.mulp, mulp_above, thresholds[idx]);
    if (usable(cur.rs)) rs_above = &cur.rs;
    if (usable(cur.mulp)) mulp_above = &cur.mulp;
  }
  return out;
}

}  // namespace secrsma
