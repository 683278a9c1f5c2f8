#pragma once

// Secure multi-user linear precoding: the rate-splitting formulations with the
// common stream removed, plus drivers that solve both schemes side by side so
// the comparison inherits the feasible-set nesting.

#include <vector>

#include "secrsma/sca.hpp"
#include "secrsma/wmmse.hpp"

namespace secrsma {

PrecoderSolution solve_mulp_wsr(const ChannelSet& channels, const SecrecySpec& spec, double power,
                                ScaOptions options = {});
PrecoderSolution solve_mulp_wesr(const CsitModel& model, const SecrecySpec& spec, double power,
                                 AoOptions options = {});

/// One channel instance as both solvers see it.
struct Instance {
  CsitMode csit = CsitMode::Perfect;
  ChannelSet channels;  // the true channel, or the estimate under imperfect CSIT
  double error_variance = 0.0;
  double power = 1.0;
};

struct SolverOptions {
  ScaOptions sca;
  AoOptions ao;
  /// solve_pair also starts both schemes from full-power MRT to each single
  /// user; with closely aligned users the equal-split start alone tends to
  /// stall MULP well below the single-user rate.
  bool single_user_starts = true;
};

/// A failed solve still yields a row: status carries the reason, wsr is NaN.
PrecoderSolution failed_solution(Scheme scheme, CsitMode csit, const SecrecySpec& spec, const Error& e);

/// Runs `scheme` on the instance; errors become failed solutions.
PrecoderSolution solve_scheme(const Instance& inst, Scheme scheme, const SecrecySpec& spec,
                              const SolverOptions& options, const std::vector<WarmStart>& warm = {});

struct SchemePair {
  PrecoderSolution rs, mulp;
};

/// MULP first, then RS warm-started from it (and from `warm`).
SchemePair solve_pair(const Instance& inst, const SecrecySpec& spec, const SolverOptions& options,
                      const std::vector<WarmStart>& rs_warm = {}, const std::vector<WarmStart>& mulp_warm = {});

/// Solves every threshold in `thresholds` (common to all users). With
/// continuation the thresholds are visited from the largest down and each
/// solve is warm-started from the previous (stricter) solution, which makes
/// the optimised WSR nonincreasing in the threshold; thresholds left without a
/// secure point are then retried upward from the next looser solution, and a
/// stricter solution replaces a weaker one below it. Results follow the
/// input order.
std::vector<SchemePair> solve_threshold_path(const Instance& inst, const RVec& weights,
                                             const std::vector<double>& thresholds, const SolverOptions& options,
                                             bool continuation = true);

}  // namespace secrsma
