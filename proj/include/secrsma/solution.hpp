#pragma once

#include <string>
#include <vector>

#include "secrsma/model.hpp"

namespace secrsma {

/// One line of a convergence trace. The SCA solver uses `outer` only; the
/// alternating solver records inner solves with inner >= 1 and one
/// summary record per outer update with inner == 0.
struct TraceRecord {
  std::string phase;  // "sca", "restoration", "inner", "outer"
  int outer = 0;
  int inner = 0;
  double objective = 0.0;  // surrogate objective of the subproblem just solved
  double wsr = 0.0;        // true (or sample-average) weighted sum rate at the iterate
  int newton_steps = 0;
  RVec common, priv, secrecy;  // per-user rates at the iterate; outer records only
};

struct PrecoderSolution {
  Scheme scheme = Scheme::RS;
  CsitMode csit = CsitMode::Perfect;
  Precoders precoders;
  RVec common_rates;  // c; averaged rates for imperfect CSIT
  RVec weights;
  RVec thresholds;
  RateSummary rates;  // instantaneous, or sample-average for imperfect CSIT
  double wsr = 0.0;
  double initial_wsr = 0.0;
  std::vector<TraceRecord> trace;
  int iterations = 0;
  bool converged = false;
  bool secrecy_ok = false;
  double max_secrecy_violation = 0.0;  // max_k (R_th,k - R_s,k)^+
  double kappa = 0.0;
  std::string origin;  // which start produced the returned point
  std::string status;  // "ok", "secrecy_violation", "not_converged", ...

  double power_common() const { return precoders.common().squaredNorm(); }
  double power_private() const { return precoders.total_power() - power_common(); }
};

/// A previously obtained point used to seed an iterative solve.
struct WarmStart {
  Precoders precoders;
  RVec common_rates;
  std::string label = "warm";
};

/// (R_th,k - R_s,k)^+ maximised over users with a positive threshold.
double secrecy_violation(const RVec& secrecy, const RVec& thresholds);

}  // namespace secrsma
