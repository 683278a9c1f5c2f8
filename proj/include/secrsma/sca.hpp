#pragma once

// Successive convex approximation for weighted sum-rate maximisation under
// per-user secrecy-rate constraints with perfect channel knowledge.

#include <optional>
#include <string_view>
#include <vector>

#include "secrsma/conic.hpp"
#include "secrsma/model.hpp"
#include "secrsma/solution.hpp"

namespace secrsma {

/// How the bilinear eavesdropper-SINR bound is convexified.
///  AsPrinted         rho^[n] * (linearised interference) + rho * (interference^[n] + noise)
///                    >= |h_j^H p_k|^2. Exact for two users (empty interference set).
///  ConservativeCone  |h_j^H p_k|^2 <= rho * b, b <= linearised interference + noise.
///                    A true inner approximation for any K.
enum class WiretapSurrogate { AsPrinted, ConservativeCone };

struct ScaOptions {
  Scheme scheme = Scheme::RS;
  double tolerance = 1e-4;  // |WSR^[n] - WSR^[n-1]| stopping threshold
  int max_iterations = 200;
  double kappa = 0.5;  // common-stream power share of the cold start
  /// Tried in order when no candidate satisfies the secrecy check.
  std::vector<double> fallback_kappas = {0.2, 0.8};
  double solve_tolerance = 1e-8;
  double feasibility_tolerance = 1e-3;
  double noise = 1.0;
  WiretapSurrogate wiretap = WiretapSurrogate::AsPrinted;
  std::vector<WarmStart> warm_starts;
  int max_restoration_iterations = 100;
};

/// Iterate of the SCA loop; also the expansion point of the next subproblem.
/// Per-user vectors have length K; (k, j) matrices are K x K with the
/// diagonal unused. Common-stream entries are empty under MULP.
struct ScaState {
  int iteration = 0;
  Precoders P;
  RVec common;  // C_k
  RVec alpha_c, alpha_p, rho_c, rho_p, beta_c, beta_p;
  RMat alpha_w, rho_w, beta_w;  // user k's stream at eavesdropper j
  double objective = 0.0;       // sum_k u_k (C_k + alpha_p,k)
};

/// p_c = sqrt(kappa Pt) u_c (top left singular vector of H),
/// p_k = sqrt((1 - kappa) Pt / K) h_k / ||h_k||. MULP forces kappa = 0.
Precoders initial_precoders(const ChannelSet& channels, double power, double kappa, Scheme scheme);

/// Auxiliary variables evaluated with equality at P. An empty `common`
/// splits min_k R_c,k evenly (zero under MULP).
ScaState state_from_precoders(const ChannelSet& channels, const Precoders& P, const RVec& common,
                              const RVec& weights, double noise, Scheme scheme);

ScaState initialize(const ChannelSet& channels, double power, double kappa, const RVec& weights,
                    double noise = 1.0, Scheme scheme = Scheme::RS);

/// The convex subproblem around a state, with the variable layout needed to
/// read a solution back.
struct ScaSubproblem {
  conic::ConicProblem problem;
  std::optional<conic::ComplexVar> pc;
  std::vector<conic::ComplexVar> pk;
  std::vector<conic::Index> C, alpha_c, alpha_p, rho_c, rho_p, beta_c, beta_p;
  std::vector<std::vector<conic::Index>> alpha_w, rho_w, beta_w;  // -1 when absent
  std::optional<conic::Index> slack;  // restoration only

  /// Number of blocks whose tag equals `tag`.
  std::size_t count(std::string_view tag) const;
};

/// `restoration` replaces the objective by the largest secrecy shortfall.
ScaSubproblem build_subproblem(const ScaState& state, const ChannelSet& channels, const SecrecySpec& spec,
                               double power, const ScaOptions& options, bool restoration = false);

/// Read a solved subproblem back into a state (objective recomputed).
ScaState extract_state(const ScaSubproblem& sub, const RVec& x, const RVec& weights, int iteration);

/// One SCA step. Throws Error(SolverFailure) when the subproblem solve fails.
ScaState iterate(const ScaState& state, const ChannelSet& channels, const SecrecySpec& spec, double power,
                 const ScaOptions& options, int* newton_steps = nullptr);

/// The full SCA solve with feasibility restoration, warm starts and the
/// post-hoc secrecy check. Throws Error(InfeasibleThresholds) when no start
/// can be made feasible.
PrecoderSolution solve_wsr(const ChannelSet& channels, const SecrecySpec& spec, double power,
                           const ScaOptions& options = {});

/// Largest rate user k could get alone: log2(1 + Pt ||h_k||^2 / noise).
double single_user_capacity(const ChannelSet& channels, std::size_t k, double power, double noise);

}  // namespace secrsma
