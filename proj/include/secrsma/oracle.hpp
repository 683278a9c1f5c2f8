#pragma once

// Independent checks: exhaustive search over real 2x2 precoders, sampled
// probes of the first-order surrogates, and the rate/WMMSE identities.

#include <cstdint>
#include <string>

#include "secrsma/model.hpp"

namespace secrsma {

struct GridSpec {
  double power_step = 0.05;  // fraction of P_t per grid step; 1 / power_step must be an integer
  int angle_steps = 32;      // phi in {0, pi / n, ..., (n - 1) pi / n}
  unsigned threads = 1;
};

struct OracleResult {
  bool feasible = false;
  double wsr = 0.0;
  Precoders precoders;
  RVec common_rates;
  std::uint64_t evaluated = 0;
};

/// Best secrecy-feasible WSR over p_i = sqrt(q_i) [cos phi_i, sin phi_i] with
/// q_c + q_1 + q_2 <= P_t on the grid. Requires K = N_t = 2 and real channels.
OracleResult grid_oracle_wsr(const ChannelSet& channels, const SecrecySpec& spec, double power,
                             const GridSpec& grid = {}, double noise = 1.0);

struct TaylorReport {
  std::size_t samples = 0;
  double exp_violation = 0.0;      // 2^a0 (1 + ln2 (a - a0)) - 2^a
  double ratio_violation = 0.0;    // tangent minus |h^H p|^2 / beta
  double wiretap_violation = 0.0;  // linearised minus true averaged eavesdropper WMSE
  double tangency = 0.0;           // largest |surrogate - function| at the expansion point
  // diagonal probe of the bilinear eavesdropper bound: true SINR minus the
  // smallest rho the surrogate admits (positive means the surrogate is loose
  // in the unsafe direction); three users so the interference set is nonempty
  std::size_t wiretap_sinr_probes = 0;
  std::size_t wiretap_sinr_exceed = 0;
  double wiretap_sinr_worst = 0.0;

  std::string summary() const;
};

TaylorReport check_taylor_bounds(std::size_t samples, std::uint64_t seed);

struct RateWmmseReport {
  std::size_t instances = 0;
  double identity_residual = 0.0;  // max |xi^MMSE - (1 - R)|
  double zero_precoder_residual = 0.0;
  std::size_t equalizer_probes = 0, equalizer_violations = 0;
  std::size_t weight_probes = 0, weight_violations = 0;

  std::string summary() const;
};

/// Random complex instances with K in {2, 3}, N_t in {2, 4}.
RateWmmseReport check_rate_wmmse(std::size_t instances, std::uint64_t seed, std::size_t equalizer_probes = 100,
                                 std::size_t weight_grid = 100);

}  // namespace secrsma
