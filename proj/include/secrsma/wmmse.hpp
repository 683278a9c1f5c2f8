#pragma once

// Weighted-MMSE reformulation of sample-average rates and the alternating
// (equalizer/weight update, then SCA over precoders) algorithm for
// secrecy-constrained average sum-rate maximisation under imperfect CSIT.
//
// WMSE convention: xi = s * omega * eps - log2(omega) + (1 - s) with
// s = 1 / ln 2. The scale makes omega = 1 / eps the exact minimiser, so
// min xi = 1 - R holds in bits; the weight update and the rate identity are
// the familiar ones.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "secrsma/conic.hpp"
#include "secrsma/model.hpp"
#include "secrsma/solution.hpp"

namespace secrsma {

inline constexpr double kWmseScale = 1.4426950408889634;  // 1 / ln 2

/// Closed-form receiver quantities of one stream at one receiver.
struct StreamMmse {
  cplx g;             // MMSE equalizer
  double omega = 1;   // MMSE weight 1 / eps
  double eps = 1;     // I / T
  double T = 1;       // received power incl. the stream
  double I = 1;       // T minus the stream's own power
  cplx signal;        // h^H p of the decoded stream
};

/// All streams of one channel realisation. wiretap[k][j] is user k's private
/// stream decoded at user j; common is empty under MULP.
struct MmseSample {
  std::vector<StreamMmse> common;
  std::vector<StreamMmse> priv;
  std::vector<std::vector<StreamMmse>> wiretap;
};

struct MmseState {
  std::vector<MmseSample> samples;
};

MmseSample mmse_sample(const ChannelSet& channels, const Precoders& P, double noise, Scheme scheme);
MmseState update_equalizers_and_weights(const Precoders& P, const std::vector<ChannelSet>& samples, double noise,
                                        Scheme scheme = Scheme::RS);

/// eps(g) = |g|^2 T - 2 Re{g h^H p} + 1
double mse(cplx g, double T, cplx signal);
/// xi(omega, eps) in the rescaled convention above.
double wmse(double omega, double eps);

/// |xi^MMSE - (1 - R)| per stream for one realisation.
struct RateWmmseGap {
  RVec common, priv;
  RMat wiretap;
  double max() const;
};
RateWmmseGap rate_wmmse_gap(const ChannelSet& channels, const Precoders& P, double noise, Scheme scheme = Scheme::RS);

/// Sample means of t = omega |g|^2, Psi = t h h^H, f = omega g^* h,
/// u = omega and v = log2(omega) for one stream.
struct AveragedStream {
  double t = 0.0;
  CMat Psi;
  CVec f;
  double u = 0.0;
  double v = 0.0;
};

struct AveragedCoefficients {
  std::vector<AveragedStream> common, priv;
  std::vector<std::vector<AveragedStream>> wiretap;  // [k][j]
};

AveragedCoefficients compute_averages(const MmseState& state, const std::vector<ChannelSet>& samples,
                                      Scheme scheme = Scheme::RS);

/// Averaged WMSE of a stream at P: quadratic in the interfering-plus-own
/// precoders `streams`, linear in the decoded stream's precoder `signal`.
double averaged_wmse(const AveragedStream& a, const std::vector<CVec>& streams, const CVec& signal, double noise);

/// First-order lower bound of the averaged eavesdropper WMSE around P0.
double linearized_wiretap_wmse(const AveragedStream& a, const Precoders& P, const Precoders& P0, std::size_t k,
                               std::size_t j, double noise);

/// Sample-average rates over the realisations.
RateSummary saf_rates(const Precoders& P, const std::vector<ChannelSet>& samples, double noise);

struct AoOptions {
  Scheme scheme = Scheme::RS;
  double outer_tolerance = 1e-4;  // |WASR^[n] - WASR^[n-1]|
  double inner_tolerance = 1e-5;  // |J^[m] - J^[m-1]| of the inner objective
  int max_outer = 200;
  int max_inner = 50;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double kappa = 0.5;
  std::vector<double> fallback_kappas = {0.2, 0.8};
  double solve_tolerance = 1e-8;
  double feasibility_tolerance = 1e-3;
  double noise = 1.0;
  std::vector<WarmStart> warm_starts;
  int max_restoration_iterations = 100;
};

/// The convex inner problem around expansion point P0 with fixed averages.
struct AoSubproblem {
  conic::ConicProblem problem;
  std::optional<conic::ComplexVar> pc;
  std::vector<conic::ComplexVar> pk;
  std::vector<conic::Index> tau, X;
  std::vector<std::vector<conic::Index>> alpha;  // [k][j], -1 when absent
  std::optional<conic::Index> slack;

  std::size_t count(std::string_view tag) const;
  Precoders precoders(const RVec& x) const;
};

AoSubproblem build_inner_subproblem(const Precoders& P0, const AveragedCoefficients& avg, const SecrecySpec& spec,
                                    double power, const AoOptions& options, bool restoration = false);

/// The alternating solver on a fixed sample set drawn around `estimate`.
PrecoderSolution solve_wesr_samples(const ChannelSet& estimate, const std::vector<ChannelSet>& samples,
                                    const SecrecySpec& spec, double power, const AoOptions& options = {});

/// Draws options.samples realisations from the model (seed options.seed) and
/// runs solve_wesr_samples.
PrecoderSolution solve_wesr(const CsitModel& model, const SecrecySpec& spec, double power,
                            const AoOptions& options = {});

}  // namespace secrsma
