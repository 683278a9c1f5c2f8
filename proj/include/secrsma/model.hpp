#pragma once

// Channel, precoder and rate types for the 1-layer rate-splitting broadcast
// channel in which every user also eavesdrops on the other private streams.

#include <cstdint>
#include <span>
#include <vector>

#include "secrsma/common.hpp"

namespace secrsma {

/// Column k of the stored matrix is h_k (length N_t). Immutable after
/// construction.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(CMat columns);
  explicit ChannelSet(const std::vector<CVec>& users);

  std::size_t users() const { return static_cast<std::size_t>(H_.cols()); }
  std::size_t antennas() const { return static_cast<std::size_t>(H_.rows()); }
  auto h(std::size_t k) const { return H_.col(static_cast<Eigen::Index>(k)); }
  const CMat& matrix() const { return H_; }

  /// True when every entry has zero imaginary part.
  bool is_real() const;

  bool operator==(const ChannelSet& o) const { return H_ == o.H_; }

 private:
  CMat H_;
};

/// Imperfect-CSIT description around a (normalised) channel estimate.
struct CsitModel {
  ChannelSet estimate;
  double error_variance = 0.0;
  double quality = 1.0;  // gamma_e
  double scaling = 0.6;  // delta
  double power = 1.0;    // P_t, linear

  /// sigma_e^2 = gamma_e * P_t^(-delta).
  static CsitModel from_quality(ChannelSet estimate, double gamma_e, double delta, double power);
  static CsitModel with_variance(ChannelSet estimate, double variance);
};

/// Column 0 is the common precoder p_c, column k (1-based) is p_k.
class Precoders {
 public:
  Precoders() = default;
  Precoders(std::size_t antennas, std::size_t users) : P_(CMat::Zero(antennas, users + 1)) {}
  explicit Precoders(CMat P) : P_(std::move(P)) {}

  std::size_t users() const { return static_cast<std::size_t>(P_.cols()) - 1; }
  std::size_t antennas() const { return static_cast<std::size_t>(P_.rows()); }

  auto common() { return P_.col(0); }
  auto common() const { return P_.col(0); }
  auto priv(std::size_t k) { return P_.col(static_cast<Eigen::Index>(k) + 1); }
  auto priv(std::size_t k) const { return P_.col(static_cast<Eigen::Index>(k) + 1); }
  const CMat& matrix() const { return P_; }
  CMat& matrix() { return P_; }

  /// tr(P P^H)
  double total_power() const { return P_.squaredNorm(); }

 private:
  CMat P_;
};

/// Rates in bits per channel use. wiretap(k, j) is the rate at which user j
/// decodes user k's private stream; the diagonal is unused and zero.
struct RateSummary {
  RVec common;
  RVec priv;
  RMat wiretap;
  RVec secrecy;

  double min_common() const;
};

struct RateBreakdown {
  RVec sinr_common;
  RVec sinr_private;
  RMat sinr_wiretap;  // (k, j): user k's private stream at user j
  double noise = 1.0;
  RateSummary rates;
};

struct SecrecySpec {
  RVec thresholds;
  RVec weights;

  static SecrecySpec uniform(std::size_t users, double threshold);
  static SecrecySpec with_weights(std::vector<double> weights, double threshold);
  void validate(std::size_t users) const;
};

RateBreakdown compute_sinrs(const ChannelSet& channels, const Precoders& precoders, double noise);

/// R_s,k = [R_p,k - max_{j != k} R_{k,j}]^+
RVec secrecy_rates(const RVec& priv, const RMat& wiretap);

/// sum_k u_k (C_k + R_p,k)
double wsr(const RateSummary& rates, const RVec& common_rates, const RVec& weights);

/// Largest weighted sum achievable by splitting `common_rate` across users:
/// the whole common rate goes to the heaviest user.
double best_common_share(double common_rate, const RVec& weights);

// ---- channel generation ----------------------------------------------------

/// h_1 = [1, ..., 1]^H, h_2 = gamma [1, e^{j theta}, ..., e^{j (Nt-1) theta}]^H.
/// N_t > 2 extends the two-antenna form with a uniform-linear-array phase ramp.
ChannelSet specific_channels(double gamma, double theta, std::size_t antennas);

/// Entries i.i.d. CN(0, 1): real and imaginary parts N(0, 1/2).
ChannelSet random_channels(std::size_t users, std::size_t antennas, std::uint64_t seed);

/// i.i.d. N(0, 1) real entries; the input family of the grid oracle.
ChannelSet random_real_channels(std::size_t users, std::size_t antennas, std::uint64_t seed);

/// H^(m) = sqrt(1 - s^2) Hhat + sqrt(s^2) Htilde^(m), Htilde entries CN(0, 1).
std::vector<ChannelSet> sample_csit(const CsitModel& model, std::size_t samples, std::uint64_t seed);

/// Deterministic per-trial seed: splitmix64 mixing of (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace secrsma
