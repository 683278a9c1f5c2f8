#include "secrsma/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace secrsma {

ChannelSet::ChannelSet(CMat columns) : H_(std::move(columns)) {
  require(H_.cols() >= 1, "channel set needs at least one user");
  require(H_.rows() >= 1, "channel set needs at least one antenna");
  require(H_.allFinite(), "channel entries must be finite");
}

ChannelSet::ChannelSet(const std::vector<CVec>& users) {
  require(!users.empty(), "channel set needs at least one user");
  const auto nt = users.front().size();
  H_.resize(nt, static_cast<Eigen::Index>(users.size()));
  for (std::size_t k = 0; k < users.size(); ++k) {
    require_dims(users[k].size() == nt, "all channel vectors must have length N_t");
    H_.col(static_cast<Eigen::Index>(k)) = users[k];
  }
  require(nt >= 1, "channel set needs at least one antenna");
  require(H_.allFinite(), "channel entries must be finite");
}

bool ChannelSet::is_real() const { return H_.imag().cwiseAbs().maxCoeff() == 0.0; }

CsitModel CsitModel::from_quality(ChannelSet estimate, double gamma_e, double delta, double power) {
  require(gamma_e >= 0.0 && delta >= 0.0 && power > 0.0, "CSIT quality parameters must be nonnegative");
  CsitModel m;
  m.estimate = std::move(estimate);
  m.quality = gamma_e;
  m.scaling = delta;
  m.power = power;
  m.error_variance = gamma_e * std::pow(power, -delta);
  return m;
}

CsitModel CsitModel::with_variance(ChannelSet estimate, double variance) {
  require(variance >= 0.0, "error variance must be nonnegative");
  CsitModel m;
  m.estimate = std::move(estimate);
  m.error_variance = variance;
  return m;
}

double RateSummary::min_common() const { return common.size() ? common.minCoeff() : 0.0; }

SecrecySpec SecrecySpec::uniform(std::size_t users, double threshold) {
  SecrecySpec s;
  s.thresholds = RVec::Constant(static_cast<Eigen::Index>(users), threshold);
  s.weights = RVec::Constant(static_cast<Eigen::Index>(users), 1.0 / static_cast<double>(users));
  return s;
}

SecrecySpec SecrecySpec::with_weights(std::vector<double> weights, double threshold) {
  SecrecySpec s;
  s.weights = Eigen::Map<const RVec>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  s.thresholds = RVec::Constant(s.weights.size(), threshold);
  return s;
}

void SecrecySpec::validate(std::size_t users) const {
  const auto k = static_cast<Eigen::Index>(users);
  require_dims(thresholds.size() == k && weights.size() == k, "secrecy spec length must equal K");
  require((thresholds.array() >= 0.0).all(), "secrecy thresholds must be nonnegative");
  require((weights.array() >= 0.0).all(), "user weights must be nonnegative");
  require(weights.maxCoeff() > 0.0, "at least one user weight must be positive");
}

RateBreakdown compute_sinrs(const ChannelSet& channels, const Precoders& precoders, double noise) {
  require(noise > 0.0, "noise variance must be positive");
  require_dims(precoders.antennas() == channels.antennas(), "precoder length must equal N_t");
  require_dims(precoders.users() == channels.users(), "one private precoder per user required");

  const auto K = static_cast<Eigen::Index>(channels.users());
  // gains(k, i) = |h_k^H p_i|^2, column 0 is the common stream
  const RMat gains = (channels.matrix().adjoint() * precoders.matrix()).cwiseAbs2();

  RateBreakdown out;
  out.noise = noise;
  out.sinr_common.resize(K);
  out.sinr_private.resize(K);
  out.sinr_wiretap = RMat::Zero(K, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double priv_total = gains.row(k).tail(K).sum();
    out.sinr_common(k) = gains(k, 0) / (priv_total + noise);
    const double priv_interf = priv_total - gains(k, k + 1);
    out.sinr_private(k) = gains(k, k + 1) / (priv_interf + noise);
  }
  // user j eavesdrops user k after removing the common stream and s_j
  for (Eigen::Index j = 0; j < K; ++j) {
    const double residual = gains.row(j).tail(K).sum() - gains(j, j + 1);
    for (Eigen::Index k = 0; k < K; ++k) {
      if (k == j) continue;
      out.sinr_wiretap(k, j) = gains(j, k + 1) / (residual - gains(j, k + 1) + noise);
    }
  }

  auto rate = [](double sinr) { return std::log2(1.0 + sinr); };
  out.rates.common = out.sinr_common.unaryExpr(rate);
  out.rates.priv = out.sinr_private.unaryExpr(rate);
  out.rates.wiretap = out.sinr_wiretap.unaryExpr(rate);
  out.rates.secrecy = secrecy_rates(out.rates.priv, out.rates.wiretap);
  return out;
}

RVec secrecy_rates(const RVec& priv, const RMat& wiretap) {
  const auto K = priv.size();
  require_dims(wiretap.rows() == K && wiretap.cols() == K, "wiretap matrix must be K x K");
  RVec out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < K; ++j)
      if (j != k) worst = std::max(worst, wiretap(k, j));
    out(k) = std::max(0.0, priv(k) - worst);
  }
  return out;
}

double wsr(const RateSummary& rates, const RVec& common_rates, const RVec& weights) {
  const auto K = rates.priv.size();
  require_dims(common_rates.size() == K && weights.size() == K, "wsr inputs must have length K");
  require((common_rates.array() >= 0.0).all(), "common-rate allocation must be nonnegative");
  return weights.dot(common_rates + rates.priv);
}

double best_common_share(double common_rate, const RVec& weights) {
  return weights.maxCoeff() * std::max(0.0, common_rate);
}

// ---------------------------------------------------------------------------

ChannelSet specific_channels(double gamma, double theta, std::size_t antennas) {
  require(gamma > 0.0, "relative channel strength gamma must be positive");
  require(antennas >= 1, "need at least one antenna");
  const auto nt = static_cast<Eigen::Index>(antennas);
  CMat H(nt, 2);
  for (Eigen::Index n = 0; n < nt; ++n) {
    H(n, 0) = 1.0;
    // [1, e^{j theta}, ...]^H, i.e. the conjugated phase ramp
    H(n, 1) = gamma * std::polar(1.0, -static_cast<double>(n) * theta);
  }
  return ChannelSet(std::move(H));
}

namespace {

CMat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  CMat out(rows, cols);
  // column-major fill keeps the draw order stable across Eigen versions
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = half(rng);
      const double im = half(rng);
      out(r, c) = cplx(re, im);
    }
  return out;
}

}  // namespace

ChannelSet random_channels(std::size_t users, std::size_t antennas, std::uint64_t seed) {
  require(users >= 1 && antennas >= 1, "K and N_t must be at least 1");
  std::mt19937_64 rng(seed);
  return ChannelSet(gaussian_matrix(static_cast<Eigen::Index>(antennas), static_cast<Eigen::Index>(users), rng));
}

ChannelSet random_real_channels(std::size_t users, std::size_t antennas, std::uint64_t seed) {
  require(users >= 1 && antennas >= 1, "K and N_t must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  CMat H(static_cast<Eigen::Index>(antennas), static_cast<Eigen::Index>(users));
  for (Eigen::Index c = 0; c < H.cols(); ++c)
    for (Eigen::Index r = 0; r < H.rows(); ++r) H(r, c) = unit(rng);
  return ChannelSet(std::move(H));
}

std::vector<ChannelSet> sample_csit(const CsitModel& model, std::size_t samples, std::uint64_t seed) {
  const double var = model.error_variance;
  require(var >= 0.0 && var <= 1.0, "error variance must lie in [0, 1] for conditional sampling");
  require(samples >= 1, "need at least one sample");
  const CMat& Hhat = model.estimate.matrix();
  const double keep = std::sqrt(1.0 - var);
  const double spread = std::sqrt(var);

  std::mt19937_64 rng(seed);
  std::vector<ChannelSet> out;
  out.reserve(samples);
  for (std::size_t m = 0; m < samples; ++m) {
    CMat err = gaussian_matrix(Hhat.rows(), Hhat.cols(), rng);
    if (var == 0.0)
      out.emplace_back(Hhat);
    else if (var == 1.0)
      out.emplace_back(std::move(err));
    else
      out.emplace_back(CMat(keep * Hhat + spread * err));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

}  // namespace secrsma
