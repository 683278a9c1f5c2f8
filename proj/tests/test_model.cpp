#include <cmath>
#include <numbers>

#include "doctest.h"
#include "secrsma/model.hpp"

using namespace secrsma;

namespace {

Precoders make(std::initializer_list<CVec> cols) {
  const auto nt = cols.begin()->size();
  CMat P(nt, static_cast<Eigen::Index>(cols.size()));
  Eigen::Index i = 0;
  for (const auto& c : cols) P.col(i++) = c;
  return Precoders(P);
}

CVec v2(cplx a, cplx b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("orthogonal interference vanishes from the common SINR") {
  ChannelSet H(std::vector<CVec>{v2(1, 0), v2(0, 1)});
  auto P = make({v2(2, 0), v2(0, 1), v2(0, 0)});
  auto br = compute_sinrs(H, P, 1.0);
  CHECK(br.sinr_common(0) == doctest::Approx(4.0));
  CHECK(br.rates.common(0) == doctest::Approx(std::log2(5.0)));
}

TEST_CASE("zero precoders give zero SINRs and rates") {
  auto H = random_channels(3, 4, 7);
  Precoders P(4, 3);
  auto br = compute_sinrs(H, P, 1.0);
  CHECK(br.sinr_common.cwiseAbs().maxCoeff() == 0.0);
  CHECK(br.sinr_private.cwiseAbs().maxCoeff() == 0.0);
  CHECK(br.sinr_wiretap.cwiseAbs().maxCoeff() == 0.0);
  CHECK(br.rates.secrecy.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("secrecy rate clamps at zero against the strongest eavesdropper") {
  RVec priv(3);
  priv << 0.2, 1.0, 1.0;
  RMat w = RMat::Zero(3, 3);
  w(0, 1) = 0.5;
  w(0, 2) = 0.3;
  w(1, 0) = 0.25;
  auto s = secrecy_rates(priv, w);
  CHECK(s(0) == 0.0);
  CHECK(s(1) == doctest::Approx(0.75));
  CHECK(s(2) == doctest::Approx(1.0));
}

TEST_CASE("weighted sum rate arithmetic") {
  RateSummary r;
  r.priv = RVec::Constant(2, 2.0);
  CHECK(wsr(r, RVec::Constant(2, 1.0), RVec::Constant(2, 0.5)) == doctest::Approx(3.0));
  r.priv << 2.0, 9.0;
  RVec c(2), u(2);
  c << 0.0, 7.0;
  u << 1.0, 0.0;
  CHECK(wsr(r, c, u) == doctest::Approx(2.0));
  r.priv = RVec::Ones(3);
  RVec u3(3);
  u3 << 0.2, 0.3, 0.5;
  CHECK(wsr(r, RVec::Zero(3), u3) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wsr(r, RVec::Constant(3, -0.1), u3), Error);
}

TEST_CASE("SINRs agree with a direct scalar summation") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t K = 2 + seed % 3, nt = 1 + seed % 4;
    auto H = random_channels(K, nt, seed);
    Precoders P(nt, K);
    P.matrix() = random_channels(K + 1, nt, seed + 1000).matrix();
    auto br = compute_sinrs(H, P, 0.7);
    for (std::size_t k = 0; k < K; ++k) {
      auto g = [&](std::size_t user, std::size_t stream) {
        cplx acc = 0;
        for (std::size_t n = 0; n < nt; ++n)
          acc += std::conj(H.h(user)(static_cast<Eigen::Index>(n))) *
                 P.matrix()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(stream));
        return std::norm(acc);
      };
      double priv = 0;
      for (std::size_t i = 0; i < K; ++i) priv += g(k, i + 1);
      const auto kk = static_cast<Eigen::Index>(k);
      CHECK(std::abs(br.sinr_common(kk) - g(k, 0) / (priv + 0.7)) <= 1e-12 * (1 + br.sinr_common(kk)));
      CHECK(std::abs(br.sinr_private(kk) - g(k, k + 1) / (priv - g(k, k + 1) + 0.7)) <=
            1e-12 * (1 + br.sinr_private(kk)));
      for (std::size_t j = 0; j < K; ++j) {
        if (j == k) continue;
        double rest = 0;
        for (std::size_t i = 0; i < K; ++i)
          if (i != k && i != j) rest += g(j, i + 1);
        const double w = br.sinr_wiretap(kk, static_cast<Eigen::Index>(j));
        CHECK(std::abs(w - g(j, k + 1) / (rest + 0.7)) <= 1e-12 * (1 + w));
      }
      double worst = 0;
      for (std::size_t j = 0; j < K; ++j)
        if (j != k) worst = std::max(worst, br.rates.wiretap(kk, static_cast<Eigen::Index>(j)));
      CHECK(br.rates.secrecy(kk) == std::max(0.0, br.rates.priv(kk) - worst));
    }
  }
}

TEST_CASE("invalid inputs are rejected") {
  auto H = random_channels(2, 2, 1);
  CHECK_THROWS_AS(compute_sinrs(H, Precoders(3, 2), 1.0), Error);
  CHECK_THROWS_AS(compute_sinrs(H, Precoders(2, 2), 0.0), Error);
  CHECK_THROWS_AS(specific_channels(0.0, 1.0, 2), Error);
  auto spec = SecrecySpec::uniform(2, 0.1);
  spec.thresholds(0) = -1;
  CHECK_THROWS_AS(spec.validate(2), Error);
  CHECK_THROWS_AS(SecrecySpec::with_weights({0.0, 0.0}, 0.0).validate(2), Error);
}

TEST_CASE("specific channels") {
  auto a = specific_channels(1.0, 0.0, 2);
  CHECK((a.h(0) - a.h(1)).norm() == 0.0);
  CHECK(a.h(0)(0) == cplx(1, 0));

  const double th = 2 * std::numbers::pi / 9;
  auto b = specific_channels(0.3, th, 2);
  CHECK(std::abs(b.h(1)(0) - cplx(0.3, 0)) < 1e-15);
  // stored as the column h_2 = 0.3 [1, e^{j theta}]^H
  CHECK(std::abs(b.h(1)(1) - 0.3 * std::polar(1.0, -th)) < 1e-15);

  auto c = specific_channels(1.0, std::numbers::pi, 2);
  CHECK(std::abs(c.h(0).dot(c.h(1))) < 1e-15);

  auto d = specific_channels(1.0, th, 4);
  CHECK(d.antennas() == 4);
  CHECK(std::abs(d.h(1)(3) - std::polar(1.0, -3 * th)) < 1e-15);
}

TEST_CASE("random channels are deterministic and CN(0,1)") {
  CHECK(random_channels(3, 4, 42) == random_channels(3, 4, 42));
  CHECK_FALSE(random_channels(3, 4, 42) == random_channels(3, 4, 43));
  auto H = random_channels(1, 100000, 9);
  const CVec x = H.h(0);
  CHECK(std::abs(x.mean()) < 0.02);
  const double var = (x.array() - x.mean()).abs2().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
  auto R = random_real_channels(2, 2, 5);
  CHECK(R.is_real());
}

TEST_CASE("imperfect-CSIT sampling") {
  auto Hhat = random_channels(2, 2, 3);
  auto exact = sample_csit(CsitModel::with_variance(Hhat, 0.0), 5, 1);
  for (const auto& H : exact) CHECK(H == Hhat);

  auto full = sample_csit(CsitModel::with_variance(Hhat, 1.0), 3, 1);
  auto other = sample_csit(CsitModel::with_variance(random_channels(2, 2, 99), 1.0), 3, 1);
  for (std::size_t m = 0; m < 3; ++m) CHECK(full[m] == other[m]);

  auto m = CsitModel::from_quality(Hhat, 1.0, 0.6, 100.0);
  CHECK(m.error_variance == doctest::Approx(std::pow(100.0, -0.6)));
  CHECK(m.error_variance == doctest::Approx(0.0631).epsilon(1e-3));

  auto s1 = sample_csit(m, 10, 77), s2 = sample_csit(m, 10, 77);
  for (std::size_t i = 0; i < 10; ++i) CHECK(s1[i] == s2[i]);
  CHECK_THROWS_AS(sample_csit(CsitModel::with_variance(Hhat, 1.5), 2, 1), Error);
}

TEST_CASE("derived seeds are distinct and stable") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
