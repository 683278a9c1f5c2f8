#include <cmath>
#include <numbers>

#include "doctest.h"
#include "secrsma/wmmse.hpp"

using namespace secrsma;

namespace {

CVec v2(cplx a, cplx b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("hand-evaluated common stream") {
  // h_1 = [1, 0], p_c = [1, 0], p_1 = [0, 1]; a second user keeps K = 2
  ChannelSet H(std::vector<CVec>{v2(1, 0), v2(0, 1)});
  CMat P(2, 3);
  P.col(0) = v2(1, 0);
  P.col(1) = v2(0, 1);
  P.col(2) = v2(0, 0);
  auto s = mmse_sample(H, Precoders(P), 1.0, Scheme::RS);
  const auto& c = s.common[0];
  CHECK(c.T == doctest::Approx(2.0));
  CHECK(std::abs(c.g - cplx(0.5, 0)) < 1e-15);
  CHECK(c.eps == doctest::Approx(0.5));
  CHECK(c.omega == doctest::Approx(2.0));
  CHECK(std::abs(wmse(c.omega, mse(c.g, c.T, c.signal))) < 1e-15);
  CHECK(rate_wmmse_gap(H, Precoders(P), 1.0).max() < 1e-15);
}

TEST_CASE("zero precoders") {
  auto H = random_channels(2, 3, 4);
  Precoders P(3, 2);
  auto s = mmse_sample(H, P, 1.0, Scheme::RS);
  for (const auto& st : {s.common[0], s.priv[1], s.wiretap[0][1]}) {
    CHECK(st.g == cplx(0, 0));
    CHECK(st.eps == 1.0);
    CHECK(st.omega == 1.0);
    CHECK(wmse(st.omega, st.eps) == doctest::Approx(1.0));
  }
  CHECK(rate_wmmse_gap(H, P, 1.0).max() == 0.0);
}

TEST_CASE("rate-WMMSE identity on random instances") {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t K = 2 + seed % 2, nt = seed % 3 == 0 ? 2 : 4;
    auto H = random_channels(K, nt, derive_seed(5, seed));
    Precoders P(nt, K);
    P.matrix() = random_channels(K + 1, nt, derive_seed(6, seed)).matrix() * std::sqrt(double(seed % 50 + 1));
    worst = std::max(worst, rate_wmmse_gap(H, P, 1.0).max());
    worst = std::max(worst, rate_wmmse_gap(H, P, 1.0, Scheme::MULP).max());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("a non-optimal equalizer strictly increases the WMSE") {
  auto H = random_channels(2, 2, 8);
  Precoders P(2, 2);
  P.matrix() = random_channels(3, 2, 9).matrix() * 3.0;
  auto s = mmse_sample(H, P, 1.0, Scheme::RS);
  const auto br = compute_sinrs(H, P, 1.0);
  const auto& st = s.priv[0];
  const double doubled = wmse(st.omega, mse(2.0 * st.g, st.T, st.signal));
  CHECK(doubled > 1.0 - br.rates.priv(0) + 1e-6);
}

TEST_CASE("averages") {
  auto H = random_channels(2, 2, 1);
  Precoders P(2, 2);
  P.matrix() = random_channels(3, 2, 2).matrix();
  std::vector<ChannelSet> one{H};
  auto st = update_equalizers_and_weights(P, one, 1.0);
  auto a = compute_averages(st, one);
  const auto& s = st.samples[0].priv[1];
  CHECK(a.priv[1].t == doctest::Approx(s.omega * std::norm(s.g)));
  CHECK(a.priv[1].u == doctest::Approx(s.omega));
  CHECK(a.priv[1].v == doctest::Approx(std::log2(s.omega)));
  CHECK((a.priv[1].Psi - a.priv[1].t * H.h(1) * H.h(1).adjoint()).norm() < 1e-12);

  // two samples with t = 1 and 3 average to 2
  MmseState two;
  two.samples.resize(2);
  for (int m = 0; m < 2; ++m) {
    auto& smp = two.samples[static_cast<std::size_t>(m)];
    smp = st.samples[0];
    smp.priv[0].g = 1.0;
    smp.priv[0].omega = m == 0 ? 1.0 : 3.0;
  }
  auto b = compute_averages(two, {H, H});
  CHECK(b.priv[0].t == doctest::Approx(2.0));

  // error-free samples reproduce the estimate's coefficients
  auto same = sample_csit(CsitModel::with_variance(H, 0.0), 7, 3);
  auto c = compute_averages(update_equalizers_and_weights(P, same, 1.0), same);
  CHECK((c.wiretap[0][1].Psi - a.wiretap[0][1].Psi).norm() < 1e-12);
  CHECK(c.common[0].u == doctest::Approx(a.common[0].u));
}

TEST_CASE("averaged WMSE at MMSE weights is one minus the average rate") {
  auto Hhat = random_channels(2, 4, 12);
  auto samples = sample_csit(CsitModel::with_variance(Hhat, 0.2), 50, 4);
  Precoders P(4, 2);
  P.matrix() = random_channels(3, 4, 13).matrix() * 2.0;
  auto a = compute_averages(update_equalizers_and_weights(P, samples, 1.0), samples);
  auto r = saf_rates(P, samples, 1.0);
  const std::vector<CVec> privs{P.priv(0), P.priv(1)};
  CHECK(averaged_wmse(a.priv[0], privs, P.priv(0), 1.0) == doctest::Approx(1.0 - r.priv(0)).epsilon(1e-10));
  std::vector<CVec> all{P.common(), P.priv(0), P.priv(1)};
  CHECK(averaged_wmse(a.common[1], all, P.common(), 1.0) == doctest::Approx(1.0 - r.common(1)).epsilon(1e-10));
  // user 2 eavesdrops stream 1: its own stream is removed
  const std::vector<CVec> rest{P.priv(0)};
  CHECK(averaged_wmse(a.wiretap[0][1], rest, P.priv(0), 1.0) ==
        doctest::Approx(1.0 - r.wiretap(0, 1)).epsilon(1e-10));
  // linearisation: tight at the expansion point, below elsewhere
  CHECK(linearized_wiretap_wmse(a.wiretap[0][1], P, P, 0, 1, 1.0) ==
        doctest::Approx(1.0 - r.wiretap(0, 1)).epsilon(1e-10));
  Precoders Q(4, 2);
  Q.matrix() = random_channels(3, 4, 14).matrix();
  const std::vector<CVec> qrest{Q.priv(0)};
  CHECK(linearized_wiretap_wmse(a.wiretap[0][1], Q, P, 0, 1, 1.0) <=
        averaged_wmse(a.wiretap[0][1], qrest, Q.priv(0), 1.0) + 1e-12);
}

TEST_CASE("inner subproblem uses only linear and second-order cones") {
  auto H = random_channels(2, 2, 3);
  auto samples = sample_csit(CsitModel::with_variance(H, 0.05), 10, 1);
  Precoders P(2, 2);
  P.matrix() = random_channels(3, 2, 7).matrix();
  auto a = compute_averages(update_equalizers_and_weights(P, samples, 1.0), samples);
  auto sp = build_inner_subproblem(P, a, SecrecySpec::uniform(2, 0.1), 10, AoOptions{});
  CHECK_FALSE(sp.problem.families().exponential);
  CHECK(sp.count("secrecy") == 2);
  CHECK(sp.count("wiretap_linear") == 2);
  CHECK(sp.count("common_wmse") == 2);
  CHECK(sp.count("private_wmse") == 2);
  CHECK(sp.count("power") == 1);
  AoOptions mulp;
  mulp.scheme = Scheme::MULP;
  auto a2 = compute_averages(update_equalizers_and_weights(P, samples, 1.0, Scheme::MULP), samples, Scheme::MULP);
  CHECK(build_inner_subproblem(P, a2, SecrecySpec::uniform(2, 0.1), 10, mulp).count("common_wmse") == 0);
}

TEST_CASE("error-free single sample reproduces instantaneous rates") {
  auto H = random_channels(2, 2, 30);
  auto s = sample_csit(CsitModel::with_variance(H, 0.0), 1, 5);
  Precoders P(2, 2);
  P.matrix() = random_channels(3, 2, 31).matrix();
  auto saf = saf_rates(P, s, 1.0);
  auto inst = compute_sinrs(H, P, 1.0).rates;
  CHECK((saf.priv - inst.priv).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((saf.wiretap - inst.wiretap).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((saf.common - inst.common).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("alternating solver outer objective is monotone on the specific channel") {
  auto H = specific_channels(1.0, 2 * std::numbers::pi / 9, 2);
  auto model = CsitModel::from_quality(H, 1.0, 0.6, 100);
  AoOptions o;
  o.samples = 100;
  o.seed = 11;
  auto sol = solve_wesr(model, SecrecySpec::uniform(2, 0.1), 100, o);
  CHECK(sol.converged);
  CHECK(sol.secrecy_ok);
  CHECK(sol.csit == CsitMode::Imperfect);
  double prev = 1e9;
  int outers = 0;
  for (const auto& t : sol.trace)
    if (t.phase == "outer") {
      CHECK(t.objective <= prev + 1e-7);
      prev = t.objective;
      ++outers;
    }
  CHECK(outers == sol.iterations);
  CHECK(sol.precoders.total_power() <= 100 + 1e-6);
}
