#include <cmath>
#include <numbers>

#include "doctest.h"
#include "secrsma/sca.hpp"

using namespace secrsma;

namespace {

const double kTheta = 2 * std::numbers::pi / 9;

ChannelSet fig_channel() { return specific_channels(1.0, kTheta, 2); }

}  // namespace

TEST_CASE("initial precoders split the budget as power levels") {
  auto H = random_channels(2, 4, 3);
  const double Pt = 100;
  auto P0 = initial_precoders(H, Pt, 0.0, Scheme::RS);
  CHECK(P0.common().norm() == 0.0);
  CHECK(P0.priv(0).squaredNorm() == doctest::Approx(Pt / 2));
  CHECK(P0.priv(1).squaredNorm() == doctest::Approx(Pt / 2));

  auto P1 = initial_precoders(H, Pt, 1.0, Scheme::RS);
  CHECK(P1.common().squaredNorm() == doctest::Approx(Pt));
  CHECK(P1.priv(0).norm() == 0.0);

  auto Ph = initial_precoders(H, Pt, 0.5, Scheme::RS);
  CHECK(Ph.total_power() == doctest::Approx(Pt).epsilon(1e-12));
  CHECK(initial_precoders(H, Pt, 0.5, Scheme::MULP).common().norm() == 0.0);

  CHECK_THROWS_AS(initial_precoders(ChannelSet(CMat::Zero(2, 2)), Pt, 0.5, Scheme::RS), Error);
  CHECK_THROWS_AS(initial_precoders(H, Pt, 1.5, Scheme::RS), Error);
}

TEST_CASE("initial state holds the auxiliary variables with equality") {
  auto H = fig_channel();
  auto s = initialize(H, 100, 0.5, RVec::Constant(2, 0.5));
  auto br = compute_sinrs(H, s.P, 1.0);
  CHECK((s.alpha_p - br.rates.priv).norm() < 1e-12);
  CHECK((s.rho_c - br.sinr_common).norm() < 1e-12);
  CHECK(s.common.sum() == doctest::Approx(br.rates.min_common()));
  CHECK((s.beta_p.array() > 0).all());
}

TEST_CASE("subproblem block counts for two users") {
  auto H = fig_channel();
  auto spec = SecrecySpec::uniform(2, 0.1);
  auto s = initialize(H, 100, 0.5, spec.weights);
  auto sp = build_subproblem(s, H, spec, 100, ScaOptions{});
  CHECK(sp.count("secrecy") == 2);
  CHECK(sp.count("common") == 2);
  CHECK(sp.count("exp") == 4);
  CHECK(sp.count("taylor_exp") == 2);
  CHECK(sp.count("denominator") == 4);
  CHECK(sp.count("taylor_ratio") == 4);
  CHECK(sp.count("wiretap") == 2);
  CHECK(sp.count("power") == 1);

  // zero thresholds drop the secrecy machinery
  auto open = build_subproblem(s, H, SecrecySpec::uniform(2, 0.0), 100, ScaOptions{});
  CHECK(open.count("secrecy") == 0);
  CHECK(open.count("wiretap") == 0);
}

TEST_CASE("tangent rows are tight at the expansion point") {
  auto H = random_channels(2, 2, 17);
  auto spec = SecrecySpec::uniform(2, 0.0);
  auto s = initialize(H, 10, 0.4, spec.weights);
  auto sp = build_subproblem(s, H, spec, 10, ScaOptions{});
  // place the state itself in the variable vector
  RVec x = RVec::Zero(sp.problem.variables());
  auto put = [&](const conic::ComplexVar& v, const CVec& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      x(v.re[static_cast<std::size_t>(i)]) = p(i).real();
      x(v.im[static_cast<std::size_t>(i)]) = p(i).imag();
    }
  };
  put(*sp.pc, s.P.common());
  for (std::size_t k = 0; k < 2; ++k) {
    put(sp.pk[k], s.P.priv(k));
    const auto kk = static_cast<Eigen::Index>(k);
    x(sp.C[k]) = s.common(kk);
    x(sp.alpha_c[k]) = s.alpha_c(kk);
    x(sp.rho_c[k]) = s.rho_c(kk);
    x(sp.beta_c[k]) = s.beta_c(kk);
    x(sp.alpha_p[k]) = s.alpha_p(kk);
    x(sp.rho_p[k]) = s.rho_p(kk);
    x(sp.beta_p[k]) = s.beta_p(kk);
  }
  for (std::size_t h = 0; h < sp.problem.blocks().size(); ++h) {
    const auto& b = sp.problem.block(h);
    if (b.tag == "taylor_ratio") CHECK(std::abs(b.rows[0].evaluate(x)) < 1e-10);
  }
  CHECK(sp.problem.max_residual(x) < 1e-8);
}

TEST_CASE("SCA converges monotonically on the specific channel") {
  auto H = fig_channel();
  auto spec = SecrecySpec::uniform(2, 0.1);
  auto sol = solve_wsr(H, spec, 100);
  CHECK(sol.converged);
  CHECK(sol.iterations <= 100);
  CHECK(sol.secrecy_ok);
  CHECK(sol.precoders.total_power() <= 100 + 1e-6);
  double prev = -1e9;
  for (const auto& t : sol.trace)
    if (t.phase == "sca") {
      CHECK(t.wsr >= prev - 1e-7);
      prev = t.wsr;
    }
  CHECK(sol.common_rates.minCoeff() >= 0.0);
  CHECK(sol.common_rates.sum() <= sol.rates.min_common() + 1e-9);
}

TEST_CASE("single user without secrecy uses the full budget") {
  CVec h(2);
  h << cplx(1, 0.5), cplx(-0.3, 0.2);
  ChannelSet H(std::vector<CVec>{h});
  auto sol = solve_wsr(H, SecrecySpec::uniform(1, 0.0), 10);
  const double cap = std::log2(1 + 10 * h.squaredNorm());
  CHECK(sol.wsr == doctest::Approx(cap).epsilon(1e-3));
  CHECK(sol.precoders.total_power() == doctest::Approx(10).epsilon(1e-3));
}

TEST_CASE("thresholds above single-user capacity are infeasible") {
  auto H = fig_channel();
  const double cap = single_user_capacity(H, 0, 100, 1.0);
  try {
    solve_wsr(H, SecrecySpec::uniform(2, cap + 0.1), 100);
    FAIL("expected infeasibility");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleThresholds);
  }
}

TEST_CASE("surrogate rates match true rates at convergence") {
  auto H = random_channels(2, 4, 5);
  auto spec = SecrecySpec::uniform(2, 0.1);
  auto sol = solve_wsr(H, spec, 100);
  REQUIRE(sol.secrecy_ok);
  auto st = state_from_precoders(H, sol.precoders, sol.common_rates, spec.weights, 1.0, Scheme::RS);
  auto next = iterate(st, H, spec, 100, ScaOptions{});
  auto br = compute_sinrs(H, next.P, 1.0);
  CHECK((next.alpha_p - br.rates.priv).cwiseAbs().maxCoeff() <= 1e-3);
  // feeding the optimum back in does not lose objective
  CHECK(next.objective >= st.objective - 1e-6);
}

TEST_CASE("conservative wiretap cone also returns feasible points for three users") {
  auto H = random_channels(3, 4, 21);
  auto spec = SecrecySpec::with_weights({0.2, 0.3, 0.5}, 0.1);
  ScaOptions o;
  o.wiretap = WiretapSurrogate::ConservativeCone;
  auto sol = solve_wsr(H, spec, 100, o);
  CHECK(sol.secrecy_ok);
  CHECK(sol.rates.secrecy.minCoeff() >= 0.1 - 1e-3);
}
