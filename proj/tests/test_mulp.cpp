#include <cmath>
#include <numbers>

#include "doctest.h"
#include "secrsma/mulp.hpp"

using namespace secrsma;

TEST_CASE("MULP never uses a common stream") {
  auto H = random_channels(2, 4, 2);
  auto sol = solve_mulp_wsr(H, SecrecySpec::uniform(2, 0.1), 100);
  CHECK(sol.scheme == Scheme::MULP);
  CHECK(sol.precoders.common().norm() == 0.0);
  CHECK(sol.common_rates.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sol.secrecy_ok);

  auto model = CsitModel::from_quality(H, 1.0, 0.6, 100);
  AoOptions o;
  o.samples = 20;
  auto im = solve_mulp_wesr(model, SecrecySpec::uniform(2, 0.1), 100, o);
  CHECK(im.precoders.common().norm() == 0.0);
  CHECK(im.common_rates.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("orthogonal users: MULP splits power by water-filling and RS matches it") {
  ChannelSet H(CMat::Identity(2, 2));
  Instance inst{CsitMode::Perfect, H, 0.0, 10};
  auto pair = solve_pair(inst, SecrecySpec::uniform(2, 0.0), SolverOptions{});
  // equal unit gains: each user gets half the budget
  const double expect = std::log2(1 + 5.0);
  CHECK(pair.mulp.wsr == doctest::Approx(expect).epsilon(1e-3));
  CHECK(pair.rs.wsr >= pair.mulp.wsr - 1e-6);
  CHECK(pair.mulp.precoders.priv(0).squaredNorm() == doctest::Approx(5.0).epsilon(1e-2));
}

TEST_CASE("rate splitting never loses to MULP on the same instance") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Instance inst{CsitMode::Perfect, random_channels(2, 2, derive_seed(40, seed)), 0.0, 100};
    auto pair = solve_pair(inst, SecrecySpec::uniform(2, 0.2), SolverOptions{});
    REQUIRE(pair.mulp.secrecy_ok);
    CHECK(pair.rs.secrecy_ok);
    CHECK(pair.rs.wsr >= pair.mulp.wsr - 1e-6);
  }
}

TEST_CASE("equal-strength users get matching private powers") {
  auto H = specific_channels(1.0, 2 * std::numbers::pi / 9, 2);
  auto sol = solve_mulp_wsr(H, SecrecySpec::uniform(2, 0.1), 100);
  const double a = sol.precoders.priv(0).squaredNorm(), b = sol.precoders.priv(1).squaredNorm();
  CHECK(std::abs(a - b) <= 0.02 * std::max(a, b));
}

TEST_CASE("threshold path is nonincreasing and keeps input order") {
  Instance inst{CsitMode::Perfect, random_channels(2, 4, 77), 0.0, 100};
  const std::vector<double> th{0.5, 0.0, 1.0, 0.25};
  auto path = solve_threshold_path(inst, RVec::Constant(2, 0.5), th, SolverOptions{});
  REQUIRE(path.size() == th.size());
  for (std::size_t i = 0; i < th.size(); ++i) CHECK(path[i].rs.thresholds(0) == th[i]);
  const std::size_t order[] = {1, 3, 0, 2};
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(path[order[i]].rs.wsr <= path[order[i - 1]].rs.wsr + 1e-4);
    CHECK(path[order[i]].mulp.wsr <= path[order[i - 1]].mulp.wsr + 1e-4);
  }
}

TEST_CASE("unreachable thresholds become failed rows") {
  Instance inst{CsitMode::Perfect, random_channels(2, 2, 5), 0.0, 1};
  auto sol = solve_scheme(inst, Scheme::RS, SecrecySpec::uniform(2, 50.0), SolverOptions{});
  CHECK(sol.status == "infeasible");
  CHECK(std::isnan(sol.wsr));
  CHECK_FALSE(sol.secrecy_ok);
}
