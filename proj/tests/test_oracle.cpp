#include <cmath>
#include <numbers>

#include "doctest.h"
#include "secrsma/oracle.hpp"

using namespace secrsma;

TEST_CASE("vanishing power gives vanishing WSR") {
  auto H = random_real_channels(2, 2, 1);
  auto r = grid_oracle_wsr(H, SecrecySpec::uniform(2, 0.0), 1e-9);
  CHECK(r.feasible);
  CHECK(r.wsr < 1e-8);
}

TEST_CASE("a single weighted user recovers the MRT rate") {
  auto H = random_real_channels(2, 2, 3);
  auto spec = SecrecySpec::with_weights({1.0, 0.0}, 0.0);
  const double Pt = 100;
  auto r = grid_oracle_wsr(H, spec, Pt);
  const double mrt = std::log2(1 + Pt * H.h(0).squaredNorm());
  CHECK(r.wsr <= mrt + 1e-12);
  // angle grid pi/32: the beam loses at most cos^2(pi/64) of the gain
  const double floor = std::log2(1 + Pt * H.h(0).squaredNorm() * std::pow(std::cos(std::numbers::pi / 64), 2));
  CHECK(r.wsr >= floor - 1e-9);
}

TEST_CASE("grid oracle is deterministic, thread-independent and monotone in resolution") {
  auto H = random_real_channels(2, 2, 11);
  auto spec = SecrecySpec::uniform(2, 0.2);
  GridSpec coarse{0.1, 16, 1}, fine{0.05, 32, 1}, threaded{0.05, 32, 3};
  auto a = grid_oracle_wsr(H, spec, 100, fine);
  auto b = grid_oracle_wsr(H, spec, 100, fine);
  auto c = grid_oracle_wsr(H, spec, 100, threaded);
  auto d = grid_oracle_wsr(H, spec, 100, coarse);
  CHECK(a.wsr == b.wsr);
  CHECK(a.wsr == c.wsr);
  CHECK(a.precoders.matrix() == c.precoders.matrix());
  CHECK(a.wsr >= d.wsr);
  CHECK(a.evaluated > d.evaluated);
}

TEST_CASE("oracle rejects unsupported instances") {
  CHECK_THROWS_AS(grid_oracle_wsr(random_channels(2, 2, 1), SecrecySpec::uniform(2, 0), 1), Error);
  CHECK_THROWS_AS(grid_oracle_wsr(random_real_channels(3, 2, 1), SecrecySpec::uniform(3, 0), 1), Error);
  CHECK_THROWS_AS(grid_oracle_wsr(random_real_channels(2, 2, 1), SecrecySpec::uniform(2, 0), 1, GridSpec{0.3, 8, 1}),
                  Error);
}

TEST_CASE("surrogate probes") {
  auto t = check_taylor_bounds(2000, 3);
  CHECK(t.samples == 2000);
  CHECK(t.exp_violation <= 1e-12);
  CHECK(t.ratio_violation <= 1e-12);
  CHECK(t.wiretap_violation <= 1e-12);
  CHECK(t.tangency <= 1e-10);
  CHECK(t.wiretap_sinr_probes > 0);
  CHECK_FALSE(t.summary().empty());
}

TEST_CASE("rate-WMMSE report") {
  auto r = check_rate_wmmse(40, 5, 20, 20);
  CHECK(r.instances == 40);
  CHECK(r.identity_residual <= 1e-9);
  CHECK(r.zero_precoder_residual == 0.0);
  CHECK(r.equalizer_violations == 0);
  CHECK(r.weight_violations == 0);
  CHECK(r.equalizer_probes > 0);
}
