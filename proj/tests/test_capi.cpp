#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "secrsma/secrsma.h"

TEST_CASE("version and status strings") {
  CHECK(std::string(secrsma_version()) == "0.1.0");
  CHECK(std::string(secrsma_status_string(SECRSMA_INFEASIBLE)) == "infeasible thresholds");
  CHECK(std::string(secrsma_status_string(static_cast<secrsma_status>(42))) == "unknown status");
}

TEST_CASE("null arguments are rejected with a message") {
  secrsma_config* cfg = nullptr;
  CHECK(secrsma_config_parse(nullptr, &cfg) == SECRSMA_INVALID_ARGUMENT);
  CHECK(std::string(secrsma_last_error()).find("must not be NULL") != std::string::npos);
  CHECK(secrsma_config_set_seed(nullptr, 1) == SECRSMA_INVALID_ARGUMENT);
  CHECK(secrsma_run_sweep(nullptr, 1, nullptr) == SECRSMA_INVALID_ARGUMENT);
  CHECK(secrsma_solve(nullptr, nullptr) == SECRSMA_INVALID_ARGUMENT);
  CHECK(secrsma_validate(1, 1, 1e-3, nullptr, nullptr) == SECRSMA_INVALID_ARGUMENT);
  double w = 0;
  CHECK(secrsma_solution_wsr(nullptr, &w) == SECRSMA_INVALID_ARGUMENT);
  secrsma_config_free(nullptr);
  secrsma_solution_free(nullptr);
  secrsma_string_free(nullptr);
}

TEST_CASE("config errors surface as SECRSMA_CONFIG") {
  secrsma_config* cfg = nullptr;
  CHECK(secrsma_config_parse("[scenario]\nflavour = 1\n", &cfg) == SECRSMA_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(secrsma_last_error()).find("flavour") != std::string::npos);
  CHECK(secrsma_config_load("/nonexistent/x.ini", &cfg) == SECRSMA_IO);
}

TEST_CASE("config handle: hash, overrides and output directory") {
  secrsma_config* cfg = nullptr;
  REQUIRE(secrsma_config_parse("[scenario]\ntype = random\n[output]\ndir = somewhere\n", &cfg) == SECRSMA_OK);
  char h1[32], h2[32];
  CHECK(secrsma_config_hash(cfg, h1, 8) == SECRSMA_INVALID_ARGUMENT);
  REQUIRE(secrsma_config_hash(cfg, h1, sizeof h1) == SECRSMA_OK);
  CHECK(std::strlen(h1) == 24);
  CHECK(secrsma_config_set_seed(cfg, 77) == SECRSMA_OK);
  REQUIRE(secrsma_config_hash(cfg, h2, sizeof h2) == SECRSMA_OK);
  CHECK(std::string(h1) != std::string(h2));
  CHECK(secrsma_config_set_tolerance(cfg, -1.0) != SECRSMA_OK);
  CHECK(secrsma_config_set_out_dir(cfg, "") == SECRSMA_INVALID_ARGUMENT);

  size_t need = 0;
  REQUIRE(secrsma_config_out_dir(cfg, nullptr, 0, &need) == SECRSMA_OK);
  CHECK(need == std::strlen("somewhere") + 1);
  std::vector<char> buf(need);
  REQUIRE(secrsma_config_out_dir(cfg, buf.data(), buf.size(), nullptr) == SECRSMA_OK);
  CHECK(std::string(buf.data()) == "somewhere");
  secrsma_config_free(cfg);
}

TEST_CASE("dimension errors") {
  const double re[4] = {1, 0, 0, 1};
  secrsma_problem p;
  secrsma_problem_init(&p);
  p.channel_real = re;
  p.users = 0;
  p.antennas = 2;
  secrsma_solution* s = nullptr;
  CHECK(secrsma_solve(&p, &s) == SECRSMA_DIMENSION);
  CHECK(s == nullptr);
}

TEST_CASE("solve a two-user instance through the C interface") {
  // column-major 2x2, column k is user k
  const double re[4] = {1.0, 0.0, 0.6, 0.8};
  const double im[4] = {0.0, 0.0, 0.0, 0.0};
  const double th[2] = {0.1, 0.1};
  secrsma_problem p;
  secrsma_problem_init(&p);
  p.users = 2;
  p.antennas = 2;
  p.channel_real = re;
  p.channel_imag = im;
  p.thresholds = th;
  p.snr_db = 20;
  secrsma_solution* s = nullptr;
  REQUIRE(secrsma_solve(&p, &s) == SECRSMA_OK);
  double wsr = 0;
  REQUIRE(secrsma_solution_wsr(s, &wsr) == SECRSMA_OK);
  CHECK(wsr > 0.0);
  int it = 0, conv = 0, feas = 0;
  REQUIRE(secrsma_solution_info(s, &it, &conv, &feas) == SECRSMA_OK);
  CHECK(it >= 1);
  CHECK(feas == 1);
  double c[2], pr[2], sec[2];
  REQUIRE(secrsma_solution_rates(s, c, pr, sec) == SECRSMA_OK);
  CHECK(sec[0] >= 0.1 - 1e-3);
  CHECK(sec[1] >= 0.1 - 1e-3);
  CHECK(0.5 * (c[0] + pr[0] + c[1] + pr[1]) == doctest::Approx(wsr).epsilon(1e-9));
  double pre[6], pim[6];
  REQUIRE(secrsma_solution_precoders(s, pre, pim) == SECRSMA_OK);
  double power = 0;
  for (int i = 0; i < 6; ++i) power += pre[i] * pre[i] + pim[i] * pim[i];
  CHECK(power <= 100.0 * (1 + 1e-6));
  secrsma_solution_free(s);

  p.scheme = SECRSMA_MULP;
  REQUIRE(secrsma_solve(&p, &s) == SECRSMA_OK);
  double mulp = 0;
  secrsma_solution_wsr(s, &mulp);
  CHECK(wsr >= mulp - 1e-6);
  secrsma_solution_free(s);

  p.scheme = SECRSMA_RS;
  p.csit = SECRSMA_IMPERFECT;
  p.error_variance = 0.05;
  p.samples = 20;
  REQUIRE(secrsma_solve(&p, &s) == SECRSMA_OK);
  REQUIRE(secrsma_solution_info(s, nullptr, nullptr, &feas) == SECRSMA_OK);
  secrsma_solution_free(s);

  p.error_variance = 2.0;
  CHECK(secrsma_solve(&p, &s) == SECRSMA_INVALID_ARGUMENT);
}
