#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "secrsma/experiment.hpp"
#include "secrsma/oracle.hpp"

namespace secrsma {

namespace {

struct OracleCase {
  double oracle = 0.0, sca = 0.0, seconds = 0.0;
  bool oracle_feasible = false, sca_feasible = false;
};

OracleCase oracle_case(std::uint64_t seed, double power, double rth) {
  const auto H = random_real_channels(2, 2, seed);
  const auto spec = SecrecySpec::uniform(2, rth);
  OracleCase c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto o = grid_oracle_wsr(H, spec, power);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.oracle = o.wsr;
  c.oracle_feasible = o.feasible;
  try {
    const auto s = solve_wsr(H, spec, power);
    c.sca = s.wsr;
    c.sca_feasible = s.secrecy_ok;
  } catch (const Error&) {
    c.sca = std::nan("");
  }
  return c;
}

}  // namespace

ValidationResult run_validation(std::uint64_t seed, unsigned jobs, double tolerance) {
  ValidationResult res;
  res.passed = true;
  std::ostringstream os;
  os.precision(6);
  auto line = [&](bool ok, const std::string& name, const std::string& detail) {
    res.passed = res.passed && ok;
    os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };

  const auto rw = check_rate_wmmse(200, derive_seed(seed, 0));
  line(rw.identity_residual <= 1e-9 && rw.zero_precoder_residual <= 1e-12, "rate-wmmse identity", rw.summary());
  line(rw.equalizer_violations == 0 && rw.weight_violations == 0, "mmse minimisers", rw.summary());

  const auto tb = check_taylor_bounds(10000, derive_seed(seed, 1));
  line(tb.exp_violation <= 1e-12 && tb.ratio_violation <= 1e-12 && tb.wiretap_violation <= 1e-12 &&
           tb.tangency <= 1e-10,
       "surrogate bounds", tb.summary());
  os << "INFO bilinear eavesdropper bound (three users, diagnostic): " << tb.wiretap_sinr_exceed << "/"
     << tb.wiretap_sinr_probes << " probes admit an SINR below the true one\n";

  const std::size_t n = 5;
  std::vector<OracleCase> cases(n);
  {
    std::vector<std::thread> pool;
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, n));
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) cases[i] = oracle_case(derive_seed(seed, 100 + i), 100.0, 0.2);
      });
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = cases[i];
    std::ostringstream d;
    d.precision(6);
    d << "sca=" << c.sca << " oracle=" << c.oracle << " (" << (c.oracle_feasible ? "feasible" : "no feasible point")
      << ", " << c.seconds << " s)";
    const bool ok = c.sca_feasible && (!c.oracle_feasible || c.sca >= c.oracle - tolerance);
    line(ok, "oracle bound instance " + std::to_string(i + 1), d.str());
  }
  res.report = os.str();
  return res;
}

}  // namespace secrsma
