#include "secrsma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "secrsma/wmmse.hpp"

namespace secrsma {

namespace {

Eigen::Index ei(std::size_t i) { return static_cast<Eigen::Index>(i); }

struct Best {
  double wsr = -std::numeric_limits<double>::infinity();
  int ic = 0, i1 = 0, i2 = 0, ac = 0, a1 = 0, a2 = 0;
  double common = 0.0;
  std::uint64_t evaluated = 0;
};

}  // namespace

OracleResult grid_oracle_wsr(const ChannelSet& channels, const SecrecySpec& spec, double power, const GridSpec& grid,
                             double noise) {
  require_dims(channels.users() == 2 && channels.antennas() == 2, "grid oracle needs K = N_t = 2");
  require(channels.is_real(), "grid oracle needs real-valued channels");
  spec.validate(2);
  require(power >= 0.0 && noise > 0.0, "power must be nonnegative and noise positive");
  const int n = static_cast<int>(std::lround(1.0 / grid.power_step));
  require(n >= 1 && std::abs(n * grid.power_step - 1.0) < 1e-9, "power step must divide 1");
  require(grid.angle_steps >= 1, "need at least one angle");
  const int A = grid.angle_steps;

  // a[k][i] = h_k^T [cos phi_i, sin phi_i]
  std::vector<std::vector<double>> a(2, std::vector<double>(static_cast<std::size_t>(A)));
  for (int i = 0; i < A; ++i) {
    const double phi = std::numbers::pi * i / A;
    for (std::size_t k = 0; k < 2; ++k)
      a[k][static_cast<std::size_t>(i)] =
          channels.h(k)(0).real() * std::cos(phi) + channels.h(k)(1).real() * std::sin(phi);
  }
  const double unit = power / n;
  const double u1 = spec.weights(0), u2 = spec.weights(1);
  const double umax = std::max(u1, u2);
  const double r1 = spec.thresholds(0), r2 = spec.thresholds(1);

  // Private angles and powers fix every private and wiretap rate; the common
  // stream then takes all remaining power, since each R_c,k grows with q_c.
  auto search = [&](int a1_begin, int a1_end) {
    Best best;
    for (int a1 = a1_begin; a1 < a1_end; ++a1)
      for (int a2 = 0; a2 < A; ++a2)
        for (int i1 = 0; i1 <= n; ++i1)
          for (int i2 = 0; i1 + i2 <= n; ++i2) {
            const double q1 = i1 * unit, q2 = i2 * unit;
            // g[k][s]: power of stream s (0 = p_1, 1 = p_2) at user k
            double g[2][2];
            for (int k = 0; k < 2; ++k) {
              const double x1 = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(a1)];
              const double x2 = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(a2)];
              g[k][0] = q1 * x1 * x1;
              g[k][1] = q2 * x2 * x2;
            }
            const double T1 = g[0][0] + g[0][1] + noise, T2 = g[1][0] + g[1][1] + noise;
            const double Rp1 = std::log2(T1 / (T1 - g[0][0]));
            const double Rp2 = std::log2(T2 / (T2 - g[1][1]));
            // user 2 eavesdrops stream 1 after removing its own stream, and vice versa
            const double W12 = std::log2((g[1][0] + noise) / noise);
            const double W21 = std::log2((g[0][1] + noise) / noise);
            ++best.evaluated;
            if (r1 > 0.0 && Rp1 - W12 < r1) continue;
            if (r2 > 0.0 && Rp2 - W21 < r2) continue;
            const double qc = (n - i1 - i2) * unit;
            for (int ac = 0; ac < A; ++ac) {
              double Rc = 0.0;
              if (qc > 0.0) {
                const double y1 = a[0][static_cast<std::size_t>(ac)], y2 = a[1][static_cast<std::size_t>(ac)];
                Rc = std::min(std::log2(1.0 + qc * y1 * y1 / T1), std::log2(1.0 + qc * y2 * y2 / T2));
              }
              const double w = umax * Rc + u1 * Rp1 + u2 * Rp2;
              if (w > best.wsr) best = Best{w, n - i1 - i2, i1, i2, ac, a1, a2, Rc, best.evaluated};
              if (qc <= 0.0) break;  // the common angle is irrelevant without power
            }
          }
    return best;
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(grid.threads, static_cast<unsigned>(A)));
  std::vector<Best> parts(threads);
  if (threads == 1) {
    parts[0] = search(0, A);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        parts[t] = search(static_cast<int>(A * t / threads), static_cast<int>(A * (t + 1) / threads));
      });
    for (auto& th : pool) th.join();
  }
  // chunks are in angle order; strict comparison keeps the first maximiser
  Best best;
  std::uint64_t total = 0;
  for (const auto& p : parts) {
    total += p.evaluated;
    if (p.wsr > best.wsr) best = p;
  }

  OracleResult out;
  out.evaluated = total;
  out.feasible = std::isfinite(best.wsr);
  if (!out.feasible) return out;
  out.wsr = best.wsr;
  out.precoders = Precoders(2, 2);
  auto dir = [&](int idx, double q) {
    const double phi = std::numbers::pi * idx / A;
    CVec v(2);
    v << std::sqrt(q) * std::cos(phi), std::sqrt(q) * std::sin(phi);
    return v;
  };
  out.precoders.common() = dir(best.ac, best.ic * unit);
  out.precoders.priv(0) = dir(best.a1, best.i1 * unit);
  out.precoders.priv(1) = dir(best.a2, best.i2 * unit);
  out.common_rates = RVec::Zero(2);
  out.common_rates(u1 >= u2 ? 0 : 1) = best.common;
  return out;
}

// ---- surrogate probes ----------------------------------------------------------

namespace {

CVec random_cvec(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, std::sqrt(0.5) * scale);
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(N(rng), N(rng));
  return v;
}

Precoders random_precoders(std::size_t nt, std::size_t K, double power, std::mt19937_64& rng) {
  Precoders P(nt, K);
  for (Eigen::Index s = 0; s <= ei(K); ++s) P.matrix().col(s) = random_cvec(ei(nt), rng);
  P.matrix() *= std::sqrt(power / P.total_power());
  return P;
}

double averaged_true_wiretap(const AveragedStream& a, const Precoders& P, std::size_t k, std::size_t j,
                             double noise) {
  std::vector<CVec> streams;
  for (std::size_t i = 0; i < P.users(); ++i)
    if (i != j) streams.emplace_back(P.priv(i));
  return averaged_wmse(a, streams, P.priv(k), noise);
}

}  // namespace

std::string TaylorReport::summary() const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << "samples=" << samples << " exp=" << exp_violation << " ratio=" << ratio_violation
     << " wiretap_wmse=" << wiretap_violation << " tangency=" << tangency << " wiretap_sinr_exceed="
     << wiretap_sinr_exceed << "/" << wiretap_sinr_probes << " (worst " << wiretap_sinr_worst << ")";
  return os.str();
}

TaylorReport check_taylor_bounds(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  constexpr double ln2 = std::numbers::ln2;
  TaylorReport r;
  r.samples = samples;
  double worst_exp = -std::numeric_limits<double>::infinity();
  double worst_ratio = worst_exp, worst_wmse = worst_exp;

  for (std::size_t s = 0; s < samples; ++s) {
    // 2^a >= 2^a0 (1 + ln2 (a - a0))
    {
      const double a0 = -3.0 + 9.0 * U(rng), a = -3.0 + 9.0 * U(rng);
      const double e0 = std::exp2(a0);
      worst_exp = std::max(worst_exp, e0 * (1.0 + ln2 * (a - a0)) - std::exp2(a));
      r.tangency = std::max(r.tangency, std::abs(e0 * (1.0 + ln2 * (a0 - a0)) - e0));
    }
    // |h^H p|^2 / beta >= (2 / beta0) Re{(h h^H p0)^H p} - |h^H p0|^2 beta / beta0^2
    {
      const Eigen::Index nt = U(rng) < 0.5 ? 2 : 4;
      const CVec h = random_cvec(nt, rng), p0 = random_cvec(nt, rng, 2.0), p = random_cvec(nt, rng, 2.0);
      const double b0 = 0.2 + 5.0 * U(rng), b = 0.2 + 5.0 * U(rng);
      const cplx hp0 = h.dot(p0);
      auto lin = [&](const CVec& x, double beta) {
        return 2.0 / b0 * std::real((h * hp0).dot(x)) - std::norm(hp0) * beta / (b0 * b0);
      };
      worst_ratio = std::max(worst_ratio, lin(p, b) - std::norm(h.dot(p)) / b);
      r.tangency = std::max(r.tangency, std::abs(lin(p0, b0) - std::norm(hp0) / b0));
    }
    // linearised averaged eavesdropper WMSE <= the convex original
    if (s % 10 == 0) {
      const std::size_t K = U(rng) < 0.5 ? 2 : 3, nt = U(rng) < 0.5 ? 2 : 4;
      const double power = std::exp2(6.0 * U(rng));
      std::vector<ChannelSet> hs;
      for (int m = 0; m < 4; ++m) hs.push_back(random_channels(K, nt, rng()));
      const Precoders P0 = random_precoders(nt, K, power, rng);
      const auto avg = compute_averages(update_equalizers_and_weights(P0, hs, 1.0), hs);
      for (int trial = 0; trial < 10; ++trial) {
        const Precoders P = random_precoders(nt, K, power * (0.1 + U(rng)), rng);
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            const auto& a = avg.wiretap[k][j];
            const double scale = std::max(1.0, std::abs(averaged_true_wiretap(a, P, k, j, 1.0)));
            worst_wmse = std::max(worst_wmse, (linearized_wiretap_wmse(a, P, P0, k, j, 1.0) -
                                               averaged_true_wiretap(a, P, k, j, 1.0)) / scale);
            if (trial == 0)
              r.tangency = std::max(r.tangency, std::abs(linearized_wiretap_wmse(a, P0, P0, k, j, 1.0) -
                                                         averaged_true_wiretap(a, P0, k, j, 1.0)));
          }
      }
    }
    // bilinear eavesdropper-SINR bound as used by the perfect-CSIT subproblem
    if (s % 10 == 5) {
      const std::size_t K = 3, nt = 2;
      const auto H = random_channels(K, nt, rng());
      const Precoders P0 = random_precoders(nt, K, 10.0, rng), P = random_precoders(nt, K, 10.0, rng);
      const auto b0 = compute_sinrs(H, P0, 1.0), b1 = compute_sinrs(H, P, 1.0);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j) {
          if (j == k) continue;
          const CVec hj = H.h(j);
          double lin = 0.0, interf0 = 0.0;
          for (std::size_t i = 0; i < K; ++i) {
            if (i == k || i == j) continue;
            const cplx x0 = hj.dot(P0.priv(i));
            lin += 2.0 * std::real(std::conj(x0) * hj.dot(P.priv(i))) - std::norm(x0);
            interf0 += std::norm(x0);
          }
          const double rho0 = b0.sinr_wiretap(ei(k), ei(j));
          const double rho_min = (std::norm(hj.dot(P.priv(k))) - rho0 * lin) / (interf0 + 1.0);
          const double gap = b1.sinr_wiretap(ei(k), ei(j)) - std::max(rho_min, 0.0);
          ++r.wiretap_sinr_probes;
          if (gap > 1e-9) {
            ++r.wiretap_sinr_exceed;
            r.wiretap_sinr_worst = std::max(r.wiretap_sinr_worst, gap);
          }
        }
    }
  }
  r.exp_violation = std::max(0.0, worst_exp);
  r.ratio_violation = std::max(0.0, worst_ratio);
  r.wiretap_violation = std::max(0.0, worst_wmse);
  return r;
}

// ---- rate / WMMSE identities -----------------------------------------------------

std::string RateWmmseReport::summary() const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << "instances=" << instances << " identity=" << identity_residual
     << " zero_precoder=" << zero_precoder_residual << " equalizer_violations=" << equalizer_violations << "/"
     << equalizer_probes << " weight_violations=" << weight_violations << "/" << weight_probes;
  return os.str();
}

RateWmmseReport check_rate_wmmse(std::size_t instances, std::uint64_t seed, std::size_t equalizer_probes,
                                 std::size_t weight_grid) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RateWmmseReport r;
  r.instances = instances;

  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t K = U(rng) < 0.5 ? 2 : 3, nt = U(rng) < 0.5 ? 2 : 4;
    const auto H = random_channels(K, nt, rng());
    const double power = std::pow(10.0, 3.0 * U(rng));
    const Precoders P = random_precoders(nt, K, power, rng);
    r.identity_residual = std::max(r.identity_residual, rate_wmmse_gap(H, P, 1.0).max());
    if (n == 0) r.zero_precoder_residual = rate_wmmse_gap(H, Precoders(nt, K), 1.0).max();

    // perturbation probes on one stream of each kind
    const auto s = mmse_sample(H, P, 1.0, Scheme::RS);
    const std::vector<StreamMmse> probes{s.common[0], s.priv[0], s.wiretap[0][1]};
    for (const auto& st : probes) {
      const double e_star = mse(st.g, st.T, st.signal);
      for (std::size_t q = 0; q < equalizer_probes; ++q) {
        const double mag = std::max(std::abs(st.g), 1e-3) * std::pow(10.0, -3.0 + 3.0 * U(rng));
        const cplx g = st.g + std::polar(mag, 2.0 * std::numbers::pi * U(rng));
        ++r.equalizer_probes;
        if (mse(g, st.T, st.signal) < e_star) ++r.equalizer_violations;
      }
      const double x_star = wmse(st.omega, e_star);
      for (std::size_t q = 0; q < weight_grid; ++q) {
        const double expo = -2.0 + 4.0 * static_cast<double>(q) / static_cast<double>(weight_grid - 1);
        ++r.weight_probes;
        if (wmse(st.omega * std::pow(10.0, expo), e_star) < x_star) ++r.weight_violations;
      }
    }
  }
  return r;
}

}  // namespace secrsma
