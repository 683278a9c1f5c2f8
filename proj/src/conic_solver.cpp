// Log-barrier interior-point method for the small dense conic programs built
// by the algorithm modules. Equalities are eliminated through a nullspace
// basis; a phase-I search with a scalar relaxation finds a strictly feasible
// start (or diagnoses infeasibility); phase II follows the central path until
// nu / t falls below the requested tolerance.

#include <algorithm>
#include <cmath>
#include <limits>

#include "secrsma/conic.hpp"

namespace secrsma::conic {
namespace {

constexpr double kBallRadius = 1e6;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Cone { Nonneg, Soc, Exp };

// One cone block over the reduced coordinates. Only columns that the block
// actually touches are kept, so Hessian assembly stays cheap for the sparse
// rows typical of the lowered subproblems.
struct CBlock {
  Cone cone;
  std::vector<int> cols;
  RMat G;  // rows x cols.size()
  RVec h;
  RVec relax;  // phase-I shift direction
};

double nu_of(Cone c) { return c == Cone::Nonneg ? 1.0 : c == Cone::Soc ? 2.0 : 3.0; }

// Barrier value, gradient and Hessian in the block's own coordinates.
// Returns false outside the open cone.
bool barrier(Cone cone, const RVec& v, double& f, RVec& g, RMat& H, bool derivs) {
  switch (cone) {
    case Cone::Nonneg: {
      if (!(v(0) > 0.0)) return false;
      f = -std::log(v(0));
      if (derivs) {
        g.resize(1);
        H.resize(1, 1);
        g(0) = -1.0 / v(0);
        H(0, 0) = 1.0 / (v(0) * v(0));
      }
      return true;
    }
    case Cone::Soc: {
      const double t = v(0);
      const double un = v.tail(v.size() - 1).norm();
      if (!(t > un)) return false;
      const double w = (t - un) * (t + un);
      if (!(w > 0.0)) return false;
      f = -std::log(w);
      if (derivs) {
        RVec dw(v.size());
        dw(0) = 2.0 * t;
        dw.tail(v.size() - 1) = -2.0 * v.tail(v.size() - 1);
        g = -dw / w;
        H = dw * dw.transpose() / (w * w);
        H(0, 0) -= 2.0 / w;
        for (Eigen::Index i = 1; i < v.size(); ++i) H(i, i) += 2.0 / w;
      }
      return true;
    }
    case Cone::Exp: {
      const double x = v(0), y = v(1), z = v(2);
      if (!(x > 0.0 && y > 0.0)) return false;
      const double lr = std::log(x / y);
      const double psi = y * lr - z;
      if (!(psi > 0.0) || !std::isfinite(psi)) return false;
      f = -std::log(psi) - std::log(x) - std::log(y);
      if (derivs) {
        RVec dpsi(3);
        dpsi << y / x, lr - 1.0, -1.0;
        RMat d2(3, 3);
        d2.setZero();
        d2(0, 0) = -y / (x * x);
        d2(0, 1) = d2(1, 0) = 1.0 / x;
        d2(1, 1) = -1.0 / y;
        g = -dpsi / psi;
        g(0) -= 1.0 / x;
        g(1) -= 1.0 / y;
        H = dpsi * dpsi.transpose() / (psi * psi) - d2 / psi;
        H(0, 0) += 1.0 / (x * x);
        H(1, 1) += 1.0 / (y * y);
      }
      return true;
    }
  }
  return false;
}

RVec dense_row(const LinearExpr& e, Index n) {
  RVec a = RVec::Zero(n);
  for (const auto& [v, c] : e.terms) a(v) += c;
  return a;
}

class BarrierSolver {
 public:
  BarrierSolver(const ConicProblem& p, const SolveOptions& o) : prob_(p), opt_(o) {}

  SolveOutcome run();

 private:
  // How the phase-I relaxation enters the current evaluation.
  enum class Mode { PhaseOne, Relaxed, Plain };

  bool eliminate(SolveOutcome& out);
  void lower_blocks();
  double nu() const;

  // Value (and optionally derivatives) of t * objective + barrier at z.
  // Phase I: z = (y, s) and the objective is s.
  bool evaluate(const RVec& z, double t, bool derivs, double& f, RVec& g, RMat& H) const;
  bool interior(const RVec& z) const {
    double f;
    RVec g;
    RMat H;
    return evaluate(z, 0.0, false, f, g, H);
  }

  enum class Center { Ok, StepCap, Failed };
  Center center(RVec& z, double t, int& steps);

  RVec to_x(const RVec& y) const { return identity_basis_ ? RVec(xp_ + y.head(dim_)) : RVec(xp_ + Z_ * y.head(dim_)); }

  const ConicProblem& prob_;
  const SolveOptions& opt_;

  Index n_ = 0;
  int dim_ = 0;
  RVec xp_;
  RMat Z_;
  bool identity_basis_ = false;
  std::vector<CBlock> blocks_;
  RVec cost_;  // reduced objective
  double cost0_ = 0.0;

  Mode mode_ = Mode::Plain;
  double relax_ = 0.0;
  RVec center_;
};

bool BarrierSolver::eliminate(SolveOutcome& out) {
  n_ = prob_.variables();
  std::vector<const Block*> eqs;
  for (const auto& b : prob_.blocks())
    if (b.kind == BlockKind::Equality) eqs.push_back(&b);

  RVec start = RVec::Zero(n_);
  if (opt_.initial) {
    require_dims(opt_.initial->size() == n_, "initial point has the wrong dimension");
    start = *opt_.initial;
  }

  if (eqs.empty()) {
    xp_ = start;
    dim_ = n_;
    identity_basis_ = true;
    return true;
  }

  const auto m = static_cast<Eigen::Index>(eqs.size());
  RMat A(m, n_);
  RVec b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A.row(i) = dense_row(eqs[static_cast<std::size_t>(i)]->rows[0], n_).transpose();
    b(i) = eqs[static_cast<std::size_t>(i)]->rows[0].constant;
  }
  Eigen::JacobiSVD<RMat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * std::max(1.0, smax)) ++rank;

  // project the starting guess onto {A x + b = 0}
  const RVec r = A * start + b;
  RVec corr = RVec::Zero(n_);
  if (rank > 0) {
    const RVec ur = svd.matrixU().leftCols(rank).transpose() * r;
    corr = svd.matrixV().leftCols(rank) * ur.cwiseQuotient(sv.head(rank));
  }
  xp_ = start - corr;
  const double eq_res = (A * xp_ + b).cwiseAbs().maxCoeff();
  if (eq_res > std::max(opt_.tolerance, 1e-9) * (1.0 + b.cwiseAbs().maxCoeff())) {
    out.status = SolveStatus::Infeasible;
    out.message = "inconsistent linear equalities";
    return false;
  }
  dim_ = static_cast<int>(n_ - rank);
  Z_ = svd.matrixV().rightCols(dim_);
  return true;
}

void BarrierSolver::lower_blocks() {
  auto reduce = [&](const LinearExpr& e, RVec& row, double& cst) {
    const RVec a = dense_row(e, n_);
    cst = e.constant + a.dot(xp_);
    row = identity_basis_ ? a : RVec(Z_.transpose() * a);
  };

  for (const auto& b : prob_.blocks()) {
    if (b.kind == BlockKind::Equality) continue;
    std::vector<RVec> rows;
    std::vector<double> consts;
    for (const auto& e : b.rows) {
      RVec r;
      double c;
      reduce(e, r, c);
      rows.push_back(std::move(r));
      consts.push_back(c);
    }
    CBlock cb;
    switch (b.kind) {
      case BlockKind::Nonnegative:
        cb.cone = Cone::Nonneg;
        cb.relax = RVec::Ones(1);
        break;
      case BlockKind::SecondOrder:
        cb.cone = Cone::Soc;
        cb.relax = RVec::Zero(static_cast<Eigen::Index>(rows.size()));
        cb.relax(0) = 1.0;
        break;
      case BlockKind::RotatedSecondOrder: {
        // ||u||^2 <= y z  <=>  ||(y - z, 2u)|| <= y + z
        std::vector<RVec> r2{rows[0] + rows[1], rows[0] - rows[1]};
        std::vector<double> c2{consts[0] + consts[1], consts[0] - consts[1]};
        for (std::size_t i = 2; i < rows.size(); ++i) {
          r2.push_back(2.0 * rows[i]);
          c2.push_back(2.0 * consts[i]);
        }
        rows = std::move(r2);
        consts = std::move(c2);
        cb.cone = Cone::Soc;
        cb.relax = RVec::Zero(static_cast<Eigen::Index>(rows.size()));
        cb.relax(0) = 1.0;
        break;
      }
      case BlockKind::Exponential: {
        cb.cone = Cone::Exp;
        cb.relax.resize(3);
        const bool y_fixed = (rows[1].array() == 0.0).all() && consts[1] > 0.0;
        if (y_fixed)
          cb.relax << 1.0, 0.0, 0.0;
        else
          cb.relax << 1.0, 1.0, -1.0;  // (1, 1, -1) lies inside the cone
        break;
      }
      case BlockKind::Equality:
        break;
    }
    for (int c = 0; c < dim_; ++c) {
      bool used = false;
      for (const auto& r : rows) used = used || r(c) != 0.0;
      if (used) cb.cols.push_back(c);
    }
    cb.G.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cb.cols.size()));
    cb.h.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cb.cols.size(); ++j)
        cb.G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i](cb.cols[j]);
      cb.h(static_cast<Eigen::Index>(i)) = consts[i];
    }
    blocks_.push_back(std::move(cb));
  }

  const RVec c = dense_row(prob_.objective(), n_);
  cost0_ = prob_.objective().constant + c.dot(xp_);
  cost_ = identity_basis_ ? c : RVec(Z_.transpose() * c);
}

double BarrierSolver::nu() const {
  double v = 1.0;  // bounding ball
  for (const auto& b : blocks_) v += nu_of(b.cone);
  if (mode_ == Mode::PhaseOne) v += 1.0;  // s >= -1
  return v;
}

bool BarrierSolver::evaluate(const RVec& z, double t, bool derivs, double& f, RVec& g, RMat& H) const {
  const Eigen::Index nz = z.size();
  const double shift = mode_ == Mode::PhaseOne ? z(dim_) : mode_ == Mode::Relaxed ? relax_ : 0.0;
  f = 0.0;
  if (derivs) {
    g = RVec::Zero(nz);
    H = RMat::Zero(nz, nz);
  }

  // bounding ball around the phase start
  {
    const RVec d = z.head(dim_) - center_;
    const double q = kBallRadius * kBallRadius - d.squaredNorm();
    if (!(q > 0.0)) return false;
    f -= std::log(q);
    if (derivs) {
      g.head(dim_) += 2.0 * d / q;
      H.topLeftCorner(dim_, dim_) += 4.0 * d * d.transpose() / (q * q);
      H.diagonal().head(dim_).array() += 2.0 / q;
    }
  }

  if (mode_ == Mode::PhaseOne) {
    const double s1 = shift + 1.0;
    if (!(s1 > 0.0)) return false;
    f += t * shift - std::log(s1);
    if (derivs) {
      g(dim_) += t - 1.0 / s1;
      H(dim_, dim_) += 1.0 / (s1 * s1);
    }
  } else {
    f += t * cost_.dot(z.head(dim_));
    if (derivs) g.head(dim_) += t * cost_;
  }

  double fb;
  RVec gb;
  RMat Hb;
  RVec v;
  for (const auto& b : blocks_) {
    v = b.h + shift * b.relax;
    for (std::size_t j = 0; j < b.cols.size(); ++j) v += b.G.col(static_cast<Eigen::Index>(j)) * z(b.cols[j]);
    if (!barrier(b.cone, v, fb, gb, Hb, derivs)) return false;
    f += fb;
    if (!derivs) continue;
    const RVec gz = b.G.transpose() * gb;
    const RMat HG = Hb * b.G;
    const RMat Hz = b.G.transpose() * HG;
    const auto nc = b.cols.size();
    for (std::size_t i = 0; i < nc; ++i) {
      g(b.cols[i]) += gz(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < nc; ++j)
        H(b.cols[i], b.cols[j]) += Hz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    if (mode_ == Mode::PhaseOne) {
      // coupling with the relaxation variable s
      const double gs = b.relax.dot(gb);
      const RVec Hr = Hb * b.relax;
      g(dim_) += gs;
      H(dim_, dim_) += b.relax.dot(Hr);
      const RVec cross = b.G.transpose() * Hr;
      for (std::size_t i = 0; i < nc; ++i) {
        H(b.cols[i], dim_) += cross(static_cast<Eigen::Index>(i));
        H(dim_, b.cols[i]) += cross(static_cast<Eigen::Index>(i));
      }
    }
  }
  return std::isfinite(f);
}

BarrierSolver::Center BarrierSolver::center(RVec& z, double t, int& steps) {
  double f;
  RVec g;
  RMat H;
  double best_lambda2 = kInf;
  int stagnant = 0;
  for (;;) {
    if (steps >= opt_.max_newton_steps) return Center::StepCap;
    if (!evaluate(z, t, true, f, g, H)) return Center::Failed;
    if (!H.allFinite() || !g.allFinite()) return Center::Failed;

    // Jacobi equilibration, then LDLT with a tiny ridge; a roundoff-indefinite
    // Hessian (large t, nearly flat directions) gets a growing ridge instead
    RVec d = H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const RMat Hs = d.asDiagonal() * H * d.asDiagonal();
    const RVec gs = -d.cwiseProduct(g);
    RVec dz;
    double lambda2 = -1.0;
    for (double ridge = 1e-14; ridge <= 1e-2; ridge *= 100.0) {
      RMat Hr = Hs;
      Hr.diagonal().array() += ridge;
      Eigen::LDLT<RMat> ldlt(Hr);
      if (ldlt.info() != Eigen::Success) continue;
      dz = d.cwiseProduct(ldlt.solve(gs));
      if (!dz.allFinite()) continue;
      lambda2 = -g.dot(dz);
      if (lambda2 >= 0.0) break;
    }
    if (!(lambda2 >= 0.0)) return Center::Failed;
    ++steps;

    if (lambda2 / 2.0 <= 1e-10) return Center::Ok;
    // near-degenerate feasible sets stall at roundoff level; that is centred enough
    if (lambda2 < best_lambda2 * 0.5) {
      best_lambda2 = lambda2;
      stagnant = 0;
    } else if (lambda2 < 1e-3 && ++stagnant >= 6) {
      return Center::Ok;
    }

    double alpha = 1.0;
    const bool quadratic_region = lambda2 < 0.0625;  // lambda < 1/4
    double fn;
    RVec gn;
    RMat Hn;
    bool moved = false;
    // at large t the decrease can sit below the resolution of f itself
    const double roundoff = 1e-13 * std::abs(f);
    while (alpha > 1e-14) {
      const RVec zn = z + alpha * dz;
      if (evaluate(zn, t, false, fn, gn, Hn) &&
          (quadratic_region || fn <= f - 0.01 * alpha * lambda2 + roundoff)) {
        z = zn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) return lambda2 < 1e-6 ? Center::Ok : Center::Failed;

    if (mode_ == Mode::PhaseOne && z(dim_) < 0.0) return Center::Ok;
  }
}

SolveOutcome BarrierSolver::run() {
  SolveOutcome out;
  require(opt_.tolerance > 0.0, "solve tolerance must be positive");
  if (!eliminate(out)) return out;
  lower_blocks();
  const double tol = opt_.tolerance;

  auto finish = [&](const RVec& y, SolveStatus status, double gap, std::string msg) {
    const RVec x = to_x(y);
    out.primal = x;
    out.objective = prob_.objective().evaluate(x);
    out.residual = prob_.max_residual(x);
    out.gap_bound = gap;
    out.status = status;
    out.message = std::move(msg);
    if (status == SolveStatus::Optimal && out.residual > tol) {
      out.status = SolveStatus::NumericalFailure;
      out.message = "residual " + std::to_string(out.residual) + " exceeds tolerance";
    }
    return out;
  };

  // everything pinned by the equalities: just check the cones
  if (dim_ == 0) {
    const RVec y = RVec::Zero(0);
    if (prob_.max_residual(to_x(y)) > tol) {
      out.status = SolveStatus::Infeasible;
      out.message = "unique equality solution violates a cone";
      return out;
    }
    return finish(y, SolveStatus::Optimal, 0.0, "fixed by equalities");
  }

  RVec y = RVec::Zero(dim_);
  center_ = y;

  mode_ = Mode::Plain;
  if (!interior(y)) {
    // ---- phase I: minimise the uniform relaxation s
    mode_ = Mode::PhaseOne;
    RVec z(dim_ + 1);
    z.head(dim_) = y;
    double s = 1.0;
    for (; s < 1e15; s *= 4.0) {
      z(dim_) = s;
      if (interior(z)) break;
    }
    if (s >= 1e15) {
      out.status = SolveStatus::NumericalFailure;
      out.message = "could not construct a phase-I start";
      return out;
    }
    double t = 1.0;
    const double nu1 = nu();
    const double tol1 = tol * 1e-2;
    bool feasible = false;
    for (;;) {
      const auto c = center(z, t, out.newton_steps);
      if (z(dim_) < 0.0) {
        feasible = true;
        break;
      }
      if (c == Center::Failed) {
        out.status = SolveStatus::NumericalFailure;
        out.message = "phase-I Newton step failed";
        return out;
      }
      if (c == Center::StepCap) {
        out.status = SolveStatus::MaxIterations;
        out.message = "phase-I step cap reached before finding a feasible point";
        return out;
      }
      if (nu1 / t <= tol1) break;
      t *= 10.0;
    }
    const double s_star = z(dim_);
    if (!feasible) {
      const double lower = s_star - nu1 / t;
      if (lower > tol / 2.0) {
        out.status = SolveStatus::Infeasible;
        out.message = "phase-I optimum s = " + std::to_string(s_star) + " > 0";
        return out;
      }
      // feasible set with empty interior: solve a slightly relaxed problem
      mode_ = Mode::Relaxed;
      relax_ = s_star + tol * 1e-2;
    } else {
      mode_ = Mode::Plain;
    }
    y = z.head(dim_);
    if (!interior(y)) {
      out.status = SolveStatus::NumericalFailure;
      out.message = "phase-I point is not interior";
      return out;
    }
  }

  // ---- phase II (the ball keeps its phase-I centre)
  const double nu2 = nu();
  double t = 1.0;
  int phase2_steps = 0;
  for (;;) {
    const auto c = center(y, t, phase2_steps);
    if (c == Center::Failed) {
      out.newton_steps += phase2_steps;
      // the last iterate is still feasible; report it if it is essentially done
      if (nu2 / t <= tol * 10.0) return finish(y, SolveStatus::Optimal, nu2 / t, "stalled near optimum");
      return finish(y, SolveStatus::NumericalFailure, nu2 / t, "Newton step failed");
    }
    if (c == Center::StepCap) {
      out.newton_steps += phase2_steps;
      return finish(y, SolveStatus::MaxIterations, nu2 / t, "step cap reached");
    }
    if (nu2 / t <= tol) break;
    t = std::min(t * 10.0, nu2 / tol);
  }
  out.newton_steps += phase2_steps;

  if ((y - center_).norm() > 0.5 * kBallRadius)
    return finish(y, SolveStatus::NumericalFailure, nu2 / t, "iterate reached the bounding ball (unbounded?)");
  return finish(y, SolveStatus::Optimal, nu2 / t, mode_ == Mode::Relaxed ? "empty interior; relaxed" : "");
}

}  // namespace

SolveOutcome solve(const ConicProblem& problem, const SolveOptions& options) {
  BarrierSolver s(problem, options);
  return s.run();
}

}  // namespace secrsma::conic
