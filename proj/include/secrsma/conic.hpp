#pragma once

// Small dense conic programs: linear objective (minimised), linear
// equalities, and cone memberships of affine maps of one real decision
// vector. Complex quantities are expanded over interleaved real/imaginary
// coordinates by the helpers at the bottom of this header.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secrsma/common.hpp"

namespace secrsma::conic {

using Index = int;

/// sum_i coef_i * x[var_i] + constant
struct LinearExpr {
  std::vector<std::pair<Index, double>> terms;
  double constant = 0.0;

  LinearExpr() = default;
  LinearExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static LinearExpr var(Index v, double coef = 1.0) {
    LinearExpr e;
    e.terms.emplace_back(v, coef);
    return e;
  }

  LinearExpr& operator+=(const LinearExpr& o);
  LinearExpr& operator-=(const LinearExpr& o);
  LinearExpr& operator*=(double s);
  double evaluate(const RVec& x) const;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double s, LinearExpr a);
LinearExpr operator-(LinearExpr a);

enum class BlockKind { Equality, Nonnegative, SecondOrder, RotatedSecondOrder, Exponential };

/// Affine rows bound together by a cone:
///  Equality            rows[0] == 0
///  Nonnegative         rows[0] >= 0
///  SecondOrder         ||rows[1..]|| <= rows[0]
///  RotatedSecondOrder  ||rows[2..]||^2 <= rows[0] * rows[1], rows[0], rows[1] >= 0
///  Exponential         rows = (x, y, z): y exp(z / y) <= x, y > 0
struct Block {
  BlockKind kind;
  std::vector<LinearExpr> rows;
  std::string tag;
};

struct ConeFamilies {
  bool second_order = false;
  bool exponential = false;
};

class ConicProblem {
 public:
  Index add_variable(std::string name);
  Index variables() const { return static_cast<Index>(names_.size()); }
  const std::string& name(Index v) const { return names_.at(static_cast<std::size_t>(v)); }

  void minimize(LinearExpr objective);
  const LinearExpr& objective() const { return objective_; }

  using Handle = std::size_t;
  Handle add_equality(LinearExpr expr, std::string tag = {});
  Handle add_nonnegative(LinearExpr expr, std::string tag = {});
  Handle add_second_order(LinearExpr bound, std::vector<LinearExpr> vec, std::string tag = {});
  Handle add_rotated(LinearExpr y, LinearExpr z, std::vector<LinearExpr> vec, std::string tag = {});
  Handle add_exponential(LinearExpr x, LinearExpr y, LinearExpr z, std::string tag = {});

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(Handle h) const { return blocks_.at(h); }
  ConeFamilies families() const;

  /// Violation of one block at x (0 when satisfied).
  double residual(Handle h, const RVec& x) const;
  double max_residual(const RVec& x) const;

  /// Self-describing text form; the reference cross-check script reads it.
  void dump(std::ostream& os) const;

 private:
  Handle push(Block b);
  void check(const LinearExpr& e) const;

  std::vector<std::string> names_;
  LinearExpr objective_;
  std::vector<Block> blocks_;
};

double block_residual(const Block& b, const RVec& x);

// ---- solving --------------------------------------------------------------

enum class SolveStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolveOptions {
  double tolerance = 1e-8;
  int max_newton_steps = 600;
  /// Starting guess; shifted into the interior by a phase-I search.
  std::optional<RVec> initial;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::optional<RVec> primal;
  double objective = 0.0;
  double residual = 0.0;
  /// nu / t at termination; bounds the suboptimality of `objective`.
  double gap_bound = 0.0;
  int newton_steps = 0;
  std::string message;

  bool ok() const { return status == SolveStatus::Optimal; }
};

SolveOutcome solve(const ConicProblem& problem, const SolveOptions& options = {});

// ---- complex-coordinate helpers --------------------------------------------

/// A complex vector variable stored as interleaved (re, im) coordinates.
struct ComplexVar {
  std::vector<Index> re;
  std::vector<Index> im;

  Eigen::Index size() const { return static_cast<Eigen::Index>(re.size()); }
  CVec value(const RVec& x) const;
};

ComplexVar add_complex_vector(ConicProblem& problem, Eigen::Index size, const std::string& name);

/// Real and imaginary parts of w^H p as linear expressions.
std::pair<LinearExpr, LinearExpr> inner(const CVec& w, const ComplexVar& p);

/// Re{w^H p}
LinearExpr real_inner(const CVec& w, const ComplexVar& p);

/// sum_t |w_t^H p_t|^2 + constant, with constant >= 0.
struct ComplexQuadraticForm {
  std::vector<std::pair<CVec, const ComplexVar*>> terms;
  double constant = 0.0;
};

/// sum_t |w_t^H p_t|^2 + constant <= bound, emitted as a rotated cone with
/// second factor 1.
ConicProblem::Handle add_quadratic_le_linear(ConicProblem& problem, const ComplexQuadraticForm& form,
                                             LinearExpr bound, std::string tag = {});

/// 1 + rho >= 2^alpha as (1 + rho, 1, alpha ln 2) in the exponential cone.
ConicProblem::Handle add_exp_rate_link(ConicProblem& problem, Index rho, Index alpha, std::string tag = {});

}  // namespace secrsma::conic
