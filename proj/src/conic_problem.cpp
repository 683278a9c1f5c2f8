#include <cmath>
#include <iomanip>
#include <ostream>

#include "secrsma/conic.hpp"

namespace secrsma::conic {

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) {
  for (const auto& [v, c] : o.terms) terms.emplace_back(v, -c);
  constant -= o.constant;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  for (auto& t : terms) t.second *= s;
  constant *= s;
  return *this;
}

double LinearExpr::evaluate(const RVec& x) const {
  double acc = constant;
  for (const auto& [v, c] : terms) acc += c * x(v);
  return acc;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
LinearExpr operator*(double s, LinearExpr a) { return a *= s; }
LinearExpr operator-(LinearExpr a) { return a *= -1.0; }

Index ConicProblem::add_variable(std::string name) {
  names_.push_back(std::move(name));
  return static_cast<Index>(names_.size()) - 1;
}

void ConicProblem::check(const LinearExpr& e) const {
  for (const auto& [v, c] : e.terms) {
    require_dims(v >= 0 && v < variables(), "expression references an unknown variable");
    require(std::isfinite(c), "non-finite coefficient");
  }
  require(std::isfinite(e.constant), "non-finite constant");
}

void ConicProblem::minimize(LinearExpr objective) {
  check(objective);
  objective_ = std::move(objective);
}

ConicProblem::Handle ConicProblem::push(Block b) {
  for (const auto& r : b.rows) check(r);
  blocks_.push_back(std::move(b));
  return blocks_.size() - 1;
}

ConicProblem::Handle ConicProblem::add_equality(LinearExpr expr, std::string tag) {
  return push({BlockKind::Equality, {std::move(expr)}, std::move(tag)});
}

ConicProblem::Handle ConicProblem::add_nonnegative(LinearExpr expr, std::string tag) {
  return push({BlockKind::Nonnegative, {std::move(expr)}, std::move(tag)});
}

ConicProblem::Handle ConicProblem::add_second_order(LinearExpr bound, std::vector<LinearExpr> vec,
                                                    std::string tag) {
  Block b{BlockKind::SecondOrder, {std::move(bound)}, std::move(tag)};
  for (auto& r : vec) b.rows.push_back(std::move(r));
  return push(std::move(b));
}

ConicProblem::Handle ConicProblem::add_rotated(LinearExpr y, LinearExpr z, std::vector<LinearExpr> vec,
                                               std::string tag) {
  Block b{BlockKind::RotatedSecondOrder, {std::move(y), std::move(z)}, std::move(tag)};
  for (auto& r : vec) b.rows.push_back(std::move(r));
  return push(std::move(b));
}

ConicProblem::Handle ConicProblem::add_exponential(LinearExpr x, LinearExpr y, LinearExpr z, std::string tag) {
  return push({BlockKind::Exponential, {std::move(x), std::move(y), std::move(z)}, std::move(tag)});
}

ConeFamilies ConicProblem::families() const {
  ConeFamilies f;
  for (const auto& b : blocks_) {
    if (b.kind == BlockKind::SecondOrder || b.kind == BlockKind::RotatedSecondOrder) f.second_order = true;
    if (b.kind == BlockKind::Exponential) f.exponential = true;
  }
  return f;
}

double block_residual(const Block& b, const RVec& x) {
  auto val = [&](std::size_t i) { return b.rows[i].evaluate(x); };
  switch (b.kind) {
    case BlockKind::Equality:
      return std::abs(val(0));
    case BlockKind::Nonnegative:
      return std::max(0.0, -val(0));
    case BlockKind::SecondOrder: {
      double sq = 0.0;
      for (std::size_t i = 1; i < b.rows.size(); ++i) sq += std::pow(val(i), 2);
      return std::max(0.0, std::sqrt(sq) - val(0));
    }
    case BlockKind::RotatedSecondOrder: {
      const double y = val(0), z = val(1);
      double sq = 0.0;
      for (std::size_t i = 2; i < b.rows.size(); ++i) sq += std::pow(val(i), 2);
      return std::max({0.0, -y, -z, sq - y * z});
    }
    case BlockKind::Exponential: {
      const double xx = val(0), y = val(1), z = val(2);
      if (y > 0.0) return std::max(0.0, y * std::exp(z / y) - xx);
      // closure at y = 0 is {x >= 0, z <= 0}
      return std::max({0.0, -y, -xx, z});
    }
  }
  return 0.0;
}

double ConicProblem::residual(Handle h, const RVec& x) const { return block_residual(blocks_.at(h), x); }

double ConicProblem::max_residual(const RVec& x) const {
  double worst = 0.0;
  for (const auto& b : blocks_) worst = std::max(worst, block_residual(b, x));
  return worst;
}

namespace {

const char* kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::Equality: return "eq";
    case BlockKind::Nonnegative: return "nonneg";
    case BlockKind::SecondOrder: return "soc";
    case BlockKind::RotatedSecondOrder: return "rsoc";
    case BlockKind::Exponential: return "exp";
  }
  return "?";
}

void write_expr(std::ostream& os, const LinearExpr& e) {
  os << e.constant << ' ' << e.terms.size();
  for (const auto& [v, c] : e.terms) os << ' ' << v << ' ' << c;
  os << '\n';
}

}  // namespace

void ConicProblem::dump(std::ostream& os) const {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  os << "secrsma-conic 1\n";
  os << "variables " << names_.size() << '\n';
  for (std::size_t i = 0; i < names_.size(); ++i) os << "v " << i << ' ' << names_[i] << '\n';
  os << "objective ";
  write_expr(os, objective_);
  os << "blocks " << blocks_.size() << '\n';
  for (const auto& b : blocks_) {
    os << "block " << kind_name(b.kind) << ' ' << (b.tag.empty() ? "-" : b.tag) << ' ' << b.rows.size() << '\n';
    for (const auto& r : b.rows) {
      os << "row ";
      write_expr(os, r);
    }
  }
  os << "end\n";
  os.flags(old_flags);
  os.precision(old_prec);
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

// ---------------------------------------------------------------------------

CVec ComplexVar::value(const RVec& x) const {
  CVec out(size());
  for (Eigen::Index i = 0; i < size(); ++i)
    out(i) = cplx(x(re[static_cast<std::size_t>(i)]), x(im[static_cast<std::size_t>(i)]));
  return out;
}

ComplexVar add_complex_vector(ConicProblem& problem, Eigen::Index size, const std::string& name) {
  ComplexVar v;
  for (Eigen::Index i = 0; i < size; ++i) {
    v.re.push_back(problem.add_variable(name + ".re" + std::to_string(i)));
    v.im.push_back(problem.add_variable(name + ".im" + std::to_string(i)));
  }
  return v;
}

std::pair<LinearExpr, LinearExpr> inner(const CVec& w, const ComplexVar& p) {
  require_dims(w.size() == p.size(), "inner product length mismatch");
  // (a - ib)(x + iy) = (a x + b y) + i (a y - b x)
  LinearExpr re, im;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double a = w(i).real(), b = w(i).imag();
    const auto ui = static_cast<std::size_t>(i);
    if (a != 0.0) {
      re.terms.emplace_back(p.re[ui], a);
      im.terms.emplace_back(p.im[ui], a);
    }
    if (b != 0.0) {
      re.terms.emplace_back(p.im[ui], b);
      im.terms.emplace_back(p.re[ui], -b);
    }
  }
  return {std::move(re), std::move(im)};
}

LinearExpr real_inner(const CVec& w, const ComplexVar& p) { return inner(w, p).first; }

ConicProblem::Handle add_quadratic_le_linear(ConicProblem& problem, const ComplexQuadraticForm& form,
                                             LinearExpr bound, std::string tag) {
  require(form.constant >= 0.0, "quadratic-form constant must be nonnegative");
  std::vector<LinearExpr> vec;
  for (const auto& [w, p] : form.terms) {
    require(p != nullptr, "quadratic term without a variable");
    auto [re, im] = inner(w, *p);
    vec.push_back(std::move(re));
    vec.push_back(std::move(im));
  }
  if (form.constant > 0.0) vec.emplace_back(std::sqrt(form.constant));
  return problem.add_rotated(std::move(bound), LinearExpr(1.0), std::move(vec), std::move(tag));
}

ConicProblem::Handle add_exp_rate_link(ConicProblem& problem, Index rho, Index alpha, std::string tag) {
  return problem.add_exponential(LinearExpr(1.0) + LinearExpr::var(rho), LinearExpr(1.0),
                                 LinearExpr::var(alpha, std::log(2.0)), std::move(tag));
}

}  // namespace secrsma::conic
