#include <random>
#include <sstream>

#include "doctest.h"
#include "secrsma/conic.hpp"

using namespace secrsma;
using namespace secrsma::conic;

TEST_CASE("minimize x subject to x >= 3") {
  ConicProblem p;
  auto x = p.add_variable("x");
  p.add_nonnegative(LinearExpr::var(x) - 3.0);
  p.minimize(LinearExpr::var(x));
  auto r = solve(p);
  INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
  CHECK(r.primal->coeff(0) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(r.gap_bound <= 1e-8);
}

TEST_CASE("projection onto a half-space through a rotated cone") {
  // min ||p||^2 s.t. Re(h^H p) >= 1, h = [1, 0]
  ConicProblem p;
  auto pv = add_complex_vector(p, 2, "p");
  auto t = p.add_variable("t");
  CVec h(2);
  h << 1.0, 0.0;
  p.add_nonnegative(real_inner(h, pv) - 1.0);
  ComplexQuadraticForm q;
  CVec e0 = CVec::Zero(2), e1 = CVec::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  q.terms = {{e0, &pv}, {e1, &pv}};
  add_quadratic_le_linear(p, q, LinearExpr::var(t));
  p.minimize(LinearExpr::var(t));
  auto r = solve(p);
  INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
  const CVec sol = pv.value(*r.primal);
  CHECK(std::abs(sol(0) - cplx(1.0, 0.0)) < 1e-6);
  CHECK(std::abs(sol(1)) < 1e-6);
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("quadratic form pinned at its lower end stays feasible") {
  // |p|^2 + sigma^2 <= beta with beta = sigma^2 forces p = 0
  ConicProblem p;
  auto pv = add_complex_vector(p, 1, "p");
  auto beta = p.add_variable("beta");
  p.add_equality(LinearExpr::var(beta) - 1.0);
  ComplexQuadraticForm q;
  q.terms = {{CVec::Ones(1), &pv}};
  q.constant = 1.0;
  add_quadratic_le_linear(p, q, LinearExpr::var(beta));
  p.minimize(LinearExpr::var(pv.re[0]));
  auto r = solve(p);
  INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
  CHECK(r.residual <= 1e-8);
  CHECK(std::abs(pv.value(*r.primal)(0)) < 1e-4);
}

TEST_CASE("scalar real rotated cone describes p^2 <= beta") {
  ConicProblem p;
  auto x = p.add_variable("p");
  auto b = p.add_variable("beta");
  ComplexQuadraticForm q;
  // p is a real scalar: use a one-entry complex var whose imaginary part is pinned
  ComplexVar pv{{x}, {p.add_variable("p.im")}};
  p.add_equality(LinearExpr::var(pv.im[0]));
  q.terms = {{CVec::Ones(1), &pv}};
  auto h = add_quadratic_le_linear(p, q, LinearExpr::var(b));
  RVec pt(3);
  pt << 1.5, 2.25, 0.0;
  CHECK(p.residual(h, pt) == doctest::Approx(0.0));
  pt << 1.5, 2.0, 0.0;
  CHECK(p.residual(h, pt) == doctest::Approx(0.25));
  // maximise p with beta <= 4 -> p = 2
  p.add_nonnegative(4.0 - LinearExpr::var(b));
  p.minimize(-LinearExpr::var(x));
  auto r = solve(p);
  INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
  CHECK(r.primal->coeff(0) == doctest::Approx(2.0).epsilon(1e-7));
}

namespace {

SolveOutcome solve_link(double alpha, double rho) {
  ConicProblem p;
  auto a = p.add_variable("alpha");
  auto r = p.add_variable("rho");
  add_exp_rate_link(p, r, a);
  p.add_equality(LinearExpr::var(a) - alpha);
  p.add_equality(LinearExpr::var(r) - rho);
  p.minimize(LinearExpr::var(a));
  return solve(p);
}

}  // namespace

TEST_CASE("exponential rate link") {
  SUBCASE("boundary points are accepted") {
    auto r1 = solve_link(1.0, 1.0);
    CHECK(r1.ok());
    CHECK(r1.residual <= 1e-8);
    auto r0 = solve_link(0.0, 0.0);
    CHECK(r0.ok());
  }
  SUBCASE("3 < 4 is rejected") {
    auto r = solve_link(2.0, 2.0);
    CHECK(r.status == SolveStatus::Infeasible);
  }
  SUBCASE("maximising alpha recovers log2(1 + rho)") {
    ConicProblem p;
    auto a = p.add_variable("alpha");
    auto r = p.add_variable("rho");
    add_exp_rate_link(p, r, a);
    p.add_nonnegative(3.0 - LinearExpr::var(r));
    p.minimize(-LinearExpr::var(a));
    auto s = solve(p);
    INFO(std::string(to_string(s.status)), " ", s.message);
  REQUIRE(s.ok());
    CHECK(s.primal->coeff(a) == doctest::Approx(2.0).epsilon(1e-7));
  }
}

TEST_CASE("general exponential cone with free middle coordinate") {
  // min x s.t. (x, y, -1) in K_exp, y <= 2: x >= y e^{-1/y}, best at y -> small? minimum over (0, 2]
  // y e^{-1/y} is increasing, so the infimum is 0 and not attained; add y >= 1
  ConicProblem p;
  auto x = p.add_variable("x");
  auto y = p.add_variable("y");
  p.add_exponential(LinearExpr::var(x), LinearExpr::var(y), LinearExpr(-1.0));
  p.add_nonnegative(LinearExpr::var(y) - 1.0);
  p.add_nonnegative(2.0 - LinearExpr::var(y));
  p.minimize(LinearExpr::var(x));
  auto r = solve(p);
  INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
}

TEST_CASE("complex expansion of |h^H p|^2 matches direct evaluation") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 200; ++trial) {
    ConicProblem p;
    auto pv = add_complex_vector(p, 4, "p");
    CVec h(4), val(4);
    RVec x(8);
    for (int i = 0; i < 4; ++i) {
      h(i) = cplx(n01(rng), n01(rng));
      val(i) = cplx(n01(rng), n01(rng));
      x(pv.re[static_cast<std::size_t>(i)]) = val(i).real();
      x(pv.im[static_cast<std::size_t>(i)]) = val(i).imag();
    }
    auto [re, im] = inner(h, pv);
    const cplx direct = h.dot(val);  // h^H p
    CHECK(std::abs(re.evaluate(x) - direct.real()) < 1e-12);
    CHECK(std::abs(im.evaluate(x) - direct.imag()) < 1e-12);
    const double q = std::pow(re.evaluate(x), 2) + std::pow(im.evaluate(x), 2);
    CHECK(std::abs(q - std::norm(direct)) < 1e-12 * (1.0 + std::norm(direct)));
  }
}

TEST_CASE("random quadratic constraints: residual after solve") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    ConicProblem p;
    auto pv = add_complex_vector(p, 3, "p");
    auto beta = p.add_variable("beta");
    ComplexQuadraticForm q;
    std::vector<CVec> hs(3, CVec(3));
    for (auto& h : hs) {
      for (int i = 0; i < 3; ++i) h(i) = cplx(n01(rng), n01(rng));
      q.terms.emplace_back(h, &pv);
    }
    q.constant = 1.0;
    auto hq = add_quadratic_le_linear(p, q, LinearExpr::var(beta));
    CVec w(3);
    for (int i = 0; i < 3; ++i) w(i) = cplx(n01(rng), n01(rng));
    // maximise Re(w^H p) with beta capped: the quadratic row is tight at the optimum
    p.add_nonnegative(5.0 - LinearExpr::var(beta));
    p.minimize(-real_inner(w, pv));
    auto r = solve(p);
    INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
    CHECK(p.residual(hq, *r.primal) <= 1e-9);
    const CVec sol = pv.value(*r.primal);
    double direct = 1.0;
    for (const auto& h : hs) direct += std::norm(h.dot(sol));
    CHECK(direct <= r.primal->coeff(beta) + 1e-9);
    CHECK(direct == doctest::Approx(5.0).epsilon(1e-6));
  }
}

TEST_CASE("inconsistent and infeasible programs") {
  ConicProblem p;
  auto x = p.add_variable("x");
  p.add_equality(LinearExpr::var(x) - 1.0);
  p.add_equality(LinearExpr::var(x) - 2.0);
  CHECK(solve(p).status == SolveStatus::Infeasible);

  ConicProblem q;
  auto y = q.add_variable("y");
  q.add_nonnegative(LinearExpr::var(y) - 2.0);
  q.add_nonnegative(1.0 - LinearExpr::var(y));
  q.minimize(LinearExpr::var(y));
  CHECK(solve(q).status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded objective is not reported optimal") {
  ConicProblem p;
  auto x = p.add_variable("x");
  p.add_nonnegative(LinearExpr::var(x));
  p.minimize(-LinearExpr::var(x));
  CHECK_FALSE(solve(p).ok());
}

TEST_CASE("solver is deterministic and the dump is stable") {
  auto build = [] {
    ConicProblem p;
    auto a = p.add_variable("alpha");
    auto r = p.add_variable("rho");
    auto b = p.add_variable("beta");
    add_exp_rate_link(p, r, a);
    p.add_second_order(LinearExpr::var(b), {LinearExpr::var(r) - 1.0, LinearExpr(0.5)});
    p.add_nonnegative(3.0 - LinearExpr::var(b));
    p.minimize(-LinearExpr::var(a) + 0.1 * LinearExpr::var(b));
    return p;
  };
  auto p1 = build(), p2 = build();
  std::ostringstream d1, d2;
  p1.dump(d1);
  p2.dump(d2);
  CHECK(d1.str() == d2.str());
  CHECK(d1.str().find("block exp") != std::string::npos);
  auto r1 = solve(p1), r2 = solve(p2);
  INFO(std::string(to_string(r1.status)), " ", r1.message);
  REQUIRE(r1.ok());
  CHECK(r1.objective == r2.objective);
  CHECK(*r1.primal == *r2.primal);
  CHECK(p1.families().exponential);
  CHECK(p1.families().second_order);
}

TEST_CASE("warm start off the feasible set") {
  ConicProblem p;
  auto x = p.add_variable("x");
  auto y = p.add_variable("y");
  p.add_second_order(LinearExpr(1.0), {LinearExpr::var(x), LinearExpr::var(y)});
  p.minimize(LinearExpr::var(x) + LinearExpr::var(y));
  SolveOptions o;
  o.initial = RVec::Constant(2, 10.0);
  auto r = solve(p, o);
  INFO(std::string(to_string(r.status)), " ", r.message);
  REQUIRE(r.ok());
  CHECK(r.objective == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-7));
}
