#include <stdexcept>

#include "doctest.h"

#include "qve/newton.hpp"
#include "qve/oracle.hpp"
#include "qve/positivity.hpp"
#include "support.hpp"

using namespace qve;
using qve::testing::half_supported_pair;
using qve::testing::planted_support_instance;

TEST_CASE("pattern of the half-supported pair") {
  const QveProblem p = half_supported_pair(10.0);
  const PositivityPattern pat = positivity_pattern(p);
  REQUIRE(pat.support.size() == 1);
  CHECK(pat.support[0] == 0);
  // Seed {0}; processing 0 adds nothing; two pattern products total.
  REQUIRE(pat.trace.size() == 1);
  CHECK(pat.trace[0].first == 0);
  CHECK(pat.trace[0].second.empty());
  CHECK(pat.pattern_products == 2);
  CHECK(pat.pattern_products <= p.dimension() + 1);
}

TEST_CASE("pattern agrees with the brute-force oracle on planted instances") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto planted = planted_support_instance(4 + static_cast<Index>(seed), seed * 101);
    const PositivityPattern pat = positivity_pattern(planted.problem);
    const std::vector<Index> brute = brute_support(planted.problem);
    CHECK(pat.support == brute);
    CHECK(pat.pattern_products <= planted.problem.dimension() + 1);
    // The closure never escapes the planted region.
    for (Index i : pat.support)
      CHECK(std::find(planted.allowed.begin(), planted.allowed.end(), i) !=
            planted.allowed.end());
  }
}

TEST_CASE("fully coupled instance keeps every coordinate") {
  const auto inst = qve::testing::generated("generic", 5, 77);
  const PositivityPattern pat = positivity_pattern(inst.loaded.qve);
  CHECK(pat.support.size() == 5);
}

TEST_CASE("reduction extracts the principal subproblem") {
  const QveProblem p = half_supported_pair(10.0);
  const ReducedProblem red = reduce_problem(p, {0});
  CHECK(red.problem.dimension() == 1);
  CHECK(red.problem.a()(0) == 0.5);
  CHECK(red.problem.M()(0, 0) == 1.0);
  CHECK((*red.problem.b().dense())(0, 0, 0) == 0.5);

  Vector xr(1);
  xr << 1.0;
  const Vector full = red.embed(xr);
  REQUIRE(full.size() == 2);
  CHECK(full(0) == 1.0);
  CHECK(full(1) == 0.0);
}

TEST_CASE("reduction rejects malformed supports") {
  const QveProblem p = half_supported_pair(10.0);
  CHECK_THROWS_AS(reduce_problem(p, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(reduce_problem(p, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(reduce_problem(p, {0, 2}), std::invalid_argument);
}

TEST_CASE("reduction revives newton on the half-supported pair") {
  const QveProblem p = half_supported_pair(10.0);
  const SolverFn nt = [](const QveProblem& q, const SolveOptions& o) { return newton(q, o); };

  const SolveReport direct = newton(p);
  CHECK(direct.status == SolveStatus::BreakdownNotM);

  // The reduced problem sits at the critical boundary: the computed residual
  // rounds to zero once the error reaches 2^-27, which is where any
  // residual-stopped double-precision iteration must halt.
  SolveOptions exact;
  exact.tol = 0.0;
  exact.maxit = 100;
  const SolveReport rep = solve_with_reduction(p, nt, exact);
  REQUIRE(rep.converged());
  CHECK(rep.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.residual_norms.back() == 0.0);
  CHECK(rep.x(1) == 0.0);
  REQUIRE(rep.eliminated_indices.size() == 1);
  CHECK(rep.eliminated_indices[0] == 1);
  CHECK(rep.note.find("reduced") != std::string::npos);
}

TEST_CASE("zero right-hand side short-circuits to the zero solution") {
  const QveProblem p = qve::testing::scalar_problem(1.0, 0.0, 0.5);
  const SolverFn nt = [](const QveProblem& q, const SolveOptions& o) { return newton(q, o); };
  const SolveReport rep = solve_with_reduction(p, nt);
  REQUIRE(rep.converged());
  CHECK(rep.x(0) == 0.0);
  CHECK(rep.iterations == 0);
  REQUIRE(rep.residual_norms.size() == 1);
  CHECK(rep.residual_norms[0] == 0.0);
  CHECK(rep.eliminated_indices == std::vector<Index>{0});
}

TEST_CASE("full support reduction is the identity") {
  const auto inst = qve::testing::generated("generic", 4, 13);
  const SolverFn nt = [](const QveProblem& q, const SolveOptions& o) { return newton(q, o); };
  const SolveReport direct = newton(inst.loaded.qve);
  const SolveReport reduced = solve_with_reduction(inst.loaded.qve, nt);
  REQUIRE(direct.converged());
  REQUIRE(reduced.converged());
  CHECK(reduced.eliminated_indices.empty());
  CHECK((direct.x - reduced.x).cwiseAbs().maxCoeff() <= 1e-14);
}
