#include <stdexcept>

#include "doctest.h"

#include "qve/iterations.hpp"
#include "qve/oracle.hpp"
#include "support.hpp"

using namespace qve;
using qve::testing::easy_scalar;
using qve::testing::generated;
using qve::testing::half_supported_pair;
using qve::testing::unsolvable_scalar;

TEST_CASE("plain fixed point reproduces hand iterates and converges") {
  const QveProblem p = easy_scalar();
  SolveOptions opts;
  opts.record_history = true;
  const SolveReport rep = fixed_point(p, opts);

  REQUIRE(rep.converged());
  CHECK(rep.x(0) == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(rep.iterates.size() >= 3);
  CHECK(rep.iterates[0](0) == 0.0);
  CHECK(rep.iterates[1](0) == 0.375);              // a
  CHECK(rep.iterates[2](0) == 57.0 / 128.0);       // a + B a^2
  CHECK(rep.residual_norms.size() == rep.iterates.size());
  CHECK(rep.residual_norms.back() <= opts.tol);
  CHECK(rep.max_monotonicity_violation <= 1e-15);
}

TEST_CASE("functional iteration with the steep splitting") {
  const QveProblem p = easy_scalar();
  SolveOptions opts;
  opts.record_history = true;
  const SolveReport rep = functional_iteration(p, splitting_order(p), opts);

  REQUIRE(rep.converged());
  REQUIRE(rep.iterates.size() >= 3);
  CHECK(rep.iterates[1](0) == 0.375);
  CHECK(rep.iterates[2](0) == doctest::Approx(6.0 / 13.0).epsilon(1e-15));
  CHECK(rep.iterations < 60);
}

TEST_CASE("splitting iterates order as the theory predicts on the scalar instance") {
  const QveProblem p = easy_scalar();
  SolveOptions opts;
  opts.record_history = true;
  const SolveReport depth = functional_iteration(p, splitting_depth(p), opts);
  const SolveReport half = functional_iteration(p, splitting_half(p), opts);
  const SolveReport order = functional_iteration(p, splitting_order(p), opts);

  // Frozen second iterates: 57/128 < 105/232 < 6/13.
  CHECK(depth.iterates[2](0) == doctest::Approx(57.0 / 128.0).epsilon(1e-15));
  CHECK(half.iterates[2](0) == doctest::Approx(105.0 / 232.0).epsilon(1e-15));
  const std::size_t common =
      std::min({depth.iterates.size(), half.iterates.size(), order.iterates.size()});
  for (std::size_t k = 0; k < common; ++k) {
    CHECK(depth.iterates[k](0) <= half.iterates[k](0) + 1e-12);
    CHECK(half.iterates[k](0) <= order.iterates[k](0) + 1e-12);
  }
}

TEST_CASE("depth and jacobi coincide with the plain fixed point on scalar problems") {
  const QveProblem p = easy_scalar();
  SolveOptions opts;
  opts.record_history = true;
  const SolveReport a = fixed_point(p, opts);
  const SolveReport b = functional_iteration(p, splitting_jacobi(p), opts);
  REQUIRE(a.iterates.size() == b.iterates.size());
  for (std::size_t k = 0; k < a.iterates.size(); ++k)
    CHECK(a.iterates[k](0) == doctest::Approx(b.iterates[k](0)).epsilon(1e-15));
}

TEST_CASE("gauss-seidel dominates the parallel sweep componentwise") {
  // The sweep's fresh values beat the plain step row for row whenever the
  // step matrix is diagonal, which the jacobi splitting guarantees.
  const auto inst = generated("generic", 6, 17);
  const QveProblem& p = inst.loaded.qve;
  SolveOptions opts;
  opts.record_history = true;
  const Splitting s = splitting_jacobi(p);
  const SolveReport plain = functional_iteration(p, s, opts);
  const SolveReport sweep = gauss_seidel_iteration(p, s, opts);

  REQUIRE(plain.converged());
  REQUIRE(sweep.converged());
  CHECK(sweep.iterations <= plain.iterations);
  const std::size_t common = std::min(plain.iterates.size(), sweep.iterates.size());
  for (std::size_t k = 0; k < common; ++k)
    CHECK((sweep.iterates[k] - plain.iterates[k]).minCoeff() >= -1e-12);
}

TEST_CASE("iterates stay below the reference solution") {
  const auto inst = generated("generic", 5, 23);
  const QveProblem& p = inst.loaded.qve;
  REQUIRE(inst.loaded.expected.has_value());
  const Vector& ref = inst.loaded.expected->x;

  SolveOptions opts;
  opts.record_history = true;
  for (const SolveReport& rep :
       {fixed_point(p, opts), functional_iteration(p, splitting_order(p), opts),
        gauss_seidel_iteration(p, splitting_half(p), opts)}) {
    REQUIRE(rep.converged());
    for (const Vector& x : rep.iterates) CHECK((x - ref).maxCoeff() <= 1e-9);
  }
}

TEST_CASE("starting vectors are validated") {
  const QveProblem p = easy_scalar();
  const Splitting s = splitting_order(p);
  Vector neg(1), super(1);
  neg << -0.25;
  super << 1.0;  // F(1) > 0: not a valid monotone start
  CHECK_THROWS_AS(functional_iteration(p, s, neg), std::invalid_argument);
  CHECK_THROWS_AS(functional_iteration(p, s, super), std::invalid_argument);
  CHECK_THROWS_AS(gauss_seidel_iteration(p, s, neg), std::invalid_argument);

  // The solution itself is an admissible start and converges immediately.
  Vector star(1);
  star << 0.5;
  const SolveReport rep = functional_iteration(p, s, star);
  CHECK(rep.converged());
  CHECK(rep.iterations == 0);
}

TEST_CASE("splitting validation rejects malformed decompositions") {
  const auto inst = generated("generic", 3, 5);
  const QveProblem& p = inst.loaded.qve;
  const Matrix& M = p.M();
  const BilinearMap& b = p.b();

  // N - P != M.
  CHECK_THROWS_AS(make_splitting(p, M, Matrix::Identity(3, 3), BilinearMap::zero(3), b),
                  std::invalid_argument);
  // P not nonnegative (P = M has negative off-diagonals).
  CHECK_THROWS_AS(make_splitting(p, 2.0 * M, M, BilinearMap::zero(3), b),
                  std::invalid_argument);
  // b1 + b2 != b.
  CHECK_THROWS_AS(make_splitting(p, M, Matrix::Zero(3, 3), b, b), std::invalid_argument);
  // Swapped realization of the same quadratic form is accepted.
  const Splitting s = make_splitting(p, M, Matrix::Zero(3, 3), b.swapped(), BilinearMap::zero(3));
  CHECK(s.N.rows() == 3);
}

TEST_CASE("step matrix breakdown is reported with its index") {
  const QveProblem p = half_supported_pair(10.0);
  SolveOptions opts;
  opts.record_history = true;

  // After one step the iterate reaches (1/2, 0) and the implicit matrix
  // I - left(x) = diag(3/4, -4) stops being an M-matrix.
  const SolveReport rep = functional_iteration(p, splitting_order(p), opts);
  CHECK(rep.status == SolveStatus::BreakdownNotM);
  CHECK(rep.breakdown_index == 1);
  CHECK_FALSE(rep.note.empty());

  const SolveReport gs = gauss_seidel_iteration(p, splitting_order(p), opts);
  CHECK(gs.status == SolveStatus::BreakdownNotM);
}

TEST_CASE("divergence guard flags unsolvable instances") {
  const SolveReport rep = fixed_point(unsolvable_scalar());
  CHECK(rep.status == SolveStatus::MaxIterations);
  CHECK(rep.diverged);
  CHECK(rep.note.find("A1 presumed violated") != std::string::npos);
}

TEST_CASE("switching splittings keeps monotonicity and converges") {
  const auto inst = generated("generic", 6, 31);
  const QveProblem& p = inst.loaded.qve;
  SolveOptions opts;
  opts.record_history = true;
  const SolveReport rep =
      switch_iterations(p, {splitting_jacobi(p), splitting_order(p)}, opts);

  REQUIRE(rep.converged());
  CHECK(rep.max_monotonicity_violation <= 1e-12);
  CHECK(rep.residual_norms.size() == rep.iterates.size());
  // Histories are concatenated without duplicating the hand-over iterate.
  for (std::size_t k = 0; k + 1 < rep.iterates.size(); ++k)
    CHECK((rep.iterates[k + 1] - rep.iterates[k]).cwiseAbs().maxCoeff() > 0.0);
  CHECK(rep.residual_norms.back() <= opts.tol);
}

TEST_CASE("iteration budget is respected") {
  const QveProblem p = easy_scalar();
  SolveOptions opts;
  opts.maxit = 2;
  const SolveReport rep = fixed_point(p, opts);
  CHECK(rep.status == SolveStatus::MaxIterations);
  CHECK(rep.iterations == 2);
}
