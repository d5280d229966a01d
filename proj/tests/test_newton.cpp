#include <cmath>

#include "doctest.h"

#include "qve/iterations.hpp"
#include "qve/newton.hpp"
#include "support.hpp"

using namespace qve;
using qve::testing::critical_scalar;
using qve::testing::easy_scalar;
using qve::testing::generated;
using qve::testing::half_supported_pair;

namespace {

SolveOptions history_opts() {
  SolveOptions o;
  o.record_history = true;
  return o;
}

} // namespace

TEST_CASE("newton reproduces hand iterates on the scalar instance") {
  const SolveReport rep = newton(easy_scalar(), history_opts());
  REQUIRE(rep.converged());
  REQUIRE(rep.iterates.size() >= 3);
  CHECK(rep.iterates[1](0) == 0.375);
  CHECK(rep.iterates[2](0) == doctest::Approx(39.0 / 80.0).epsilon(1e-15));
  CHECK(rep.x(0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(rep.iterations <= 8);  // quadratic: a handful of steps
  CHECK(rep.max_identity_defect <= 1e-12);
  CHECK(rep.max_monotonicity_violation <= 1e-15);
}

TEST_CASE("newton error decays quadratically away from criticality") {
  const SolveReport rep = newton(easy_scalar(), history_opts());
  REQUIRE(rep.converged());
  for (std::size_t k = 1; k + 1 < rep.iterates.size(); ++k) {
    const double e0 = std::abs(rep.iterates[k](0) - 0.5);
    const double e1 = std::abs(rep.iterates[k + 1](0) - 0.5);
    if (e0 < 1e-7) break;  // below this, roundoff dominates the ratio
    CHECK(e1 <= 2.0 * e0 * e0);
  }
}

TEST_CASE("newton on the critical instance halves the error until the residual rounds to zero") {
  SolveOptions opts = history_opts();
  opts.tol = 0.0;  // run as far as double precision allows
  opts.maxit = 100;
  const SolveReport rep = newton(critical_scalar(), opts);
  REQUIRE(rep.converged());
  // x_k = 1 - 2^{-k}, exactly representable; the update stays exact in
  // floating point because every intermediate quantity is a short dyadic.
  REQUIRE(rep.iterates.size() >= 5);
  CHECK(rep.iterates[1](0) == 0.5);
  CHECK(rep.iterates[2](0) == 0.75);
  CHECK(rep.iterates[3](0) == 0.875);
  CHECK(rep.iterates[4](0) == 0.9375);
  // At e = 2^-27 the square rounds so that the computed residual is exactly
  // zero, and the run stops there with a deterministic final iterate.
  CHECK(rep.iterations == 27);
  CHECK(rep.x(0) == 1.0 - std::ldexp(1.0, -27));
  CHECK(rep.residual_norms.back() == 0.0);
}

TEST_CASE("newton breaks down past the representable region of a half-supported instance") {
  const SolveReport rep = newton(half_supported_pair(10.0), history_opts());
  CHECK(rep.status == SolveStatus::BreakdownNotM);
  CHECK(rep.breakdown_index == 1);
  REQUIRE(rep.iterates.size() == 2);
  CHECK(rep.iterates[1](0) == 0.5);
  CHECK(rep.iterates[1](1) == 0.0);
}

TEST_CASE("modified newton dominates plain newton componentwise") {
  for (std::uint64_t seed : {4u, 8u}) {
    const auto inst = generated("generic", 6, seed);
    const SolveReport plain = newton(inst.loaded.qve, history_opts());
    const SolveReport modified = modified_newton(inst.loaded.qve, history_opts());
    REQUIRE(plain.converged());
    REQUIRE(modified.converged());
    CHECK(modified.iterations <= plain.iterations);
    const std::size_t common = std::min(plain.iterates.size(), modified.iterates.size());
    for (std::size_t k = 0; k < common; ++k)
      CHECK((modified.iterates[k] - plain.iterates[k]).minCoeff() >= -1e-12);
  }
}

TEST_CASE("modified newton first step on the scalar instance") {
  const SolveReport rep = modified_newton(easy_scalar(), history_opts());
  REQUIRE(rep.converged());
  REQUIRE(rep.iterates.size() >= 2);
  // z = a = 3/8, G' = 1 - z/2 = 13/16, x1 = z / G' = 6/13.
  CHECK(rep.iterates[1](0) == doctest::Approx(6.0 / 13.0).epsilon(1e-15));
  CHECK(rep.x(0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("modified newton takes the componentwise path on two-group couplings") {
  Matrix P(2, 2), Pt(2, 2);
  P << 0.10, 0.05, 0.02, 0.08;
  Pt << 0.07, 0.03, 0.04, 0.09;
  const E2Problem e2 = make_e2(P, Pt);
  REQUIRE(e2.qve.b().right_matrix_is_diagonal());

  const SolveReport rep = modified_newton(e2.qve, history_opts());
  REQUIRE(rep.converged());
  CHECK(rep.residual_norms.back() <= 1e-12);

  // The structured elimination must agree with the dense route on the same
  // data.
  QveProblem densified(e2.qve.M(), e2.qve.a(),
                       BilinearMap::from_tensor(DenseTensor(*e2.qve.b().dense())));
  REQUIRE_FALSE(densified.b().right_matrix_is_diagonal());
  const SolveReport slow = modified_newton(densified, history_opts());
  REQUIRE(slow.converged());
  const std::size_t common = std::min(rep.iterates.size(), slow.iterates.size());
  for (std::size_t k = 0; k < common; ++k)
    CHECK((rep.iterates[k] - slow.iterates[k]).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("resummed newton matches the direct form iterate for iterate") {
  for (std::uint64_t seed : {12u, 19u}) {
    const auto inst = generated("generic", 5, seed);
    const SolveReport direct = newton(inst.loaded.qve, history_opts());
    const SolveReport resummed = newton_cr_form(inst.loaded.qve, history_opts());
    REQUIRE(direct.converged());
    REQUIRE(resummed.converged());
    const std::size_t common = std::min(direct.iterates.size(), resummed.iterates.size());
    REQUIRE(common >= 3);
    for (std::size_t k = 0; k < common; ++k)
      CHECK((direct.iterates[k] - resummed.iterates[k]).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(resummed.max_identity_defect <= 1e-10);
  }
}

TEST_CASE("resummed modified newton matches the direct form iterate for iterate") {
  for (std::uint64_t seed : {6u, 14u}) {
    const auto inst = generated("generic", 5, seed);
    const SolveReport direct = modified_newton(inst.loaded.qve, history_opts());
    const SolveReport resummed = modified_newton_cr_form(inst.loaded.qve, history_opts());
    REQUIRE(direct.converged());
    REQUIRE(resummed.converged());
    const std::size_t common = std::min(direct.iterates.size(), resummed.iterates.size());
    REQUIRE(common >= 3);
    for (std::size_t k = 0; k < common; ++k)
      CHECK((direct.iterates[k] - resummed.iterates[k]).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("resummed modified newton reproduces frozen intermediate quantities") {
  // On the scalar instance the transformed problem after the first pass is
  // a~ = 39/80, B~ = 13/20, so the second pass solves with 1 - a~ B~ =
  // 1093/1600 exactly.
  const SolveReport rep = modified_newton_cr_form(easy_scalar(), history_opts());
  REQUIRE(rep.converged());
  REQUIRE(rep.iterates.size() >= 3);
  CHECK(rep.iterates[1](0) == doctest::Approx(6.0 / 13.0).epsilon(1e-15));
  const double x1 = 6.0 / 13.0;
  const double expected_x2 = x1 + (39.0 / 80.0 - x1) / (1093.0 / 1600.0);
  CHECK(rep.iterates[2](0) == doctest::Approx(expected_x2).epsilon(1e-14));
}
