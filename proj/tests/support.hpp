#pragma once
//
// Shared fixtures for the unit tests: tiny hand-checkable instances whose
// minimal solutions are known in closed form.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "qve/generate.hpp"
#include "qve/models.hpp"
#include "qve/problem.hpp"
#include "qve/problem_io.hpp"

namespace qve::testing {

inline DenseTensor scalar_tensor(double c) {
  DenseTensor t(1);
  t(0, 0, 0) = c;
  return t;
}

// One-dimensional instance M x = a + B x^2.
inline QveProblem scalar_problem(double M, double a, double B) {
  Matrix m(1, 1);
  m(0, 0) = M;
  Vector av(1);
  av(0) = a;
  return QveProblem(m, av, BilinearMap::from_tensor(scalar_tensor(B)));
}

// x* = 1/2; plain fixed point gives x1 = 3/8, x2 = 57/128.
inline QveProblem easy_scalar() { return scalar_problem(1.0, 0.375, 0.5); }

// Critical: x* = 1 is a double root; Newton's error halves per step.
inline QveProblem critical_scalar() { return scalar_problem(1.0, 0.5, 0.5); }

// Negative discriminant: no real solution.
inline QveProblem unsolvable_scalar() { return scalar_problem(1.0, 0.625, 0.5); }

// Two components, identity leading matrix, minimal solution (1, 0):
//   x0 = 1/2 + (1/2) x0^2       (double root at 1)
//   x1 = K x0 x1                (forced to 0 for K != 1)
// For K > 2 Newton's step matrix turns indefinite once x0 > 2/K, so the
// full-space run breaks down while the run reduced to {0} sails through.
inline QveProblem half_supported_pair(double K) {
  Matrix m = Matrix::Identity(2, 2);
  Vector a(2);
  a << 0.5, 0.0;
  DenseTensor t(2);
  t(0, 0, 0) = 0.5;
  t(1, 0, 1) = K;
  return QveProblem(m, a, BilinearMap::from_tensor(std::move(t)));
}

// Instance whose minimal solution provably vanishes outside `allowed`:
// entries of a, edges of M, and tensor slices that could push positivity
// into the complement are planted as exact zeros, and the indicator of
// `allowed` is a supersolution by construction.  The true support is the
// structural closure inside `allowed` (possibly smaller when a vanishes on
// part of it).
struct PlantedInstance {
  QveProblem problem;
  std::vector<Index> allowed;
};

inline PlantedInstance planted_support_instance(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Allowed set: nonempty proper subset, random size.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const Index allowed_count = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 1));
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Index k = 0; k < allowed_count; ++k) in[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = 1;

  // Z-matrix, strictly diagonally dominant, with no edge from the complement
  // into the allowed set (so the inverse cannot couple them either).
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool forbidden = !in[static_cast<std::size_t>(i)] && in[static_cast<std::size_t>(j)];
      if (!forbidden && u(rng) < 0.4) m(i, j) = -0.3 * u(rng);
    }
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0 - m.row(i).sum() + 0.1 * u(rng);

  // a positive on a random nonempty subset of the allowed set.
  Vector a = Vector::Zero(n);
  bool any = false;
  for (Index i = 0; i < n; ++i)
    if (in[static_cast<std::size_t>(i)] && (u(rng) < 0.7 || (!any && i == perm[0]))) {
      a(i) = 0.2 + 0.3 * u(rng);
      any = true;
    }
  if (!any) a(perm[0]) = 0.25;

  // Tensor: slices for complement outputs must not see allowed x allowed
  // products; every slice is scaled so the allowed indicator stays a
  // supersolution.
  DenseTensor t(n);
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const bool forbidden = !in[static_cast<std::size_t>(k)] &&
                               in[static_cast<std::size_t>(i)] && in[static_cast<std::size_t>(j)];
        if (!forbidden && u(rng) < 0.3) t(k, i, j) = u(rng);
      }
    double row = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (in[static_cast<std::size_t>(i)] && in[static_cast<std::size_t>(j)]) row += t(k, i, j);
    if (row > 0.3) {
      const double f = 0.3 / row;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) t(k, i, j) *= f;
    }
  }

  std::vector<Index> allowed;
  for (Index i = 0; i < n; ++i)
    if (in[static_cast<std::size_t>(i)]) allowed.push_back(i);
  return {QveProblem(std::move(m), std::move(a), BilinearMap::from_tensor(std::move(t))),
          std::move(allowed)};
}

// A generated, certification-backed instance plus its reference solution.
struct NamedInstance {
  LoadedProblem loaded;
  GenSpec spec;
};

inline NamedInstance generated(const std::string& tag, Index size, std::uint64_t seed,
                               double scale = 0.5) {
  GenSpec spec;
  spec.tag = tag;
  spec.size = size;
  spec.seed = seed;
  spec.scale = scale;
  return {instantiate_problem(generate_problem(spec)), spec};
}

} // namespace qve::testing
