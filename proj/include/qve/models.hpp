#pragma once
//
// Concrete problem families, each reduced to the common quadratic vector
// equation with a structure-aware bilinear backend (no n^3 tensor is
// materialized unless dense() is asked for).
//
// All vectorizations are column-major: vec stacks columns, so
// vec(P X Q) = (Q^T kron P) vec(X).

#include <utility>
#include <vector>

#include "qve/problem.hpp"
#include "qve/unilateral.hpp"

namespace qve {

Vector vec(const Matrix& x);
Matrix unvec(const Vector& x, Index rows, Index cols);
Matrix kron(const Matrix& a, const Matrix& b);

// Branching-process equation x = a + b(x, x) (identity leading matrix).
// When `verify_normalization` is set, a + b(e, e) = e is required to hold to
// 1e-12 (the defining normalization of the probabilistic model: offspring
// generation probabilities summing to one).
QveProblem make_e1(Vector a, BilinearMap b, bool verify_normalization = true);

// Componentwise two-group coupling
//   u = u o (P v) + e,   v = v o (P~ u) + e      (o = Hadamard product)
// stacked as w = [u; v], dimension n = 2m.  Fixing the second argument gives
// a diagonal matrix view, which the solvers exploit.
struct E2Problem {
  Index m = 0;
  Matrix P;
  Matrix Pt;
  QveProblem qve;

  std::pair<Vector, Vector> split(const Vector& w) const;  // (u, v)
};
E2Problem make_e2(Matrix P, Matrix Pt);

// Nonsymmetric algebraic Riccati equation X C X + B - A X - X D = 0 with
// X of size m1 x m2 and
//   [[ D, -C ],
//    [ -B, A ]]
// a nonsingular M-matrix, or a singular irreducible one (accepted, flagged in
// `singular_irreducible`; the vectorized leading matrix stays nonsingular).
// Vectorized: (I kron A + D^T kron I) x = vec(B) + vec(X C X).
struct E3Problem {
  Index m1 = 0, m2 = 0;
  Matrix A, B, C, D;
  bool singular_irreducible = false;
  QveProblem qve;

  Matrix unvec(const Vector& x) const;                  // m1 x m2
  Matrix riccati_residual(const Matrix& X) const;       // X C X + B - A X - X D
};
E3Problem make_e3(Matrix A, Matrix B, Matrix C, Matrix D);

// Unilateral quadratic matrix equation X = A + B X + C X^2, vectorized to
// dimension n = m^2 with leading matrix I kron (I - B).  Keeps the matrix
// form alongside so the doubling solvers can run on the same instance.
struct E4Problem {
  UnilateralProblem unilateral;
  QveProblem qve;

  Matrix unvec(const Vector& x) const;  // m x m
};
E4Problem make_e4(Matrix A, Matrix B, Matrix C);

// Tree-like stochastic process equation X + sum_i A_i X^{-1} D_i = B - I
// with B, A_i, D_i >= 0 and B + D_j + sum_i A_i row-stochastic for every j
// (checked to 1e-12).  Substituting Y = -X^{-1} and multiplying by Y turns it
// into (I - B) Y = I + sum_i A_i Y D_i Y, a quadratic vector equation in
// vec(Y); the wanted X = T - I (T minimal substochastic) is recovered from
// the minimal nonnegative Y.
struct TreeLikeProblem {
  Matrix B;
  std::vector<Matrix> A, D;
  QveProblem qve;

  Matrix unvec(const Vector& y) const;  // m x m
  // X = -Y^{-1}; throws std::runtime_error if Y is singular.
  Matrix recover_x(const Matrix& Y) const;
  // T = X + I = I - Y^{-1}.
  Matrix recover_t(const Matrix& Y) const;
};
TreeLikeProblem make_treelike(Matrix B, std::vector<Matrix> A, std::vector<Matrix> D);

} // namespace qve
