#pragma once
//
// Quadratic vector equations
//
//     M x = a + b(x, x),        M a nonsingular M-matrix, a >= 0, b >= 0,
//
// sought at the minimal nonnegative solution.  The residual form used
// everywhere is F(x) = M x - a - b(x, x); its derivative at x is the matrix
// F'_x w = M w - b(x, w) - b(w, x), and the exact second-order expansion is
//
//     F(y) = F(x) + F'_x(y - x) - b(y - x, y - x).

#include <optional>
#include <string>

#include "qve/bilinear.hpp"
#include "qve/mmatrix.hpp"
#include "qve/types.hpp"

namespace qve {

class QveProblem {
 public:
  // Validates eagerly: dimensions agree, a >= 0 (offending index reported),
  // b's coefficients >= 0, and M classifies as a nonsingular M-matrix at the
  // given relative tolerance.  The factorization of M is stored for reuse.
  QveProblem(Matrix M, Vector a, BilinearMap b, double class_tol = 1e-10);

  Index dimension() const { return a_.size(); }
  const Matrix& M() const { return handle_.matrix(); }
  const Vector& a() const { return a_; }
  const BilinearMap& b() const { return b_; }
  const MMatrixHandle& m_handle() const { return handle_; }

 private:
  MMatrixHandle handle_;
  Vector a_;
  BilinearMap b_;
};

// F(x) = M x - a - b(x, x).
Vector residual(const QveProblem& p, const Vector& x);

// F'_x = M - left_matrix(x) - right_matrix(x); a Z-matrix whenever x >= 0.
Matrix derivative(const QveProblem& p, const Vector& x);

// Relative defect of the exact expansion
//   F(y) - F(x) - F'_x(y - x) + b(y - x, y - x),
// measured in the max norm against scale
//   1 + ||F(x)|| + ||F(y)|| + ||F'_x(y-x)|| + ||b(y-x, y-x)||.
// Zero in exact arithmetic for every x, y.
double taylor_check(const QveProblem& p, const Vector& x, const Vector& y);

// True iff y >= 0 and F(y) >= 0 up to slack: entries of y may dip to
// -1e-13 * (1 + ||y||), entries of F(y) to -tol * (1 + ||a||).  A nonnegative
// vector with nonnegative residual certifies that the minimal solution exists
// and lies below y componentwise.
bool check_supersolution(const QveProblem& p, const Vector& y, double tol = 1e-9);

// A y that passed check_supersolution at tolerance tol.
struct SupersolutionCertificate {
  Vector y;
  double tol = 1e-9;
};

std::optional<SupersolutionCertificate> certify_supersolution(const QveProblem& p,
                                                              const Vector& y,
                                                              double tol = 1e-9);

} // namespace qve
