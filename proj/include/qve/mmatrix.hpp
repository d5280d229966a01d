#pragma once
//
// Z-matrix / M-matrix utilities: classification, factorization-backed solves,
// nonnegative spectral-radius estimation, irreducibility.
//
// A Z-matrix has nonpositive off-diagonal entries; writing Z = s*I - P with
// P >= 0 (s = max diagonal entry + 1), Z is a nonsingular M-matrix iff
// rho(P) < s and a singular M-matrix iff rho(P) = s.  Classification compares
// the power-iteration estimate of rho(P) against s with a relative tolerance.

#include <optional>

#include <Eigen/LU>

#include "qve/types.hpp"

namespace qve {

enum class MatrixClass { NonsingularM, SingularM, NotM };

const char* to_string(MatrixClass c);

struct SpectralEstimate {
  double value = 0.0;   // estimated spectral radius
  bool converged = false;
  int iterations = 0;
};

// Power iteration for rho(P), P >= 0 elementwise.  Deterministic all-ones
// start; iterates on the shifted matrix P + sigma*I (the Perron root shifts
// exactly and periodic classes lose their eigenvalue ties).  For reducible P
// the estimate can be biased low; `converged` reports whether the stopping
// test |lambda_{k+1} - lambda_k| <= tol * max(lambda, 1e-300) was met.
SpectralEstimate spectral_radius(const Matrix& P, double tol = 1e-12, int maxit = 20000);

// Strong connectivity of the directed graph of nonzero entries (P >= 0).
bool is_irreducible(const Matrix& P);

// Classifies a Z-matrix; throws std::invalid_argument naming the offending
// (i, j) if some off-diagonal entry is positive.  `tol` is relative:
//   rho(P) <  s * (1 - tol)  -> NonsingularM
//   |rho(P) - s| <= s * tol  -> SingularM
//   rho(P) >  s * (1 + tol)  -> NotM
MatrixClass classify_zmatrix(const Matrix& Z, double tol = 1e-10);

// Thrown by MMatrixHandle::solve when the factorization is numerically
// singular; carries the pivot index where elimination broke down.
class SingularFactorization : public std::runtime_error {
 public:
  SingularFactorization(Index pivot, double value);
  Index pivot() const { return pivot_; }

 private:
  Index pivot_;
};

// A classified Z-matrix plus its reusable LU factorization.
class MMatrixHandle {
 public:
  // Classifies Z (throws on non-Z input) and factors it once.
  static MMatrixHandle analyze(Matrix Z, double class_tol = 1e-10);

  const Matrix& matrix() const { return Z_; }
  MatrixClass classification() const { return cls_; }

  // Solves Z x = rhs via the stored factorization.  Callers gate on
  // classification(); a numerically singular factorization throws
  // SingularFactorization with the pivot index.
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

 private:
  MMatrixHandle(Matrix Z, MatrixClass cls);

  void check_pivots() const;

  Matrix Z_;
  Eigen::PartialPivLU<Matrix> lu_;
  MatrixClass cls_;
};

// Convenience wrapper: classify, require NonsingularM (throws otherwise),
// and solve M x = v.
Vector msolve(const Matrix& M, const Vector& v, double class_tol = 1e-10);

} // namespace qve
