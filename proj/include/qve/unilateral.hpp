#pragma once
//
// Unilateral quadratic matrix equations  X = A + B X + C X^2  with
// nonnegative m x m coefficients and (A + B + C) e <= e.  The minimal
// nonnegative solution is substochastic; the doubling solvers below converge
// quadratically away from the null-recurrent boundary case.

#include <string>
#include <vector>

#include "qve/mmatrix.hpp"
#include "qve/solve_report.hpp"
#include "qve/types.hpp"

namespace qve {

class UnilateralProblem {
 public:
  // Validates A, B, C >= 0 entrywise, row sums of A + B + C at most
  // 1 + 1e-12, and I - B a nonsingular M-matrix; throws std::invalid_argument
  // with the offending entry or row otherwise.
  UnilateralProblem(Matrix A, Matrix B, Matrix C);

  Index dimension() const { return a_.rows(); }
  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const MMatrixHandle& ib_handle() const { return ib_; }  // factored I - B

 private:
  Matrix a_, b_, c_;
  MMatrixHandle ib_;
};

// X - A - B X - C X^2; entrywise max-abs of this is the stopping residual.
Matrix unilateral_residual(const UnilateralProblem& p, const Matrix& X);

struct MatrixSolveReport {
  Matrix X;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  int breakdown_index = -1;
  std::string note;
  std::vector<std::string> warnings;

  std::vector<double> residual_norms;    // entrywise max-abs per iterate
  std::vector<double> correction_norms;  // size of each additive refinement

  // Most negative entry seen in any iterate or auxiliary matrix; exact
  // arithmetic keeps every quantity nonnegative.
  double min_coefficient_seen = 0.0;

  bool converged() const { return status == SolveStatus::Converged; }
};

// Doubling by successive substitution of the squared equation: maintains a
// pair (B_{-1}, B_1) that squares at every step and accumulates
// X <- X + U B_{-1}.  Stops when both the last correction and the residual
// fall below opts.tol.
MatrixSolveReport solve_lr(const UnilateralProblem& p, const SolveOptions& opts = {});

// Doubling on the block-tridiagonal resolvent: repeatedly eliminates the odd
// block rows, keeping (R, A, C) triples; X is read off a Schur complement at
// every step.  Same stopping rule as solve_lr.
MatrixSolveReport solve_cr(const UnilateralProblem& p, const SolveOptions& opts = {});

// Defect of the once-squared equation at Y = X^2: with
// B_{-1} = (I-B)^{-1} A, B_1 = (I-B)^{-1} C and K = I - B_{-1} B_1 - B_1 B_{-1},
// a solution X of the original equation makes Y = K^{-1} B_{-1}^2 +
// K^{-1} B_1^2 Y^2 hold.  Returns the entrywise max-abs of the defect;
// throws if K is numerically singular.
double graeffe_step_check(const UnilateralProblem& p, const Matrix& X);

} // namespace qve
