#pragma once

#include "qve/problem.hpp"
#include "qve/solve_report.hpp"

namespace qve {

// Newton's method on F(x) = Mx - a - b(x, x), started from x_0 = 0.  Each
// step solves the restated system
//
//   F'_{x_k} x_{k+1} = a - b(x_k, x_k)
//
// for the new iterate directly (equivalent to the usual increment form in
// exact arithmetic, but it approaches fixed points without the cancellation
// the increment form suffers near convergence).  The step identity
// -F(x_{k+1}) = b(x_{k+1} - x_k, x_{k+1} - x_k) is measured into
// max_identity_defect.  Iterates increase monotonically and converge
// quadratically away from critical problems.
SolveReport newton(const QveProblem& p, const SolveOptions& opts = {});

// Modified Newton: eliminates the linear term first.  With
// R_x = M - right_matrix(x) and z(x) = R_x^{-1} a, solves G(x) = x - z(x) = 0
// by Newton steps G'_x d = z(x) - x where G'_x = I - R_x^{-1} left_matrix(z).
// One-sided problems whose right matrix is diagonal (and diagonal M) get an
// O(n) elimination per step instead of a dense solve.  Iterates dominate
// plain Newton's step for step, at equal cost per iteration.
SolveReport modified_newton(const QveProblem& p, const SolveOptions& opts = {});

// Newton rewritten as a sequence of shrinking problems: after each step the
// residual problem is again of the same quadratic shape, with the derivative
// updated incrementally.  Mathematically the iterates match newton()'s; the
// per-step work shifts from reassembling F' to two rank-structure updates.
SolveReport newton_cr_form(const QveProblem& p, const SolveOptions& opts = {});

// Modified Newton in the same resummed style: the whole problem (right-hand
// side and coefficient tensor) is transformed after every step, so each new
// step works on an explicitly reduced equation.  Requires a dense coefficient
// tensor; O(n^4) memory traffic per step for the tensor transform.
SolveReport modified_newton_cr_form(const QveProblem& p, const SolveOptions& opts = {});

} // namespace qve
