#pragma once

#include <string>
#include <vector>

#include "qve/problem.hpp"
#include "qve/solve_report.hpp"

namespace qve {

// Additive splitting  M = N - P,  b = b1 + b2  driving the linearly implicit
// iteration
//
//   N x_{k+1} - b1(x_k, x_{k+1}) = a + P x_k + b2(x_k, x_k),
//
// i.e. each step solves with the matrix J(x) = N - left_matrix_{b1}(x).
// Validity requirements (checked by make_splitting): N is a nonsingular
// M-matrix, P >= 0, b1 and b2 have nonnegative coefficients, N - P
// reproduces M, and b1 + b2 reproduces the quadratic form of b.  The last
// check compares symmetric parts on basis pairs, which deliberately admits
// argument-swapped realizations of the same form.
struct Splitting {
  Matrix N;
  Matrix P;
  BilinearMap b1;
  BilinearMap b2;
  std::string name;  // shows up in reports and CLI tables
};

Splitting make_splitting(const QveProblem& p, Matrix N, Matrix P,
                         BilinearMap b1, BilinearMap b2,
                         std::string name = "custom");

// Ready-made splittings, ordered here from shallowest to steepest:
//   depth:      N = M, P = 0, b1 = 0, b2 = b   (plain fixed point)
//   jacobi:     N = diag(M), P = diag(M) - M, b1 = 0, b2 = b
//   half:       N = M, P = 0, b1 = b2 = b/2
//   order:      N = M, P = 0, b1 = b, b2 = 0   (all of b treated implicitly)
//   order-swap: like order with the arguments of b exchanged
Splitting splitting_depth(const QveProblem& p);
Splitting splitting_order(const QveProblem& p);
Splitting splitting_order_swapped(const QveProblem& p);
Splitting splitting_jacobi(const QveProblem& p);
Splitting splitting_half(const QveProblem& p);

// x_{k+1} = M^{-1} (a + b(x_k, x_k)) starting from x_0 = 0.  The workhorse
// baseline: monotonically nondecreasing, converges to the minimal
// nonnegative solution whenever one exists.
SolveReport fixed_point(const QveProblem& p, const SolveOptions& opts = {});

// One linear solve with J(x_k) per step.  Starting vectors other than 0 must
// satisfy 0 <= x0 and F(x0) <= 0 componentwise (checked, with a roundoff
// slack); iterates then increase monotonically towards the minimal solution.
SolveReport functional_iteration(const QveProblem& p, const Splitting& s,
                                 const Vector& x0,
                                 const SolveOptions& opts = {});
SolveReport functional_iteration(const QveProblem& p, const Splitting& s,
                                 const SolveOptions& opts = {});

// Gauss-Seidel variant: sweeps the components in natural order, feeding each
// freshly updated entry into the remaining rows of the same sweep.  One sweep
// counts as one iteration.
SolveReport gauss_seidel_iteration(const QveProblem& p, const Splitting& s,
                                   const Vector& x0,
                                   const SolveOptions& opts = {});
SolveReport gauss_seidel_iteration(const QveProblem& p, const Splitting& s,
                                   const SolveOptions& opts = {});

// Runs each splitting in turn (restarting from the previous result) until the
// last one converges; the iterates stay monotone across the switch because
// every intermediate iterate is a valid starting vector.
SolveReport switch_iterations(const QveProblem& p,
                              const std::vector<Splitting>& schedule,
                              const SolveOptions& opts = {});

} // namespace qve
