#pragma once
//
// Support detection for the minimal solution, and the reduction pipeline that
// projects a problem onto that support.  Solvers can break down when the
// minimal solution has zero entries (their step matrices turn singular or
// worse on the full space while staying perfectly fine on the support), so
// detecting the support structurally and shrinking the problem first makes
// the Newton-type methods applicable again.

#include <functional>
#include <utility>
#include <vector>

#include "qve/problem.hpp"
#include "qve/solve_report.hpp"

namespace qve {

struct PositivityPattern {
  std::vector<Index> support;  // ascending indices i with x*_i > 0

  // One entry per processed queue element: the index popped and the indices
  // its positivity newly forced.
  std::vector<std::pair<Index, std::vector<Index>>> trace;

  // Number of pattern matrix-vector products with the inverse pattern;
  // bounded by n + 1.
  int pattern_products = 0;
};

// Computes {i : x*_i > 0} in O(n^3) boolean operations, without floating
// point: the positivity pattern of M^{-1} is the reflexive-transitive closure
// of the off-diagonal nonzero graph of M (no cancellation can occur in a
// nonnegative inverse), and positivity propagates through the coefficient
// tensor's nonzero pattern starting from the pattern of M^{-1} a.
PositivityPattern positivity_pattern(const QveProblem& p);

// A problem projected onto a subset of the coordinates, plus the bookkeeping
// needed to map solutions back.
struct ReducedProblem {
  QveProblem problem;
  std::vector<Index> support;  // ascending original indices
  Index full_dimension = 0;

  // Scatters a solution of the reduced problem back to full size (zeros off
  // the support).
  Vector embed(const Vector& x_reduced) const;
};

// Principal subproblem on `support` (ascending, duplicate-free).  The
// restriction of a valid problem to any support candidate that contains
// pattern(M^{-1}a)'s closure is again valid; the constructor re-validates.
ReducedProblem reduce_problem(const QveProblem& p, const std::vector<Index>& support);

using SolverFn = std::function<SolveReport(const QveProblem&, const SolveOptions&)>;

// Detects the support, solves the reduced problem with `solver`, and embeds
// the result.  The returned report carries the indices that were fixed to
// zero in `eliminated_indices`; histories and counters refer to the reduced
// run.  An empty support short-circuits to the exact zero solution.
SolveReport solve_with_reduction(const QveProblem& p, const SolverFn& solver,
                                 const SolveOptions& opts = {});

} // namespace qve
