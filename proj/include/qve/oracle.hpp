#pragma once
//
// Independent reference answers for tests: high-precision minimal solutions,
// closed-form scalar roots, and brute-force support sets.
//
// The minimal-solution oracle runs the plain fixed-point iteration
// x_{k+1} = M^{-1}(a + b(x_k, x_k)) from 0 in extended precision (long double
// with compensated summation, its own LU), sharing no code with the double
// precision solver paths it is used to check.

#include <optional>
#include <string>
#include <vector>

#include "qve/problem.hpp"

namespace qve {

enum class OracleMethod { Fp1HighPrec, ScalarClosedForm };
enum class OracleStatus { Ok, NoSolution, Stalled };

struct OracleSolution {
  OracleStatus status = OracleStatus::Stalled;
  Vector x;                    // reference solution (rounded to double)
  double residual_bound = 0.0; // extended-precision residual max-norm at x
  OracleMethod method = OracleMethod::Fp1HighPrec;
  long iterations = 0;
  std::string note;
};

struct OracleOptions {
  // Absolute residual target; <= 0 means 1e-13 * (1 + ||a||_inf).
  double target_residual = 0.0;
  long maxit = 2000000;
  double divergence_guard = 1e12;
};

// Minimal nonnegative solution, or NoSolution when the iteration blows past
// the divergence guard ("A1 presumed violated": the fixed point converges for
// every solvable problem, so escape certifies none below the guard).
// One-dimensional problems use the closed-form root.
OracleSolution oracle_minimal(const QveProblem& p, const OracleOptions& opts = {});

// Minimal nonnegative root of B x^2 - M x + a = 0 (M > 0, a >= 0, B >= 0),
// std::nullopt when the discriminant is negative (no real root, equation
// unsolvable).  Evaluated in the cancellation-free form 2a / (M + sqrt(disc)).
std::optional<double> scalar_roots(double M, double a, double B);

// Support of the minimal solution by boolean pattern iteration of the fixed
// point (structural closure; no floating comparisons beyond the one-time
// M^{-1} pattern threshold at 1e-13 relative).  max_steps < 0 iterates to the
// fixed point, which is reached within dimension+1 sweeps.
std::vector<Index> brute_support(const QveProblem& p, int max_steps = -1);

} // namespace qve
