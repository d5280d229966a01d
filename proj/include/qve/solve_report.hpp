#pragma once

#include <string>
#include <vector>

#include "qve/types.hpp"

namespace qve {

enum class SolveStatus { Converged, MaxIterations, BreakdownSingular, BreakdownNotM };

const char* to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-12;            // stop when ||F(x_k)||_inf <= tol
  int maxit = 10000;
  bool record_history = false;   // keep per-iterate copies and timings
  double divergence_guard = 1e12;
  double class_tol = 1e-10;      // classification tolerance for step matrices
};

// Outcome of a vector-shaped solve.  residual_norms[k] = ||F(x_k)||_inf for
// the k-th recorded iterate (k = 0 is the start vector); `iterates` and
// `elapsed_seconds` (cumulative) run parallel to it when history is recorded.
// Monotonicity / step-identity defects are measured during the run and left
// for tests to assert; solvers do not fail on them.
struct SolveReport {
  Vector x;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  bool diverged = false;
  int breakdown_index = -1;  // step index at which a step matrix failed
  std::string note;
  std::vector<std::string> warnings;

  std::vector<double> residual_norms;
  std::vector<Vector> iterates;
  std::vector<double> elapsed_seconds;

  // Largest componentwise decrease x_k - x_{k+1} observed (exact monotone
  // iterations keep this at roundoff level).
  double max_monotonicity_violation = 0.0;
  // Largest relative defect of the per-step algebraic identities recorded by
  // the Newton-family solvers.
  double max_identity_defect = 0.0;

  // Indices fixed to zero by the reduction pipeline (empty otherwise).
  std::vector<Index> eliminated_indices;

  bool converged() const { return status == SolveStatus::Converged; }
};

} // namespace qve
