#pragma once
//
// Shared helpers for the solver translation units.  Not installed.

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <utility>

#include "qve/mmatrix.hpp"
#include "qve/problem.hpp"
#include "qve/solve_report.hpp"

namespace qve::detail {

inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double inf_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

struct StepGate {
  MatrixClass cls = MatrixClass::NotM;
  std::optional<MMatrixHandle> handle;
};

// Step matrices are assembled as (Z-matrix) minus nonnegative pieces, so in
// exact arithmetic they are Z-matrices; rounding can still leave an
// off-diagonal entry a hair above zero, which the strict classifier rejects.
// Snap entries within a tiny window to zero, call everything beyond it a
// genuine violation.
inline StepGate gate_step_matrix(Matrix J, double class_tol) {
  const Index n = J.rows();
  const double scale = n > 0 ? J.cwiseAbs().maxCoeff() : 0.0;
  const double snap = 1e-14 * std::max(1.0, scale);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j || J(i, j) <= 0.0) continue;
      if (J(i, j) <= snap)
        J(i, j) = 0.0;
      else
        return {};
    }
  MMatrixHandle h = MMatrixHandle::analyze(std::move(J), class_tol);
  MatrixClass cls = h.classification();
  return {cls, std::move(h)};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Appends one iterate record; iterate copies and timings only when asked.
struct Recorder {
  SolveReport& rep;
  const SolveOptions& opts;
  Stopwatch clock;

  void record(const Vector& x, double residual_norm) {
    rep.residual_norms.push_back(residual_norm);
    if (opts.record_history) {
      rep.iterates.push_back(x);
      rep.elapsed_seconds.push_back(clock.seconds());
    }
  }
};

inline void note_monotonicity(SolveReport& rep, const Vector& x_old, const Vector& x_new) {
  if (x_old.size() == 0) return;
  rep.max_monotonicity_violation =
      std::max(rep.max_monotonicity_violation, (x_old - x_new).maxCoeff());
}

inline void warn_once(SolveReport& rep, const std::string& text) {
  if (std::find(rep.warnings.begin(), rep.warnings.end(), text) == rep.warnings.end())
    rep.warnings.push_back(text);
}

// Shared iteration shell.  `step(x, k, rep)` maps the current iterate to the
// next one, or reports a breakdown by filling in `rep` and returning nothing.
// Residuals are always evaluated against the original problem, so resummed
// variants stop at the same true residual as their plain counterparts.
template <class StepFn>
SolveReport run_iteration(const QveProblem& p, Vector x, const SolveOptions& opts, StepFn step) {
  SolveReport rep;
  Recorder rec{rep, opts, Stopwatch{}};
  for (int k = 0;; ++k) {
    const Vector r = residual(p, x);
    const double rn = inf_norm(r);
    rec.record(x, rn);
    rep.x = x;
    rep.iterations = k;
    if (rn <= opts.tol) {
      rep.status = SolveStatus::Converged;
      return rep;
    }
    if (k >= opts.maxit) {
      rep.status = SolveStatus::MaxIterations;
      return rep;
    }
    std::optional<Vector> next = step(x, k, rep);
    if (!next) return rep;  // step filled in a breakdown status
    note_monotonicity(rep, x, *next);
    x = std::move(*next);
    if (inf_norm(x) > opts.divergence_guard) {
      rep.diverged = true;
      rep.note =
          "iterates diverged beyond the guard; existence assumption A1 presumed violated "
          "(no nonnegative solution)";
      rec.record(x, inf_norm(residual(p, x)));
      rep.x = x;
      rep.iterations = k + 1;
      rep.status = SolveStatus::MaxIterations;
      return rep;
    }
  }
}

} // namespace qve::detail
