#include "qve/newton.hpp"

#include <cmath>
#include <utility>

#include "internal.hpp"

namespace qve {

namespace {

using detail::inf_norm;

bool is_diagonal_matrix(const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

void set_breakdown(SolveReport& rep, SolveStatus status, int k, std::string note) {
  rep.status = status;
  rep.breakdown_index = k;
  rep.note = std::move(note);
}

void warn_singular(SolveReport& rep, bool& warned, const char* what, int k) {
  if (warned) return;
  warned = true;
  rep.warnings.push_back(std::string(what) + " classified as singular M-matrix at iteration " +
                         std::to_string(k) + "; continuing");
}

} // namespace

SolveReport newton(const QveProblem& p, const SolveOptions& opts) {
  bool warned = false;
  return detail::run_iteration(
      p, Vector::Zero(p.dimension()), opts,
      [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
        detail::StepGate gate = detail::gate_step_matrix(derivative(p, x), opts.class_tol);
        if (gate.cls == MatrixClass::NotM) {
          set_breakdown(rep, SolveStatus::BreakdownNotM, k,
                        "derivative lost the M-matrix property");
          return std::nullopt;
        }
        if (gate.cls == MatrixClass::SingularM) warn_singular(rep, warned, "derivative", k);
        Vector x_next;
        try {
          x_next = gate.handle->solve(Vector(p.a() - p.b().apply(x, x)));
        } catch (const SingularFactorization& e) {
          set_breakdown(rep, SolveStatus::BreakdownSingular, k, e.what());
          return std::nullopt;
        }
        // Exact Taylor remainder of the quadratic: -F(x_{k+1}) = b(w, w).
        const Vector w = x_next - x;
        const Vector bww = p.b().apply(w, w);
        const double defect =
            inf_norm(Vector(residual(p, x_next) + bww)) / (1.0 + inf_norm(bww));
        rep.max_identity_defect = std::max(rep.max_identity_defect, defect);
        return x_next;
      });
}

SolveReport modified_newton(const QveProblem& p, const SolveOptions& opts) {
  const Index n = p.dimension();
  const Matrix& M = p.M();
  const bool fast_path = p.b().right_matrix_is_diagonal() && is_diagonal_matrix(M);
  bool warned_r = false, warned_g = false;
  return detail::run_iteration(
      p, Vector::Zero(n), opts,
      [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
        // Eliminate the linear term: z solves (M - right_matrix(x)) z = a.
        Vector z;
        Matrix gp;  // G'_x = I - R_x^{-1} left_matrix(z)
        if (fast_path) {
          const Vector rd = M.diagonal() - p.b().right_diagonal(x);
          if (rd.minCoeff() <= 0.0) {
            set_breakdown(rep,
                          rd.minCoeff() == 0.0 ? SolveStatus::BreakdownSingular
                                               : SolveStatus::BreakdownNotM,
                          k, "eliminated-step matrix lost the M-matrix property");
            return std::nullopt;
          }
          z = p.a().cwiseQuotient(rd);
          gp = -p.b().left_matrix(z);
          gp.array().colwise() /= rd.array();
          gp += Matrix::Identity(n, n);
        } else {
          detail::StepGate rgate =
              detail::gate_step_matrix(M - p.b().right_matrix(x), opts.class_tol);
          if (rgate.cls == MatrixClass::NotM) {
            set_breakdown(rep, SolveStatus::BreakdownNotM, k,
                          "eliminated-step matrix lost the M-matrix property");
            return std::nullopt;
          }
          if (rgate.cls == MatrixClass::SingularM)
            warn_singular(rep, warned_r, "eliminated-step matrix", k);
          try {
            z = rgate.handle->solve(p.a());
            gp = Matrix::Identity(n, n) - rgate.handle->solve(p.b().left_matrix(z));
          } catch (const SingularFactorization& e) {
            set_breakdown(rep, SolveStatus::BreakdownSingular, k, e.what());
            return std::nullopt;
          }
        }
        detail::StepGate ggate = detail::gate_step_matrix(std::move(gp), opts.class_tol);
        if (ggate.cls == MatrixClass::NotM) {
          set_breakdown(rep, SolveStatus::BreakdownNotM, k,
                        "substituted derivative lost the M-matrix property");
          return std::nullopt;
        }
        if (ggate.cls == MatrixClass::SingularM)
          warn_singular(rep, warned_g, "substituted derivative", k);
        try {
          return Vector(x + ggate.handle->solve(Vector(z - x)));
        } catch (const SingularFactorization& e) {
          set_breakdown(rep, SolveStatus::BreakdownSingular, k, e.what());
          return std::nullopt;
        }
      });
}

SolveReport newton_cr_form(const QveProblem& p, const SolveOptions& opts) {
  Matrix mt = p.M();   // running copy of F'_{x_k}
  Vector at = p.a();   // running copy of -F(x_k)
  bool warned = false;
  return detail::run_iteration(
      p, Vector::Zero(p.dimension()), opts,
      [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
        // Bookkeeping check: the incrementally updated pieces must match the
        // directly assembled derivative and residual.
        const double dm = inf_norm(Matrix(mt - derivative(p, x))) / (1.0 + inf_norm(mt));
        const double da = inf_norm(Vector(at + residual(p, x))) / (1.0 + inf_norm(at));
        rep.max_identity_defect = std::max({rep.max_identity_defect, dm, da});

        detail::StepGate gate = detail::gate_step_matrix(mt, opts.class_tol);
        if (gate.cls == MatrixClass::NotM) {
          set_breakdown(rep, SolveStatus::BreakdownNotM, k,
                        "running derivative lost the M-matrix property");
          return std::nullopt;
        }
        if (gate.cls == MatrixClass::SingularM) warn_singular(rep, warned, "running derivative", k);
        Vector w;
        try {
          w = gate.handle->solve(at);
        } catch (const SingularFactorization& e) {
          set_breakdown(rep, SolveStatus::BreakdownSingular, k, e.what());
          return std::nullopt;
        }
        at = p.b().apply(w, w);
        mt -= p.b().left_matrix(w) + p.b().right_matrix(w);
        return Vector(x + w);
      });
}

SolveReport modified_newton_cr_form(const QveProblem& p, const SolveOptions& opts) {
  const Index n = p.dimension();
  // Normalize the data once so the running transforms can use I in place of
  // the leading matrix: a~ = M^{-1} a, B~ = M^{-1} B (output index only).
  DenseTensor t = *p.b().dense();  // running transformed coefficient tensor
  Vector at = p.m_handle().solve(p.a());
  {
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> flat(
        t.data(), n, n * n);
    const Matrix normalized = p.m_handle().solve(Matrix(flat));
    flat = normalized;
  }
  BilinearMap bt = BilinearMap::from_tensor(t);
  Vector w = Vector::Zero(n);
  bool warned_r = false, warned_l = false;
  using RowMajorView =
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  return detail::run_iteration(
      p, Vector::Zero(n), opts,
      [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
        // Absorb the previous step into the problem data:
        //   a~ <- Q^{-1} a~,  B~ <- Q^{-1} B~  with  Q = I - right_{B~}(w).
        detail::StepGate rgate = detail::gate_step_matrix(
            Matrix(Matrix::Identity(n, n) - bt.right_matrix(w)), opts.class_tol);
        if (rgate.cls == MatrixClass::NotM) {
          set_breakdown(rep, SolveStatus::BreakdownNotM, k,
                        "transformed problem lost the M-matrix property");
          return std::nullopt;
        }
        if (rgate.cls == MatrixClass::SingularM)
          warn_singular(rep, warned_r, "transformed problem", k);
        try {
          at = rgate.handle->solve(at);
          // The tensor transform acts on the output index only; viewed as an
          // n x n^2 matrix (k-major layout) it is one multi-column solve.
          RowMajorView flat(t.data(), n, n * n);
          const Matrix transformed = rgate.handle->solve(Matrix(flat));
          flat = transformed;
        } catch (const SingularFactorization& e) {
          set_breakdown(rep, SolveStatus::BreakdownSingular, k, e.what());
          return std::nullopt;
        }
        bt = BilinearMap::from_tensor(t);

        detail::StepGate lgate = detail::gate_step_matrix(
            Matrix(Matrix::Identity(n, n) - bt.left_matrix(at)), opts.class_tol);
        if (lgate.cls == MatrixClass::NotM) {
          set_breakdown(rep, SolveStatus::BreakdownNotM, k,
                        "substituted derivative lost the M-matrix property");
          return std::nullopt;
        }
        if (lgate.cls == MatrixClass::SingularM)
          warn_singular(rep, warned_l, "substituted derivative", k);
        try {
          w = lgate.handle->solve(Vector(at - x));
        } catch (const SingularFactorization& e) {
          set_breakdown(rep, SolveStatus::BreakdownSingular, k, e.what());
          return std::nullopt;
        }
        return Vector(x + w);
      });
}

} // namespace qve
