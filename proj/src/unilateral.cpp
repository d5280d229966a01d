#include "qve/unilateral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "internal.hpp"

namespace qve {

namespace {

using detail::inf_norm;

void require_nonnegative(const Matrix& m, const char* name) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) < 0.0)
        throw std::invalid_argument(std::string("unilateral: ") + name + "(" +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    ") is negative");
}

MMatrixHandle analyze_ib(const Matrix& B) {
  if (B.rows() != B.cols())
    throw std::invalid_argument("unilateral: B must be square");
  const Index m = B.rows();
  MMatrixHandle h = MMatrixHandle::analyze(Matrix::Identity(m, m) - B, 1e-10);
  if (h.classification() == MatrixClass::NotM)
    throw std::invalid_argument("unilateral: I - B is not an M-matrix");
  if (h.classification() == MatrixClass::SingularM)
    throw std::invalid_argument("unilateral: I - B is singular");
  return h;
}

struct MatrixRecorder {
  MatrixSolveReport& rep;

  void record(double residual_norm, double correction_norm) {
    rep.residual_norms.push_back(residual_norm);
    rep.correction_norms.push_back(correction_norm);
  }
};

void track_min(MatrixSolveReport& rep, const Matrix& m) {
  if (m.size() == 0) return;
  rep.min_coefficient_seen = std::min(rep.min_coefficient_seen, m.minCoeff());
}

} // namespace

UnilateralProblem::UnilateralProblem(Matrix A, Matrix B, Matrix C)
    : a_(std::move(A)), b_(std::move(B)), c_(std::move(C)), ib_(analyze_ib(b_)) {
  const Index m = a_.rows();
  if (a_.cols() != m || b_.rows() != m || b_.cols() != m || c_.rows() != m || c_.cols() != m)
    throw std::invalid_argument("unilateral: A, B, C must be square and of equal size");
  require_nonnegative(a_, "A");
  require_nonnegative(b_, "B");
  require_nonnegative(c_, "C");
  const Vector rowsums = (a_ + b_ + c_).rowwise().sum();
  for (Index i = 0; i < m; ++i)
    if (rowsums(i) > 1.0 + 1e-12)
      throw std::invalid_argument("unilateral: row " + std::to_string(i) +
                                  " of A + B + C sums to " + std::to_string(rowsums(i)) +
                                  " > 1");
}

Matrix unilateral_residual(const UnilateralProblem& p, const Matrix& X) {
  return X - p.A() - p.B() * X - p.C() * X * X;
}

MatrixSolveReport solve_lr(const UnilateralProblem& p, const SolveOptions& opts) {
  const Index m = p.dimension();
  MatrixSolveReport rep;
  MatrixRecorder rec{rep};

  Matrix bm = p.ib_handle().solve(p.A());  // B_{-1}
  Matrix bp = p.ib_handle().solve(p.C());  // B_1
  Matrix x = bm;
  Matrix u = bp;
  track_min(rep, bm);
  track_min(rep, bp);

  double correction = std::numeric_limits<double>::infinity();
  bool warned = false;
  for (int k = 0;; ++k) {
    const double rn = inf_norm(unilateral_residual(p, x));
    rec.record(rn, correction);
    rep.X = x;
    rep.iterations = k;
    if (correction <= opts.tol && rn <= opts.tol) {
      rep.status = SolveStatus::Converged;
      return rep;
    }
    if (rn <= opts.tol && k == 0) {
      // Degenerate start (e.g. C = 0): the first iterate already solves the
      // equation exactly; no correction has been computed yet.
      rep.status = SolveStatus::Converged;
      return rep;
    }
    if (k >= opts.maxit) {
      rep.status = SolveStatus::MaxIterations;
      return rep;
    }

    const Matrix K = Matrix::Identity(m, m) - bp * bm - bm * bp;
    detail::StepGate gate = detail::gate_step_matrix(K, opts.class_tol);
    if (gate.cls == MatrixClass::NotM) {
      rep.status = SolveStatus::BreakdownNotM;
      rep.breakdown_index = k;
      rep.note = "doubling pivot matrix lost the M-matrix property";
      return rep;
    }
    if (gate.cls == MatrixClass::SingularM && !warned) {
      warned = true;
      rep.warnings.push_back("doubling pivot matrix classified as singular M-matrix at step " +
                             std::to_string(k) + "; continuing");
    }
    Matrix bm2, bp2;
    try {
      bm2 = gate.handle->solve(Matrix(bm * bm));
      bp2 = gate.handle->solve(Matrix(bp * bp));
    } catch (const SingularFactorization& e) {
      rep.status = SolveStatus::BreakdownSingular;
      rep.breakdown_index = k;
      rep.note = e.what();
      return rep;
    }
    bm = std::move(bm2);
    bp = std::move(bp2);
    const Matrix corr = u * bm;
    x += corr;
    u = u * bp;
    correction = inf_norm(corr);
    track_min(rep, bm);
    track_min(rep, bp);
    track_min(rep, x);
  }
}

MatrixSolveReport solve_cr(const UnilateralProblem& p, const SolveOptions& opts) {
  const Index m = p.dimension();
  MatrixSolveReport rep;
  MatrixRecorder rec{rep};

  Matrix r = Matrix::Identity(m, m) - p.B();   // running resolvent block
  Matrix rh = r;                               // one-sided accumulator used for recovery
  Matrix ac = p.A();  // running A
  Matrix cc = p.C();  // running C
  const Matrix a0 = p.A();
  Matrix x = Matrix::Zero(m, m);
  bool have_x = false;
  double correction = std::numeric_limits<double>::infinity();
  bool warned = false;

  for (int k = 0;; ++k) {
    if (have_x) {
      const double rn = inf_norm(unilateral_residual(p, x));
      rec.record(rn, correction);
      rep.X = x;
      rep.iterations = k;
      if (correction <= opts.tol && rn <= opts.tol) {
        rep.status = SolveStatus::Converged;
        return rep;
      }
    }
    if (k >= opts.maxit) {
      rep.iterations = k;
      rep.status = SolveStatus::MaxIterations;
      return rep;
    }

    detail::StepGate rgate = detail::gate_step_matrix(r, opts.class_tol);
    if (rgate.cls == MatrixClass::NotM) {
      rep.status = SolveStatus::BreakdownNotM;
      rep.breakdown_index = k;
      rep.note = "running resolvent block lost the M-matrix property";
      return rep;
    }
    if (rgate.cls == MatrixClass::SingularM && !warned) {
      warned = true;
      rep.warnings.push_back("running resolvent block classified as singular M-matrix at step " +
                             std::to_string(k) + "; continuing");
    }

    Matrix xn;
    try {
      const Matrix ra = rgate.handle->solve(ac);  // R^{-1} A
      const Matrix rc = rgate.handle->solve(cc);  // R^{-1} C
      const Matrix down = cc * ra;
      rh -= down;
      detail::StepGate hgate = detail::gate_step_matrix(rh, opts.class_tol);
      if (hgate.cls == MatrixClass::NotM) {
        rep.status = SolveStatus::BreakdownNotM;
        rep.breakdown_index = k;
        rep.note = "recovery block lost the M-matrix property";
        return rep;
      }
      xn = hgate.handle->solve(a0);
      r -= down + ac * rc;
      ac = ac * ra;
      cc = cc * rc;
    } catch (const SingularFactorization& e) {
      rep.status = SolveStatus::BreakdownSingular;
      rep.breakdown_index = k;
      rep.note = e.what();
      return rep;
    }

    correction = have_x ? inf_norm(Matrix(xn - x)) : std::numeric_limits<double>::infinity();
    x = std::move(xn);
    have_x = true;
    track_min(rep, x);
    track_min(rep, ac);
    track_min(rep, cc);
  }
}

double graeffe_step_check(const UnilateralProblem& p, const Matrix& X) {
  const Index m = p.dimension();
  const Matrix bm = p.ib_handle().solve(p.A());
  const Matrix bp = p.ib_handle().solve(p.C());
  const Matrix K = Matrix::Identity(m, m) - bm * bp - bp * bm;
  MMatrixHandle kh = MMatrixHandle::analyze(K, 1e-10);
  const Matrix y = X * X;
  const Matrix defect = y - kh.solve(Matrix(bm * bm)) - kh.solve(Matrix(bp * bp)) * y * y;
  return inf_norm(defect);
}

} // namespace qve
