#include "qve/iterations.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "internal.hpp"

namespace qve {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "maxit";
    case SolveStatus::BreakdownSingular: return "breakdown-singular";
    case SolveStatus::BreakdownNotM: return "breakdown-not-m";
  }
  return "unknown";
}

namespace {

using detail::inf_norm;

void check_same_shape(const QveProblem& p, const Matrix& N, const Matrix& P) {
  const Index n = p.dimension();
  if (N.rows() != n || N.cols() != n || P.rows() != n || P.cols() != n)
    throw std::invalid_argument("splitting: N and P must match the problem dimension");
}

// b1 + b2 must reproduce the quadratic form of b.  Comparing the symmetric
// parts B(k,i,j) + B(k,j,i) on basis pairs keeps argument-swapped splittings
// admissible while still pinning down b(x, x) for every x.
void check_bilinear_split(const QveProblem& p, const BilinearMap& b1, const BilinearMap& b2) {
  const Index n = p.dimension();
  if (b1.dimension() != n || b2.dimension() != n)
    throw std::invalid_argument("splitting: bilinear parts must match the problem dimension");
  if (b1.min_coefficient() < 0.0 || b2.min_coefficient() < 0.0)
    throw std::invalid_argument("splitting: bilinear parts must have nonnegative coefficients");
  Vector ei = Vector::Zero(n), ej = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    ei(i) = 1.0;
    for (Index j = i; j < n; ++j) {
      ej(j) = 1.0;
      const Vector want = p.b().apply(ei, ej) + p.b().apply(ej, ei);
      const Vector got = b1.apply(ei, ej) + b1.apply(ej, ei) + b2.apply(ei, ej) + b2.apply(ej, ei);
      const double scale = 1.0 + inf_norm(want);
      if (inf_norm(Vector(want - got)) > 1e-12 * scale)
        throw std::invalid_argument("splitting: b1 + b2 does not reproduce the quadratic form of b");
      ej(j) = 0.0;
    }
    ei(i) = 0.0;
  }
}

// Starting vectors must lie below the minimal solution in the monotone order:
// x0 >= 0 and F(x0) <= 0 componentwise, both up to a roundoff slack.
void check_start(const QveProblem& p, const Vector& x0) {
  if (x0.size() != p.dimension())
    throw std::invalid_argument("starting vector has wrong dimension");
  const double xscale = 1.0 + inf_norm(x0);
  if (x0.size() > 0 && x0.minCoeff() < -1e-13 * xscale)
    throw std::invalid_argument("starting vector must be nonnegative");
  const Vector r = residual(p, x0);
  const double rscale = 1.0 + inf_norm(p.a()) + inf_norm(r);
  if (r.size() > 0 && r.maxCoeff() > 1e-10 * rscale)
    throw std::invalid_argument("starting vector must satisfy F(x0) <= 0 componentwise");
}

} // namespace

Splitting make_splitting(const QveProblem& p, Matrix N, Matrix P,
                         BilinearMap b1, BilinearMap b2, std::string name) {
  check_same_shape(p, N, P);
  const double nscale = 1.0 + inf_norm(p.M());
  if (inf_norm(Matrix(N - P - p.M())) > 1e-12 * nscale)
    throw std::invalid_argument("splitting: N - P must reproduce M");
  if (P.size() > 0 && P.minCoeff() < 0.0)
    throw std::invalid_argument("splitting: P must be nonnegative");
  check_bilinear_split(p, b1, b2);
  if (classify_zmatrix(N, 1e-10) != MatrixClass::NonsingularM)
    throw std::invalid_argument("splitting: N must be a nonsingular M-matrix");
  return Splitting{std::move(N), std::move(P), std::move(b1), std::move(b2), std::move(name)};
}

Splitting splitting_depth(const QveProblem& p) {
  const Index n = p.dimension();
  return make_splitting(p, p.M(), Matrix::Zero(n, n), BilinearMap::zero(n), p.b(), "depth");
}

Splitting splitting_order(const QveProblem& p) {
  const Index n = p.dimension();
  return make_splitting(p, p.M(), Matrix::Zero(n, n), p.b(), BilinearMap::zero(n), "order");
}

Splitting splitting_order_swapped(const QveProblem& p) {
  const Index n = p.dimension();
  return make_splitting(p, p.M(), Matrix::Zero(n, n), p.b().swapped(), BilinearMap::zero(n),
                        "order-swap");
}

Splitting splitting_jacobi(const QveProblem& p) {
  const Index n = p.dimension();
  Matrix N = Matrix(p.M().diagonal().asDiagonal());
  Matrix P = N - p.M();
  return make_splitting(p, std::move(N), std::move(P), BilinearMap::zero(n), p.b(), "jacobi");
}

Splitting splitting_half(const QveProblem& p) {
  const Index n = p.dimension();
  return make_splitting(p, p.M(), Matrix::Zero(n, n), p.b().scaled(0.5), p.b().scaled(0.5),
                        "half");
}

using detail::run_iteration;

SolveReport fixed_point(const QveProblem& p, const SolveOptions& opts) {
  const Vector x0 = Vector::Zero(p.dimension());
  return run_iteration(p, x0, opts, [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
    const Vector rhs = p.a() + p.b().apply(x, x);
    try {
      return p.m_handle().solve(rhs);
    } catch (const SingularFactorization& e) {
      rep.status = SolveStatus::BreakdownSingular;
      rep.breakdown_index = k;
      rep.note = e.what();
      return std::nullopt;
    }
  });
}

SolveReport functional_iteration(const QveProblem& p, const Splitting& s, const Vector& x0,
                                 const SolveOptions& opts) {
  check_start(p, x0);
  bool warned_singular = false;
  return run_iteration(p, x0, opts, [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
    detail::StepGate gate = detail::gate_step_matrix(s.N - s.b1.left_matrix(x), opts.class_tol);
    if (gate.cls == MatrixClass::NotM) {
      rep.status = SolveStatus::BreakdownNotM;
      rep.breakdown_index = k;
      rep.note = "step matrix lost the M-matrix property";
      return std::nullopt;
    }
    if (gate.cls == MatrixClass::SingularM && !warned_singular) {
      warned_singular = true;
      rep.warnings.push_back("step matrix classified as singular M-matrix at iteration " +
                             std::to_string(k) + "; continuing");
    }
    const Vector rhs = p.a() + s.P * x + s.b2.apply(x, x);
    try {
      return gate.handle->solve(rhs);
    } catch (const SingularFactorization& e) {
      rep.status = SolveStatus::BreakdownSingular;
      rep.breakdown_index = k;
      rep.note = e.what();
      return std::nullopt;
    }
  });
}

SolveReport functional_iteration(const QveProblem& p, const Splitting& s, const SolveOptions& opts) {
  return functional_iteration(p, s, Vector::Zero(p.dimension()), opts);
}

SolveReport gauss_seidel_iteration(const QveProblem& p, const Splitting& s, const Vector& x0,
                                   const SolveOptions& opts) {
  check_start(p, x0);
  const Index n = p.dimension();
  bool warned_singular = false;
  return run_iteration(p, x0, opts, [&](const Vector& x, int k, SolveReport& rep) -> std::optional<Vector> {
    // Classify the sweep matrix once per sweep at the sweep's starting point.
    detail::StepGate gate = detail::gate_step_matrix(s.N - s.b1.left_matrix(x), opts.class_tol);
    if (gate.cls == MatrixClass::NotM) {
      rep.status = SolveStatus::BreakdownNotM;
      rep.breakdown_index = k;
      rep.note = "sweep matrix lost the M-matrix property";
      return std::nullopt;
    }
    if (gate.cls == MatrixClass::SingularM && !warned_singular) {
      warned_singular = true;
      rep.warnings.push_back("sweep matrix classified as singular M-matrix at iteration " +
                             std::to_string(k) + "; continuing");
    }
    // Row i is the i-th equation of N y - b1(y, y) = a + P y + b2(y, y),
    // solved for y_i with every other entry of y frozen at its freshest
    // value.  Writing (J(y) y)_i = N.row(i) y - b1(y, y)_i and splitting off
    // the diagonal coefficient d_i = N(i,i) - left_diag_{b1}(y)_i gives the
    // update below; d_i must stay positive for the sweep to make sense.
    Vector y = x;
    for (Index i = 0; i < n; ++i) {
      const double vb1 = s.b1.apply(y, y)(i);
      const double vb2 = s.b2.apply(y, y)(i);
      const double jyy = s.N.row(i).dot(y) - vb1;
      const double g = p.a()(i) + s.P.row(i).dot(y) + vb2;
      const double d = s.N(i, i) - s.b1.left_diagonal(y)(i);
      if (!(d > 0.0)) {
        rep.status = d == 0.0 ? SolveStatus::BreakdownSingular : SolveStatus::BreakdownNotM;
        rep.breakdown_index = k;
        rep.note = "sweep diagonal became nonpositive in row " + std::to_string(i);
        return std::nullopt;
      }
      y(i) = (g - (jyy - d * y(i))) / d;
    }
    return y;
  });
}

SolveReport gauss_seidel_iteration(const QveProblem& p, const Splitting& s, const SolveOptions& opts) {
  return gauss_seidel_iteration(p, s, Vector::Zero(p.dimension()), opts);
}

SolveReport switch_iterations(const QveProblem& p, const std::vector<Splitting>& schedule,
                              const SolveOptions& opts) {
  if (schedule.empty()) throw std::invalid_argument("switch_iterations: empty schedule");
  const int segments = static_cast<int>(schedule.size());
  const int per_segment = std::max(1, opts.maxit / segments);

  SolveReport total;
  Vector x = Vector::Zero(p.dimension());
  for (int seg = 0; seg < segments; ++seg) {
    SolveOptions sub = opts;
    sub.maxit = (seg + 1 == segments) ? std::max(1, opts.maxit - seg * per_segment) : per_segment;
    SolveReport part = functional_iteration(p, schedule[seg], x, sub);

    const bool first = (seg == 0);
    // The first record of a later segment duplicates the previous segment's
    // final iterate; drop it when concatenating histories.
    std::size_t skip = first ? 0 : 1;
    total.residual_norms.insert(total.residual_norms.end(),
                                part.residual_norms.begin() + skip, part.residual_norms.end());
    total.iterates.insert(total.iterates.end(), part.iterates.begin() + skip, part.iterates.end());
    total.elapsed_seconds.insert(total.elapsed_seconds.end(),
                                 part.elapsed_seconds.begin() + skip, part.elapsed_seconds.end());
    for (const std::string& w : part.warnings)
      total.warnings.push_back(schedule[seg].name + ": " + w);
    total.max_monotonicity_violation =
        std::max(total.max_monotonicity_violation, part.max_monotonicity_violation);
    total.max_identity_defect = std::max(total.max_identity_defect, part.max_identity_defect);
    total.iterations += part.iterations;
    total.x = part.x;
    total.status = part.status;
    total.diverged = part.diverged;
    if (!part.note.empty()) total.note = schedule[seg].name + ": " + part.note;
    if (part.breakdown_index >= 0)
      total.breakdown_index = total.iterations - part.iterations + part.breakdown_index;
    x = part.x;
    if (part.status == SolveStatus::Converged || part.status == SolveStatus::BreakdownSingular ||
        part.status == SolveStatus::BreakdownNotM || part.diverged)
      break;
  }
  return total;
}

} // namespace qve
