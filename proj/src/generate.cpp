#include "qve/generate.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "internal.hpp"
#include "qve/models.hpp"
#include "qve/newton.hpp"

namespace qve {

namespace {

// Thin wrapper over mt19937_64 producing uniform doubles from the raw 64-bit
// stream (53 mantissa bits), so the generated values do not depend on the
// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool coin(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

Matrix random_nonneg(Rng& rng, Index rows, Index cols, double density) {
  Matrix m = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (rng.coin(density)) m(i, j) = rng.uniform(0.05, 1.0);
  return m;
}

// Rescales each row to the given sum; rows that came out all zero get a
// ridge entry first so the scaling is well defined.
void normalize_rows(Matrix& m, Rng& rng, double target) {
  for (Index i = 0; i < m.rows(); ++i) {
    double s = m.row(i).sum();
    if (s == 0.0) {
      m(i, (i + 1) % m.cols()) = rng.uniform(0.2, 1.0);
      s = m.row(i).sum();
    }
    m.row(i) *= target / s;
  }
}

void check_spec(const GenSpec& spec) {
  if (spec.size < 1) throw std::invalid_argument("gen: size must be at least 1");
  if (!(spec.scale > 0.0) || spec.scale > 1.0)
    throw std::invalid_argument("gen: scale must lie in (0, 1]");
}

ProblemFile make_generic(const GenSpec& spec, Rng& rng) {
  const Index n = spec.size;
  // Strictly row-diagonally dominant Z-matrix: guaranteed nonsingular M.
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && rng.coin(0.7)) m(i, j) = -0.3 * rng.uniform(0.1, 1.0);
  for (Index i = 0; i < n; ++i)
    m(i, i) = 1.0 - m.row(i).sum() + rng.uniform(0.0, 0.5);

  DenseTensor t(n);
  Vector be = Vector::Zero(n);  // b(e, e)
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (rng.coin(0.4)) {
          t(k, i, j) = rng.uniform(0.05, 1.0);
          be(k) += t(k, i, j);
        }
  if (be.maxCoeff() == 0.0) {
    t(0, 0, 0) = rng.uniform(0.2, 1.0);
    be(0) = t(0, 0, 0);
  }
  // Shrink the quadratic part until b(e, e) <= scale/2 * M e componentwise;
  // e is then a supersolution with room to spare for any a below.
  const Vector me = m * Vector::Ones(n);
  double sigma = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k)
    if (be(k) > 0.0) sigma = std::min(sigma, 0.5 * spec.scale * me(k) / be(k));
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) t(k, i, j) *= sigma;
  be *= sigma;

  Vector a(n);
  for (Index k = 0; k < n; ++k) a(k) = rng.uniform(0.3, 0.7) * (me(k) - be(k));

  ProblemFile f;
  f.spec = GenericSpec{std::move(m), std::move(a), std::move(t)};
  return f;
}

ProblemFile make_e1_file(const GenSpec& spec, Rng& rng) {
  const Index n = spec.size;
  DenseTensor t(n);
  Vector be = Vector::Zero(n);
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (rng.coin(0.5)) {
          t(k, i, j) = rng.uniform(0.05, 1.0);
          be(k) += t(k, i, j);
        }
  if (be.maxCoeff() == 0.0) {
    t(0, 0, 0) = rng.uniform(0.2, 1.0);
    be(0) = t(0, 0, 0);
  }
  const double sigma = 0.8 * spec.scale / be.maxCoeff();
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) t(k, i, j) *= sigma;
  }
  // Normalization a = e - b(e, e) makes e an exact solution (the model's
  // stochastic interpretation); b(e, e) <= 0.8 scale e keeps a positive.
  Vector a(n);
  for (Index k = 0; k < n; ++k) a(k) = 1.0 - sigma * be(k);

  ProblemFile f;
  f.spec = E1Spec{std::move(a), std::move(t)};
  return f;
}

ProblemFile make_e2_file(const GenSpec& spec, Rng& rng) {
  const Index m = spec.size;
  Matrix p = random_nonneg(rng, m, m, 0.9);
  Matrix pt = random_nonneg(rng, m, m, 0.9);
  // Row sums below 1/4 guarantee the supersolution 2e:
  // F(2e) = e - 4 [P e; Pt e] >= 0.
  normalize_rows(p, rng, 0.24 * spec.scale * rng.uniform(0.6, 1.0));
  normalize_rows(pt, rng, 0.24 * spec.scale * rng.uniform(0.6, 1.0));

  ProblemFile f;
  f.spec = E2Spec{std::move(p), std::move(pt)};
  return f;
}

ProblemFile make_e3_file(const GenSpec& spec, Rng& rng) {
  const Index m = spec.size;
  const Index n = 2 * m;
  Matrix q = random_nonneg(rng, n, n, 0.8);
  for (Index i = 0; i < n; ++i)
    if (q.row(i).sum() == 0.0) q(i, (i + 1) % n) = rng.uniform(0.2, 1.0);
  // Block matrix s I - Q with s safely above the largest row sum; the margin
  // shrinks as scale grows, moving the instance towards the singular case.
  const double margin = 1.02 + 0.5 * (1.0 - spec.scale);
  const double s = margin * q.rowwise().sum().maxCoeff();
  Matrix block = -q / s;
  block += Matrix::Identity(n, n) + Matrix(q.diagonal().asDiagonal()) / s;

  ProblemFile f;
  f.spec = E3Spec{block.bottomRightCorner(m, m),      // A
                  -block.bottomLeftCorner(m, m),      // B
                  -block.topRightCorner(m, m),        // C
                  block.topLeftCorner(m, m)};         // D
  return f;
}

ProblemFile make_e4_file(const GenSpec& spec, Rng& rng) {
  const Index m = spec.size;
  Matrix a = random_nonneg(rng, m, m, 0.8);
  Matrix b = random_nonneg(rng, m, m, 0.8);
  Matrix c = random_nonneg(rng, m, m, 0.8);
  // Row-stochastic total with the A share strictly above the C share keeps
  // the chain positive recurrent (noncritical) for every scale in (0, 1].
  const double ca = 0.5;
  const double cc = 0.3 * spec.scale;
  const double cb = 1.0 - ca - cc;
  normalize_rows(a, rng, ca);
  normalize_rows(b, rng, cb);
  normalize_rows(c, rng, cc);

  ProblemFile f;
  f.spec = E4Spec{std::move(a), std::move(b), std::move(c)};
  return f;
}

ProblemFile make_treelike_file(const GenSpec& spec, Rng& rng) {
  const Index m = spec.size;
  const double b_share = 0.3;
  const double a_share = 0.3 * spec.scale;
  const double d_share = 1.0 - b_share - a_share;

  Matrix b = random_nonneg(rng, m, m, 0.8);
  normalize_rows(b, rng, b_share);
  Matrix a1 = random_nonneg(rng, m, m, 0.8);
  Matrix a2 = random_nonneg(rng, m, m, 0.8);
  normalize_rows(a1, rng, 0.5 * a_share);
  normalize_rows(a2, rng, 0.5 * a_share);
  Matrix d1 = random_nonneg(rng, m, m, 0.8);
  Matrix d2 = random_nonneg(rng, m, m, 0.8);
  normalize_rows(d1, rng, d_share);
  normalize_rows(d2, rng, d_share);

  ProblemFile f;
  f.spec = TreeLikeSpec{std::move(b), {std::move(a1), std::move(a2)},
                        {std::move(d1), std::move(d2)}};
  return f;
}

// A supersolution constructed without solving, where the family admits one.
std::optional<Vector> constructed_supersolution(const ProblemFile& f, const QveProblem& p) {
  const std::string tag = f.format_tag();
  if (tag == "generic" || tag == "e1") return Vector(Vector::Ones(p.dimension()));
  if (tag == "e2") return Vector(2.0 * Vector::Ones(p.dimension()));
  return std::nullopt;
}

} // namespace

ProblemFile generate_problem(const GenSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);

  ProblemFile file;
  if (spec.tag == "generic") {
    file = make_generic(spec, rng);
  } else if (spec.tag == "e1") {
    file = make_e1_file(spec, rng);
  } else if (spec.tag == "e2") {
    file = make_e2_file(spec, rng);
  } else if (spec.tag == "e3") {
    file = make_e3_file(spec, rng);
  } else if (spec.tag == "e4") {
    file = make_e4_file(spec, rng);
  } else if (spec.tag == "treelike") {
    file = make_treelike_file(spec, rng);
  } else {
    throw std::invalid_argument("gen: unknown tag '" + spec.tag + "'");
  }

  // Certification: construct or compute a supersolution and verify it.  A
  // failure here is reported as an error, never silently emitted.
  LoadedProblem loaded = instantiate_problem(file);
  const QveProblem& p = loaded.qve;

  if (std::optional<Vector> y = constructed_supersolution(file, p)) {
    if (!check_supersolution(p, *y))
      throw std::runtime_error("gen: constructed supersolution failed verification (tag " +
                               spec.tag + ", seed " + std::to_string(spec.seed) + ")");
  }

  SolveOptions sopts;
  sopts.tol = 1e-13;
  sopts.maxit = 500;
  const SolveReport rep = newton(p, sopts);
  if (!rep.converged())
    throw std::runtime_error("gen: reference solve did not converge for seed " +
                             std::to_string(spec.seed) + "; try another seed");

  if (!constructed_supersolution(file, p)) {
    // Post-solve certificate: pad the solution along (F'_{x*})^{-1} e > 0;
    // F(x* + d u) = F'(x*) d u - d^2 b(u, u) = d e - d^2 b(u, u) >= 0 for
    // small enough d.
    detail::StepGate gate = detail::gate_step_matrix(derivative(p, rep.x), 1e-10);
    if (gate.cls != MatrixClass::NonsingularM)
      throw std::runtime_error(
          "gen: solution derivative is not a nonsingular M-matrix (near-critical instance); "
          "try another seed");
    const Vector u = gate.handle->solve(Vector(Vector::Ones(p.dimension())));
    const Vector buu = p.b().apply(u, u);
    const double d = std::min(0.1, 0.5 / std::max(1.0, detail::inf_norm(buu)));
    const Vector y = rep.x + d * u;
    if (!check_supersolution(p, y))
      throw std::runtime_error("gen: post-solve supersolution failed verification for seed " +
                               std::to_string(spec.seed));
  }

  ExpectedBlock expected;
  expected.x = rep.x;
  expected.residual_bound =
      rep.residual_norms.empty() ? sopts.tol : rep.residual_norms.back();
  file.expected = std::move(expected);
  return file;
}

} // namespace qve
