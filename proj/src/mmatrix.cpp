#include "qve/mmatrix.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qve {

const char* to_string(MatrixClass c) {
  switch (c) {
    case MatrixClass::NonsingularM: return "nonsingular-M";
    case MatrixClass::SingularM: return "singular-M";
    case MatrixClass::NotM: return "not-M";
  }
  return "?";
}

SpectralEstimate spectral_radius(const Matrix& P, double tol, int maxit) {
  const Index n = P.rows();
  if (P.cols() != n) throw std::invalid_argument("spectral_radius: matrix not square");
  if (n == 0) return {0.0, true, 0};
  if (P.minCoeff() < 0.0)
    throw std::invalid_argument("spectral_radius: negative entry in nonnegative matrix");

  const double scale = P.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm >= rho
  if (scale == 0.0) return {0.0, true, 0};

  const double sigma = 0.05 * std::max(1.0, scale);
  Matrix A = P;
  A.diagonal().array() += sigma;

  Vector v = Vector::Ones(n) / static_cast<double>(n);
  double lambda = 0.0;
  for (int it = 1; it <= maxit; ++it) {
    Vector w = A * v;
    const double est = w.sum();  // = e^T A v = rho-estimate for 1-normalized v >= 0
    v = w / est;
    if (std::abs(est - lambda) <= tol * std::max(est, 1e-300))
      return {est - sigma, true, it};
    lambda = est;
  }
  return {lambda - sigma, false, maxit};
}

bool is_irreducible(const Matrix& P) {
  const Index n = P.rows();
  if (P.cols() != n) throw std::invalid_argument("is_irreducible: matrix not square");
  if (n <= 1) return true;

  // Strongly connected iff every node is reachable from node 0 and node 0 is
  // reachable from every node (BFS on the graph and its reverse).
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<Index> stack = {0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index w = 0; w < n; ++w) {
        const double entry = transpose ? P(w, u) : P(u, w);
        if (w != u && entry != 0.0 && !seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

MatrixClass classify_zmatrix(const Matrix& Z, double tol) {
  const Index n = Z.rows();
  if (Z.cols() != n) throw std::invalid_argument("classify_zmatrix: matrix not square");
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && Z(i, j) > 0.0) {
        std::ostringstream os;
        os << "classify_zmatrix: positive off-diagonal entry " << Z(i, j) << " at (" << i
           << ", " << j << ")";
        throw std::invalid_argument(os.str());
      }
  if (n == 0) return MatrixClass::NonsingularM;

  const double s = Z.diagonal().maxCoeff() + 1.0;
  Matrix P = -Z;
  P.diagonal().array() += s;
  const double rho = spectral_radius(P, std::min(1e-12, 0.01 * tol)).value;

  if (rho < s * (1.0 - tol)) return MatrixClass::NonsingularM;
  if (rho <= s * (1.0 + tol)) return MatrixClass::SingularM;
  return MatrixClass::NotM;
}

SingularFactorization::SingularFactorization(Index pivot, double value)
    : std::runtime_error("singular factorization: |pivot " + std::to_string(pivot) +
                         "| = " + std::to_string(value)),
      pivot_(pivot) {}

MMatrixHandle::MMatrixHandle(Matrix Z, MatrixClass cls)
    : Z_(std::move(Z)), lu_(Z_), cls_(cls) {}

MMatrixHandle MMatrixHandle::analyze(Matrix Z, double class_tol) {
  const MatrixClass cls = classify_zmatrix(Z, class_tol);
  return MMatrixHandle(std::move(Z), cls);
}

void MMatrixHandle::check_pivots() const {
  const Index n = Z_.rows();
  if (n == 0) return;
  const double floor = Z_.cwiseAbs().maxCoeff() * static_cast<double>(n) *
                       std::numeric_limits<double>::epsilon();
  const auto diag = lu_.matrixLU().diagonal();
  for (Index i = 0; i < n; ++i)
    if (std::abs(diag[i]) <= floor) throw SingularFactorization(i, std::abs(diag[i]));
}

Vector MMatrixHandle::solve(const Vector& rhs) const {
  if (rhs.size() != Z_.rows()) throw std::invalid_argument("MMatrixHandle::solve: size mismatch");
  check_pivots();
  return lu_.solve(rhs);
}

Matrix MMatrixHandle::solve(const Matrix& rhs) const {
  if (rhs.rows() != Z_.rows()) throw std::invalid_argument("MMatrixHandle::solve: size mismatch");
  check_pivots();
  return lu_.solve(rhs);
}

Vector msolve(const Matrix& M, const Vector& v, double class_tol) {
  MMatrixHandle h = MMatrixHandle::analyze(M, class_tol);
  if (h.classification() != MatrixClass::NonsingularM)
    throw std::invalid_argument(std::string("msolve: matrix classified ") +
                                to_string(h.classification()) +
                                ", nonsingular M-matrix required");
  return h.solve(v);
}

} // namespace qve
