#include "qve/models.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "internal.hpp"

namespace qve {

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& x, Index rows, Index cols) {
  if (x.size() != rows * cols)
    throw std::invalid_argument("unvec: vector length does not match the requested shape");
  return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

double min_entry_or_zero(const Matrix& m) {
  return m.size() == 0 ? 0.0 : std::min(0.0, m.minCoeff());
}

// b([u1; v1], [u2; v2]) = [u1 o (P v2); v1 o (P~ u2)].
class E2Backend : public BilinearBackend {
 public:
  E2Backend(Matrix p, Matrix pt) : p_(std::move(p)), pt_(std::move(pt)), m_(p_.rows()) {}

  Index dimension() const override { return 2 * m_; }

  Vector apply(const Vector& x, const Vector& y) const override {
    Vector out(2 * m_);
    out.head(m_) = x.head(m_).cwiseProduct(p_ * y.tail(m_));
    out.tail(m_) = x.tail(m_).cwiseProduct(pt_ * y.head(m_));
    return out;
  }

  Matrix left_matrix(const Vector& x) const override {
    Matrix out = Matrix::Zero(2 * m_, 2 * m_);
    out.topRightCorner(m_, m_) = x.head(m_).asDiagonal() * p_;
    out.bottomLeftCorner(m_, m_) = x.tail(m_).asDiagonal() * pt_;
    return out;
  }

  Matrix right_matrix(const Vector& x) const override {
    return Matrix(right_diagonal(x).asDiagonal());
  }

  Vector left_diagonal(const Vector&) const override { return Vector::Zero(2 * m_); }

  Vector right_diagonal(const Vector& x) const override {
    Vector d(2 * m_);
    d.head(m_) = p_ * x.tail(m_);
    d.tail(m_) = pt_ * x.head(m_);
    return d;
  }

  bool right_is_diagonal() const override { return true; }

  double min_coefficient() const override {
    return std::min(min_entry_or_zero(p_), min_entry_or_zero(pt_));
  }

 private:
  Matrix p_, pt_;
  Index m_;
};

// b(x, y) = vec(X C Y) with X, Y of shape m1 x m2.
class E3Backend : public BilinearBackend {
 public:
  E3Backend(Matrix c, Index m1, Index m2) : c_(std::move(c)), m1_(m1), m2_(m2) {}

  Index dimension() const override { return m1_ * m2_; }

  Vector apply(const Vector& x, const Vector& y) const override {
    const Matrix xm = unvec(x, m1_, m2_);
    const Matrix ym = unvec(y, m1_, m2_);
    return vec(xm * (c_ * ym));
  }

  Matrix left_matrix(const Vector& x) const override {
    return kron(Matrix::Identity(m2_, m2_), unvec(x, m1_, m2_) * c_);
  }

  Matrix right_matrix(const Vector& x) const override {
    return kron((c_ * unvec(x, m1_, m2_)).transpose(), Matrix::Identity(m1_, m1_));
  }

  double min_coefficient() const override { return min_entry_or_zero(c_); }

 private:
  Matrix c_;
  Index m1_, m2_;
};

// b(x, y) = vec(C X Y) with X, Y of shape m x m.
class E4Backend : public BilinearBackend {
 public:
  E4Backend(Matrix c) : c_(std::move(c)), m_(c_.rows()) {}

  Index dimension() const override { return m_ * m_; }

  Vector apply(const Vector& x, const Vector& y) const override {
    return vec(c_ * unvec(x, m_, m_) * unvec(y, m_, m_));
  }

  Matrix left_matrix(const Vector& x) const override {
    return kron(Matrix::Identity(m_, m_), c_ * unvec(x, m_, m_));
  }

  Matrix right_matrix(const Vector& x) const override {
    return kron(unvec(x, m_, m_).transpose(), c_);
  }

  double min_coefficient() const override { return min_entry_or_zero(c_); }

 private:
  Matrix c_;
  Index m_;
};

// b(x, y) = vec( sum_i A_i X D_i Y ) with X, Y of shape m x m.
class TreeLikeBackend : public BilinearBackend {
 public:
  TreeLikeBackend(std::vector<Matrix> a, std::vector<Matrix> d, Index m)
      : a_(std::move(a)), d_(std::move(d)), m_(m) {}

  Index dimension() const override { return m_ * m_; }

  Vector apply(const Vector& x, const Vector& y) const override {
    return vec(coupling(unvec(x, m_, m_)) * unvec(y, m_, m_));
  }

  Matrix left_matrix(const Vector& x) const override {
    return kron(Matrix::Identity(m_, m_), coupling(unvec(x, m_, m_)));
  }

  Matrix right_matrix(const Vector& x) const override {
    const Matrix ym = unvec(x, m_, m_);
    Matrix out = Matrix::Zero(m_ * m_, m_ * m_);
    for (size_t i = 0; i < a_.size(); ++i)
      out += kron((d_[i] * ym).transpose(), a_[i]);
    return out;
  }

  double min_coefficient() const override {
    double mn = 0.0;
    for (const Matrix& m : a_) mn = std::min(mn, min_entry_or_zero(m));
    for (const Matrix& m : d_) mn = std::min(mn, min_entry_or_zero(m));
    return mn;
  }

 private:
  // sum_i A_i X D_i, the left factor of the quadratic term.
  Matrix coupling(const Matrix& xm) const {
    Matrix g = Matrix::Zero(m_, m_);
    for (size_t i = 0; i < a_.size(); ++i) g += a_[i] * xm * d_[i];
    return g;
  }

  std::vector<Matrix> a_, d_;
  Index m_;
};

void require_square(const Matrix& m, const char* name) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string("model: ") + name + " must be square");
}

void require_nonnegative(const Matrix& m, const char* name) {
  if (m.size() > 0 && m.minCoeff() < 0.0)
    throw std::invalid_argument(std::string("model: ") + name + " has a negative entry");
}

} // namespace

QveProblem make_e1(Vector a, BilinearMap b, bool verify_normalization) {
  const Index n = a.size();
  if (b.dimension() != n)
    throw std::invalid_argument("e1: a and b disagree on the dimension");
  if (verify_normalization) {
    const Vector e = Vector::Ones(n);
    const double defect = detail::inf_norm(Vector(a + b.apply(e, e) - e));
    if (defect > 1e-12)
      throw std::invalid_argument("e1: a + b(e, e) = e violated by " + std::to_string(defect));
  }
  return QveProblem(Matrix::Identity(n, n), std::move(a), std::move(b));
}

std::pair<Vector, Vector> E2Problem::split(const Vector& w) const {
  if (w.size() != 2 * m)
    throw std::invalid_argument("e2: vector does not have the stacked dimension 2m");
  return {w.head(m), w.tail(m)};
}

E2Problem make_e2(Matrix P, Matrix Pt) {
  require_square(P, "P");
  require_square(Pt, "Pt");
  if (P.rows() != Pt.rows())
    throw std::invalid_argument("e2: P and Pt must have equal size");
  require_nonnegative(P, "P");
  require_nonnegative(Pt, "Pt");
  const Index m = P.rows();
  BilinearMap b(std::make_shared<E2Backend>(P, Pt));
  QveProblem qve(Matrix::Identity(2 * m, 2 * m), Vector::Ones(2 * m), std::move(b));
  return E2Problem{m, std::move(P), std::move(Pt), std::move(qve)};
}

Matrix E3Problem::unvec(const Vector& x) const { return qve::unvec(x, m1, m2); }

Matrix E3Problem::riccati_residual(const Matrix& X) const {
  return X * C * X + B - A * X - X * D;
}

E3Problem make_e3(Matrix A, Matrix B, Matrix C, Matrix D) {
  require_square(A, "A");
  require_square(D, "D");
  const Index m1 = A.rows(), m2 = D.rows();
  if (B.rows() != m1 || B.cols() != m2)
    throw std::invalid_argument("e3: B must be m1 x m2");
  if (C.rows() != m2 || C.cols() != m1)
    throw std::invalid_argument("e3: C must be m2 x m1");

  // The defining structural requirement lives on the block matrix
  // [[D, -C], [-B, A]]: nonsingular M-matrix, or singular irreducible.
  Matrix block(m1 + m2, m1 + m2);
  block.topLeftCorner(m2, m2) = D;
  block.topRightCorner(m2, m1) = -C;
  block.bottomLeftCorner(m1, m2) = -B;
  block.bottomRightCorner(m1, m1) = A;
  MatrixClass cls;
  try {
    cls = classify_zmatrix(block, 1e-10);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("e3: coefficient block matrix is not a Z-matrix (") +
                                e.what() + ")");
  }
  bool singular_irreducible = false;
  if (cls == MatrixClass::SingularM) {
    Matrix offdiag = block.cwiseAbs();
    offdiag.diagonal().setZero();
    if (!is_irreducible(offdiag))
      throw std::invalid_argument(
          "e3: coefficient block matrix is singular and reducible; minimal solution theory "
          "does not apply");
    singular_irreducible = true;
  } else if (cls == MatrixClass::NotM) {
    throw std::invalid_argument("e3: coefficient block matrix is not an M-matrix");
  }

  Matrix mvec = kron(Matrix::Identity(m2, m2), A) + kron(D.transpose(), Matrix::Identity(m1, m1));
  BilinearMap b(std::make_shared<E3Backend>(C, m1, m2));
  QveProblem qve(std::move(mvec), vec(B), std::move(b));
  return E3Problem{m1,      m2,   std::move(A), std::move(B), std::move(C), std::move(D),
                   singular_irreducible, std::move(qve)};
}

Matrix E4Problem::unvec(const Vector& x) const {
  const Index m = unilateral.dimension();
  return qve::unvec(x, m, m);
}

E4Problem make_e4(Matrix A, Matrix B, Matrix C) {
  UnilateralProblem uni(std::move(A), std::move(B), std::move(C));
  const Index m = uni.dimension();
  Matrix mvec = kron(Matrix::Identity(m, m), Matrix(Matrix::Identity(m, m) - uni.B()));
  BilinearMap b(std::make_shared<E4Backend>(uni.C()));
  QveProblem qve(std::move(mvec), vec(uni.A()), std::move(b));
  return E4Problem{std::move(uni), std::move(qve)};
}

Matrix TreeLikeProblem::unvec(const Vector& y) const {
  return qve::unvec(y, B.rows(), B.rows());
}

Matrix TreeLikeProblem::recover_x(const Matrix& Y) const {
  Eigen::FullPivLU<Matrix> lu(Y);
  if (!lu.isInvertible())
    throw std::runtime_error("tree-like: Y is singular, X = -Y^{-1} is undefined");
  return -lu.inverse();
}

Matrix TreeLikeProblem::recover_t(const Matrix& Y) const {
  return recover_x(Y) + Matrix::Identity(B.rows(), B.rows());
}

TreeLikeProblem make_treelike(Matrix B, std::vector<Matrix> A, std::vector<Matrix> D) {
  require_square(B, "B");
  const Index m = B.rows();
  if (A.empty() || A.size() != D.size())
    throw std::invalid_argument("tree-like: need equally many A_i and D_i terms (at least one)");
  require_nonnegative(B, "B");
  Matrix asum = Matrix::Zero(m, m);
  for (size_t i = 0; i < A.size(); ++i) {
    if (A[i].rows() != m || A[i].cols() != m || D[i].rows() != m || D[i].cols() != m)
      throw std::invalid_argument("tree-like: all coefficient matrices must be m x m");
    require_nonnegative(A[i], "A_i");
    require_nonnegative(D[i], "D_i");
    asum += A[i];
  }
  for (size_t j = 0; j < D.size(); ++j) {
    const Vector rowsums = (B + D[j] + asum).rowwise().sum();
    for (Index r = 0; r < m; ++r)
      if (std::abs(rowsums(r) - 1.0) > 1e-12)
        throw std::invalid_argument("tree-like: row " + std::to_string(r) + " of B + D_" +
                                    std::to_string(j) + " + sum A_i sums to " +
                                    std::to_string(rowsums(r)) + ", expected 1");
  }

  Matrix mvec = kron(Matrix::Identity(m, m), Matrix(Matrix::Identity(m, m) - B));
  BilinearMap b(std::make_shared<TreeLikeBackend>(A, D, m));
  QveProblem qve(std::move(mvec), vec(Matrix::Identity(m, m)), std::move(b));
  return TreeLikeProblem{std::move(B), std::move(A), std::move(D), std::move(qve)};
}

} // namespace qve
