#pragma once
//
// Nonnegative bilinear maps b : R^n x R^n -> R^n.
//
// A map is determined by a coefficient tensor B with
//
//     b(x, y)_k = sum_{i,j} B(k,i,j) x_i y_j .
//
// Dense maps store the tensor k-major (flat index (k*n + i)*n + j), so the
// output slice B_k is a contiguous row-major n x n matrix.  Structured model
// backends (two-player coupling, Riccati, unilateral, tree-like) implement the
// same interface without materializing n^3 coefficients.
//
// Matrix views, fixing one argument:
//   left_matrix(x)  : w |-> b(x, w)   (x in the first slot)
//   right_matrix(x) : w |-> b(w, x)   (x in the second slot)
// so apply(x, y) = left_matrix(x) * y = right_matrix(y) * x.

#include <memory>
#include <vector>

#include "qve/types.hpp"

namespace qve {

// Dense k-major coefficient tensor.
class DenseTensor {
 public:
  explicit DenseTensor(Index n) : n_(n), coef_(static_cast<size_t>(n * n * n), 0.0) {}

  Index dimension() const { return n_; }

  double operator()(Index k, Index i, Index j) const {
    return coef_[static_cast<size_t>((k * n_ + i) * n_ + j)];
  }
  double& operator()(Index k, Index i, Index j) {
    return coef_[static_cast<size_t>((k * n_ + i) * n_ + j)];
  }

  const double* data() const { return coef_.data(); }
  double* data() { return coef_.data(); }

 private:
  Index n_;
  std::vector<double> coef_;
};

// Backend interface.  Implementations must be immutable after construction;
// BilinearMap shares them freely across threads and problem copies.
class BilinearBackend {
 public:
  virtual ~BilinearBackend() = default;

  virtual Index dimension() const = 0;
  virtual Vector apply(const Vector& x, const Vector& y) const = 0;
  virtual Matrix left_matrix(const Vector& x) const = 0;
  virtual Matrix right_matrix(const Vector& x) const = 0;

  // Diagonals of the matrix views; cheaper than assembling the full matrix.
  virtual Vector left_diagonal(const Vector& x) const { return left_matrix(x).diagonal(); }
  virtual Vector right_diagonal(const Vector& x) const { return right_matrix(x).diagonal(); }

  virtual bool left_is_diagonal() const { return false; }
  virtual bool right_is_diagonal() const { return false; }

  // Smallest coefficient B(k,i,j); >= 0 certifies nonnegativity of the map.
  virtual double min_coefficient() const;

  // Materialized tensor (basis probes by default).
  virtual std::shared_ptr<const DenseTensor> dense() const;
};

class BilinearMap {
 public:
  explicit BilinearMap(std::shared_ptr<const BilinearBackend> impl);

  static BilinearMap zero(Index n);
  static BilinearMap from_tensor(DenseTensor t);

  Index dimension() const { return impl_->dimension(); }

  Vector apply(const Vector& x, const Vector& y) const;
  Matrix left_matrix(const Vector& x) const;
  Matrix right_matrix(const Vector& x) const;
  Vector left_diagonal(const Vector& x) const;
  Vector right_diagonal(const Vector& x) const;

  bool left_matrix_is_diagonal() const { return impl_->left_is_diagonal(); }
  bool right_matrix_is_diagonal() const { return impl_->right_is_diagonal(); }

  double min_coefficient() const { return impl_->min_coefficient(); }
  std::shared_ptr<const DenseTensor> dense() const { return impl_->dense(); }

  // Argument-swapped map b~(x,y) = b(y,x).  Involutive: swapping twice hands
  // back the original backend, so round trips are bit-exact and free.
  BilinearMap swapped() const;

  // Map with every coefficient multiplied by s (s >= 0 for valid problems).
  BilinearMap scaled(double s) const;

  const BilinearBackend& backend() const { return *impl_; }
  std::shared_ptr<const BilinearBackend> backend_ptr() const { return impl_; }

 private:
  std::shared_ptr<const BilinearBackend> impl_;
};

} // namespace qve
