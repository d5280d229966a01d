#include "qve/bilinear.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace qve {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

RowMajorMap slice(const DenseTensor& t, Index k) {
  const Index n = t.dimension();
  return RowMajorMap(t.data() + k * n * n, n, n);
}

void check_dims(const BilinearBackend& b, const Vector& x, const char* what) {
  if (x.size() != b.dimension())
    throw std::invalid_argument(std::string("bilinear map: dimension mismatch in ") + what);
}

class DenseBackend final : public BilinearBackend {
 public:
  explicit DenseBackend(DenseTensor t) : t_(std::make_shared<DenseTensor>(std::move(t))) {}

  Index dimension() const override { return t_->dimension(); }

  Vector apply(const Vector& x, const Vector& y) const override {
    const Index n = dimension();
    Vector r(n);
    for (Index k = 0; k < n; ++k) r[k] = x.dot(slice(*t_, k) * y);
    return r;
  }

  Matrix left_matrix(const Vector& x) const override {
    const Index n = dimension();
    Matrix L(n, n);
    for (Index k = 0; k < n; ++k) L.row(k) = x.transpose() * slice(*t_, k);
    return L;
  }

  Matrix right_matrix(const Vector& x) const override {
    const Index n = dimension();
    Matrix R(n, n);
    for (Index k = 0; k < n; ++k) R.row(k) = (slice(*t_, k) * x).transpose();
    return R;
  }

  Vector left_diagonal(const Vector& x) const override {
    const Index n = dimension();
    Vector d(n);
    for (Index k = 0; k < n; ++k) d[k] = x.dot(slice(*t_, k).col(k));
    return d;
  }

  Vector right_diagonal(const Vector& x) const override {
    const Index n = dimension();
    Vector d(n);
    for (Index k = 0; k < n; ++k) d[k] = slice(*t_, k).row(k).dot(x);
    return d;
  }

  double min_coefficient() const override {
    const Index total = dimension() * dimension() * dimension();
    if (total == 0) return 0.0;
    return *std::min_element(t_->data(), t_->data() + total);
  }

  std::shared_ptr<const DenseTensor> dense() const override { return t_; }

 private:
  std::shared_ptr<DenseTensor> t_;
};

class SwappedBackend final : public BilinearBackend {
 public:
  explicit SwappedBackend(std::shared_ptr<const BilinearBackend> inner)
      : inner_(std::move(inner)) {}

  Index dimension() const override { return inner_->dimension(); }
  Vector apply(const Vector& x, const Vector& y) const override { return inner_->apply(y, x); }
  Matrix left_matrix(const Vector& x) const override { return inner_->right_matrix(x); }
  Matrix right_matrix(const Vector& x) const override { return inner_->left_matrix(x); }
  Vector left_diagonal(const Vector& x) const override { return inner_->right_diagonal(x); }
  Vector right_diagonal(const Vector& x) const override { return inner_->left_diagonal(x); }
  bool left_is_diagonal() const override { return inner_->right_is_diagonal(); }
  bool right_is_diagonal() const override { return inner_->left_is_diagonal(); }
  double min_coefficient() const override { return inner_->min_coefficient(); }

  std::shared_ptr<const DenseTensor> dense() const override {
    auto d = inner_->dense();
    const Index n = d->dimension();
    DenseTensor t(n);
    for (Index k = 0; k < n; ++k)
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) t(k, i, j) = (*d)(k, j, i);
    return std::make_shared<const DenseTensor>(std::move(t));
  }

  std::shared_ptr<const BilinearBackend> inner() const { return inner_; }

 private:
  std::shared_ptr<const BilinearBackend> inner_;
};

class ScaledBackend final : public BilinearBackend {
 public:
  ScaledBackend(double s, std::shared_ptr<const BilinearBackend> inner)
      : s_(s), inner_(std::move(inner)) {}

  Index dimension() const override { return inner_->dimension(); }
  Vector apply(const Vector& x, const Vector& y) const override { return s_ * inner_->apply(x, y); }
  Matrix left_matrix(const Vector& x) const override { return s_ * inner_->left_matrix(x); }
  Matrix right_matrix(const Vector& x) const override { return s_ * inner_->right_matrix(x); }
  Vector left_diagonal(const Vector& x) const override { return s_ * inner_->left_diagonal(x); }
  Vector right_diagonal(const Vector& x) const override { return s_ * inner_->right_diagonal(x); }
  bool left_is_diagonal() const override { return inner_->left_is_diagonal(); }
  bool right_is_diagonal() const override { return inner_->right_is_diagonal(); }

  // s >= 0 is enforced on construction, so scaling preserves the minimum's sign.
  double min_coefficient() const override { return s_ * inner_->min_coefficient(); }

  std::shared_ptr<const DenseTensor> dense() const override {
    auto d = inner_->dense();
    const Index n = d->dimension();
    DenseTensor t(n);
    const Index total = n * n * n;
    for (Index q = 0; q < total; ++q) t.data()[q] = s_ * d->data()[q];
    return std::make_shared<const DenseTensor>(std::move(t));
  }

 private:
  double s_;
  std::shared_ptr<const BilinearBackend> inner_;
};

} // namespace

double BilinearBackend::min_coefficient() const {
  const Index n = dimension();
  Vector ei = Vector::Zero(n), ej = Vector::Zero(n);
  double m = 0.0;
  for (Index i = 0; i < n; ++i) {
    ei[i] = 1.0;
    for (Index j = 0; j < n; ++j) {
      ej[j] = 1.0;
      m = std::min(m, apply(ei, ej).minCoeff());
      ej[j] = 0.0;
    }
    ei[i] = 0.0;
  }
  return m;
}

std::shared_ptr<const DenseTensor> BilinearBackend::dense() const {
  const Index n = dimension();
  DenseTensor t(n);
  Vector ei = Vector::Zero(n), ej = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    ei[i] = 1.0;
    for (Index j = 0; j < n; ++j) {
      ej[j] = 1.0;
      const Vector col = apply(ei, ej);
      for (Index k = 0; k < n; ++k) t(k, i, j) = col[k];
      ej[j] = 0.0;
    }
    ei[i] = 0.0;
  }
  return std::make_shared<const DenseTensor>(std::move(t));
}

BilinearMap::BilinearMap(std::shared_ptr<const BilinearBackend> impl) : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("bilinear map: null backend");
}

BilinearMap BilinearMap::zero(Index n) {
  return BilinearMap(std::make_shared<DenseBackend>(DenseTensor(n)));
}

BilinearMap BilinearMap::from_tensor(DenseTensor t) {
  return BilinearMap(std::make_shared<DenseBackend>(std::move(t)));
}

Vector BilinearMap::apply(const Vector& x, const Vector& y) const {
  check_dims(*impl_, x, "apply");
  check_dims(*impl_, y, "apply");
  return impl_->apply(x, y);
}

Matrix BilinearMap::left_matrix(const Vector& x) const {
  check_dims(*impl_, x, "left_matrix");
  return impl_->left_matrix(x);
}

Matrix BilinearMap::right_matrix(const Vector& x) const {
  check_dims(*impl_, x, "right_matrix");
  return impl_->right_matrix(x);
}

Vector BilinearMap::left_diagonal(const Vector& x) const {
  check_dims(*impl_, x, "left_diagonal");
  return impl_->left_diagonal(x);
}

Vector BilinearMap::right_diagonal(const Vector& x) const {
  check_dims(*impl_, x, "right_diagonal");
  return impl_->right_diagonal(x);
}

BilinearMap BilinearMap::swapped() const {
  if (auto sw = std::dynamic_pointer_cast<const SwappedBackend>(impl_))
    return BilinearMap(sw->inner());
  return BilinearMap(std::make_shared<SwappedBackend>(impl_));
}

BilinearMap BilinearMap::scaled(double s) const {
  if (s < 0.0) throw std::invalid_argument("bilinear map: negative scale");
  return BilinearMap(std::make_shared<ScaledBackend>(s, impl_));
}

} // namespace qve
