#include "qve/problem.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace qve {

QveProblem::QveProblem(Matrix M, Vector a, BilinearMap b, double class_tol)
    : handle_(MMatrixHandle::analyze(std::move(M), class_tol)),
      a_(std::move(a)),
      b_(std::move(b)) {
  const Index n = handle_.matrix().rows();
  if (a_.size() != n || b_.dimension() != n) {
    std::ostringstream os;
    os << "QveProblem: dimension mismatch (M " << n << "x" << n << ", a " << a_.size()
       << ", b " << b_.dimension() << ")";
    throw std::invalid_argument(os.str());
  }
  for (Index i = 0; i < n; ++i)
    if (a_[i] < 0.0) {
      std::ostringstream os;
      os << "QveProblem: a[" << i << "] = " << a_[i] << " is negative";
      throw std::invalid_argument(os.str());
    }
  if (b_.min_coefficient() < 0.0)
    throw std::invalid_argument("QveProblem: bilinear map has a negative coefficient");
  if (handle_.classification() != MatrixClass::NonsingularM) {
    std::ostringstream os;
    os << "QveProblem: M classified " << to_string(handle_.classification())
       << ", nonsingular M-matrix required";
    throw std::invalid_argument(os.str());
  }
}

Vector residual(const QveProblem& p, const Vector& x) {
  return p.M() * x - p.a() - p.b().apply(x, x);
}

Matrix derivative(const QveProblem& p, const Vector& x) {
  return p.M() - p.b().left_matrix(x) - p.b().right_matrix(x);
}

double taylor_check(const QveProblem& p, const Vector& x, const Vector& y) {
  const Vector d = y - x;
  const Vector fx = residual(p, x);
  const Vector fy = residual(p, y);
  const Vector lin = derivative(p, x) * d;
  const Vector quad = p.b().apply(d, d);
  const double defect = (fy - fx - lin + quad).cwiseAbs().maxCoeff();
  const double scale = 1.0 + fx.cwiseAbs().maxCoeff() + fy.cwiseAbs().maxCoeff() +
                       lin.cwiseAbs().maxCoeff() + quad.cwiseAbs().maxCoeff();
  return defect / scale;
}

bool check_supersolution(const QveProblem& p, const Vector& y, double tol) {
  if (y.size() != p.dimension()) return false;
  const double sign_slack = 1e-13 * (1.0 + y.cwiseAbs().maxCoeff());
  if (y.minCoeff() < -sign_slack) return false;
  const double res_slack = tol * (1.0 + p.a().cwiseAbs().maxCoeff());
  return residual(p, y).minCoeff() >= -res_slack;
}

std::optional<SupersolutionCertificate> certify_supersolution(const QveProblem& p,
                                                              const Vector& y, double tol) {
  if (!check_supersolution(p, y, tol)) return std::nullopt;
  return SupersolutionCertificate{y, tol};
}

} // namespace qve
