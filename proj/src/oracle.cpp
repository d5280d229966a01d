#include "qve/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qve {

namespace {

/* ---------- extended-precision helpers (long double + compensation) ------ */

using LVector = std::vector<long double>;

struct Kahan {
  long double sum = 0.0L, carry = 0.0L;
  void add(long double v) {
    const long double y = v - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Dense LU with partial pivoting on long double.
class LongLU {
 public:
  explicit LongLU(const Matrix& M) : n_(M.rows()), lu_(static_cast<size_t>(n_ * n_)), perm_(n_) {
    for (Index i = 0; i < n_; ++i)
      for (Index j = 0; j < n_; ++j) at(i, j) = static_cast<long double>(M(i, j));
    for (Index i = 0; i < n_; ++i) perm_[static_cast<size_t>(i)] = i;

    for (Index c = 0; c < n_; ++c) {
      Index piv = c;
      long double best = std::abs(at(c, c));
      for (Index r = c + 1; r < n_; ++r)
        if (std::abs(at(r, c)) > best) {
          best = std::abs(at(r, c));
          piv = r;
        }
      if (best == 0.0L) throw std::runtime_error("oracle: singular matrix in LU");
      if (piv != c) {
        for (Index j = 0; j < n_; ++j) std::swap(at(c, j), at(piv, j));
        std::swap(perm_[static_cast<size_t>(c)], perm_[static_cast<size_t>(piv)]);
      }
      for (Index r = c + 1; r < n_; ++r) {
        at(r, c) /= at(c, c);
        const long double f = at(r, c);
        for (Index j = c + 1; j < n_; ++j) at(r, j) -= f * at(c, j);
      }
    }
  }

  LVector solve(const LVector& rhs) const {
    LVector x(static_cast<size_t>(n_));
    for (Index i = 0; i < n_; ++i) x[static_cast<size_t>(i)] = rhs[static_cast<size_t>(perm_[static_cast<size_t>(i)])];
    for (Index i = 0; i < n_; ++i) {
      Kahan acc;
      acc.add(x[static_cast<size_t>(i)]);
      for (Index j = 0; j < i; ++j) acc.add(-at(i, j) * x[static_cast<size_t>(j)]);
      x[static_cast<size_t>(i)] = acc.sum;
    }
    for (Index i = n_ - 1; i >= 0; --i) {
      Kahan acc;
      acc.add(x[static_cast<size_t>(i)]);
      for (Index j = i + 1; j < n_; ++j) acc.add(-at(i, j) * x[static_cast<size_t>(j)]);
      x[static_cast<size_t>(i)] = acc.sum / at(i, i);
    }
    return x;
  }

 private:
  long double& at(Index i, Index j) { return lu_[static_cast<size_t>(i * n_ + j)]; }
  const long double& at(Index i, Index j) const { return lu_[static_cast<size_t>(i * n_ + j)]; }

  Index n_;
  std::vector<long double> lu_;
  std::vector<Index> perm_;
};

struct LongProblem {
  Index n;
  std::vector<long double> M;  // row-major
  LVector a;
  std::vector<long double> B;  // k-major tensor

  long double tensor(Index k, Index i, Index j) const {
    return B[static_cast<size_t>((k * n + i) * n + j)];
  }

  // b(x, x) with compensated accumulation.
  LVector quad(const LVector& x) const {
    LVector r(static_cast<size_t>(n));
    for (Index k = 0; k < n; ++k) {
      Kahan acc;
      for (Index i = 0; i < n; ++i) {
        const long double xi = x[static_cast<size_t>(i)];
        if (xi == 0.0L) continue;
        for (Index j = 0; j < n; ++j) {
          const long double c = tensor(k, i, j);
          if (c != 0.0L) acc.add(c * xi * x[static_cast<size_t>(j)]);
        }
      }
      r[static_cast<size_t>(k)] = acc.sum;
    }
    return r;
  }

  // || M x - rhs ||_inf where rhs = a + b(x, x) was already accumulated.
  long double residual_norm(const LVector& x, const LVector& rhs) const {
    long double worst = 0.0L;
    for (Index i = 0; i < n; ++i) {
      Kahan acc;
      for (Index j = 0; j < n; ++j)
        acc.add(M[static_cast<size_t>(i * n + j)] * x[static_cast<size_t>(j)]);
      acc.add(-rhs[static_cast<size_t>(i)]);
      worst = std::max(worst, std::abs(acc.sum));
    }
    return worst;
  }
};

LongProblem to_long(const QveProblem& p) {
  const Index n = p.dimension();
  LongProblem lp;
  lp.n = n;
  lp.M.resize(static_cast<size_t>(n * n));
  lp.a.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    lp.a[static_cast<size_t>(i)] = static_cast<long double>(p.a()[i]);
    for (Index j = 0; j < n; ++j)
      lp.M[static_cast<size_t>(i * n + j)] = static_cast<long double>(p.M()(i, j));
  }
  auto t = p.b().dense();
  lp.B.resize(static_cast<size_t>(n * n * n));
  for (Index q = 0; q < n * n * n; ++q) lp.B[static_cast<size_t>(q)] = static_cast<long double>(t->data()[q]);
  return lp;
}

OracleSolution scalar_oracle(const QveProblem& p) {
  OracleSolution sol;
  sol.method = OracleMethod::ScalarClosedForm;
  const double M = p.M()(0, 0), a = p.a()[0], B = p.b().dense()->operator()(0, 0, 0);
  const auto root = scalar_roots(M, a, B);
  if (!root) {
    sol.status = OracleStatus::NoSolution;
    sol.note = "negative discriminant: no real root (A1 presumed violated)";
    return sol;
  }
  sol.status = OracleStatus::Ok;
  sol.x = Vector::Constant(1, *root);
  const long double x = static_cast<long double>(*root);
  sol.residual_bound = static_cast<double>(
      std::abs(static_cast<long double>(M) * x - static_cast<long double>(a) -
               static_cast<long double>(B) * x * x));
  return sol;
}

} // namespace

OracleSolution oracle_minimal(const QveProblem& p, const OracleOptions& opts) {
  if (p.dimension() == 1) return scalar_oracle(p);

  const LongProblem lp = to_long(p);
  const LongLU lu(p.M());
  const Index n = lp.n;

  const long double target =
      opts.target_residual > 0.0
          ? static_cast<long double>(opts.target_residual)
          : 1e-13L * (1.0L + static_cast<long double>(p.a().cwiseAbs().maxCoeff()));

  OracleSolution sol;
  sol.method = OracleMethod::Fp1HighPrec;

  LVector x(static_cast<size_t>(n), 0.0L);
  for (long it = 0;; ++it) {
    LVector rhs = lp.quad(x);
    for (Index i = 0; i < n; ++i) rhs[static_cast<size_t>(i)] += lp.a[static_cast<size_t>(i)];

    if (lp.residual_norm(x, rhs) <= target) {
      sol.status = OracleStatus::Ok;
      sol.iterations = it;
      sol.x = Vector(n);
      for (Index i = 0; i < n; ++i) sol.x[i] = static_cast<double>(x[static_cast<size_t>(i)]);
      sol.residual_bound = static_cast<double>(lp.residual_norm(x, rhs) * 1.0000000001L);
      return sol;
    }
    if (it >= opts.maxit) {
      sol.status = OracleStatus::Stalled;
      sol.iterations = it;
      sol.x = Vector(n);
      for (Index i = 0; i < n; ++i) sol.x[i] = static_cast<double>(x[static_cast<size_t>(i)]);
      sol.residual_bound = static_cast<double>(lp.residual_norm(x, rhs));
      sol.note = "iteration budget exhausted before reaching target residual";
      return sol;
    }

    x = lu.solve(rhs);
    long double norm = 0.0L;
    for (Index i = 0; i < n; ++i) norm = std::max(norm, std::abs(x[static_cast<size_t>(i)]));
    if (norm > static_cast<long double>(opts.divergence_guard)) {
      sol.status = OracleStatus::NoSolution;
      sol.iterations = it + 1;
      sol.note = "iterates escaped the divergence guard: no solution certified "
                 "(A1 presumed violated)";
      return sol;
    }
  }
}

std::optional<double> scalar_roots(double M, double a, double B) {
  if (M <= 0.0) throw std::invalid_argument("scalar_roots: M must be positive");
  if (a < 0.0 || B < 0.0) throw std::invalid_argument("scalar_roots: a, B must be nonnegative");
  if (B == 0.0) return a / M;
  const double disc = M * M - 4.0 * a * B;
  if (disc < 0.0) return std::nullopt;
  return 2.0 * a / (M + std::sqrt(disc));
}

std::vector<Index> brute_support(const QveProblem& p, int max_steps) {
  const Index n = p.dimension();

  // Numeric M^{-1} pattern: explicit long-double inverse, relative threshold.
  const LongLU lu(p.M());
  std::vector<std::vector<char>> minv_pat(static_cast<size_t>(n),
                                          std::vector<char>(static_cast<size_t>(n), 0));
  {
    std::vector<std::vector<long double>> cols(static_cast<size_t>(n));
    long double maxabs = 0.0L;
    for (Index j = 0; j < n; ++j) {
      LVector e(static_cast<size_t>(n), 0.0L);
      e[static_cast<size_t>(j)] = 1.0L;
      cols[static_cast<size_t>(j)] = lu.solve(e);
      for (Index i = 0; i < n; ++i)
        maxabs = std::max(maxabs, std::abs(cols[static_cast<size_t>(j)][static_cast<size_t>(i)]));
    }
    const long double thresh = 1e-13L * maxabs;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        if (std::abs(cols[static_cast<size_t>(j)][static_cast<size_t>(i)]) > thresh)
          minv_pat[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
  }

  auto tensor = p.b().dense();

  // seed = pattern(M^{-1} a)
  std::vector<char> in(static_cast<size_t>(n), 0);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n && !in[static_cast<size_t>(k)]; ++j)
      if (minv_pat[static_cast<size_t>(k)][static_cast<size_t>(j)] && p.a()[j] > 0.0)
        in[static_cast<size_t>(k)] = 1;

  const int limit = max_steps < 0 ? static_cast<int>(n) + 1 : max_steps;
  for (int step = 0; step < limit; ++step) {
    // v = pattern(b(e_S, e_S)), then grow S by pattern(M^{-1} v).
    std::vector<char> v(static_cast<size_t>(n), 0);
    for (Index k = 0; k < n; ++k)
      for (Index i = 0; i < n && !v[static_cast<size_t>(k)]; ++i) {
        if (!in[static_cast<size_t>(i)]) continue;
        for (Index j = 0; j < n; ++j)
          if (in[static_cast<size_t>(j)] && (*tensor)(k, i, j) > 0.0) {
            v[static_cast<size_t>(k)] = 1;
            break;
          }
      }
    bool grew = false;
    for (Index k = 0; k < n; ++k) {
      if (in[static_cast<size_t>(k)]) continue;
      for (Index l = 0; l < n; ++l)
        if (minv_pat[static_cast<size_t>(k)][static_cast<size_t>(l)] && v[static_cast<size_t>(l)]) {
          in[static_cast<size_t>(k)] = 1;
          grew = true;
          break;
        }
    }
    if (!grew) break;
  }

  std::vector<Index> support;
  for (Index i = 0; i < n; ++i)
    if (in[static_cast<size_t>(i)]) support.push_back(i);
  return support;
}

} // namespace qve
