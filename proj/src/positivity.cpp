#include "qve/positivity.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include "internal.hpp"

namespace qve {

namespace {

// Row r holds the positivity pattern of row r of M^{-1}: reachability in the
// directed graph with an edge u -> v for every nonzero off-diagonal M(u,v).
// Writing M = s I - P with P >= 0, M^{-1} = sum_k P^k / s^{k+1} is a sum of
// nonnegative terms, so an entry is positive exactly when some power of P
// hits it; the diagonal of P is always positive, which makes the closure
// reflexive.
std::vector<std::vector<char>> inverse_pattern(const Matrix& m) {
  const Index n = m.rows();
  std::vector<std::vector<Index>> out_edges(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && m(i, j) != 0.0) out_edges[static_cast<size_t>(i)].push_back(j);

  std::vector<std::vector<char>> pattern(static_cast<size_t>(n),
                                         std::vector<char>(static_cast<size_t>(n), 0));
  std::vector<Index> stack;
  for (Index r = 0; r < n; ++r) {
    std::vector<char>& row = pattern[static_cast<size_t>(r)];
    stack.assign(1, r);
    row[static_cast<size_t>(r)] = 1;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v : out_edges[static_cast<size_t>(u)])
        if (!row[static_cast<size_t>(v)]) {
          row[static_cast<size_t>(v)] = 1;
          stack.push_back(v);
        }
    }
  }
  return pattern;
}

} // namespace

PositivityPattern positivity_pattern(const QveProblem& p) {
  const Index n = p.dimension();
  PositivityPattern out;
  const std::vector<std::vector<char>> inv = inverse_pattern(p.M());
  const std::shared_ptr<const DenseTensor> tensor = p.b().dense();

  std::vector<char> in_s(static_cast<size_t>(n), 0);
  Index s_count = 0;
  std::deque<Index> queue;

  // Pattern mat-vec u = pattern(M^{-1}) * v in boolean arithmetic.
  std::vector<char> vpat(static_cast<size_t>(n), 0), upat(static_cast<size_t>(n), 0);
  auto apply_inverse_pattern = [&](const std::vector<char>& v, std::vector<char>& u) {
    ++out.pattern_products;
    for (Index i = 0; i < n; ++i) {
      char hit = 0;
      const std::vector<char>& row = inv[static_cast<size_t>(i)];
      for (Index j = 0; j < n && !hit; ++j) hit = static_cast<char>(row[static_cast<size_t>(j)] & v[static_cast<size_t>(j)]);
      u[static_cast<size_t>(i)] = hit;
    }
  };

  for (Index j = 0; j < n; ++j) vpat[static_cast<size_t>(j)] = p.a()(j) > 0.0 ? 1 : 0;
  apply_inverse_pattern(vpat, upat);
  for (Index i = 0; i < n; ++i)
    if (upat[static_cast<size_t>(i)]) {
      in_s[static_cast<size_t>(i)] = 1;
      ++s_count;
      queue.push_back(i);
    }

  while (!queue.empty() && s_count < n) {
    const Index t = queue.front();
    queue.pop_front();
    // v = pattern( b(e_S, e_t) + b(e_t, e_S) ): component l is positive iff
    // some s in S has a coefficient B(l, s, t) or B(l, t, s) > 0.
    for (Index l = 0; l < n; ++l) {
      char hit = 0;
      for (Index s = 0; s < n && !hit; ++s) {
        if (!in_s[static_cast<size_t>(s)]) continue;
        if ((*tensor)(l, s, t) > 0.0 || (*tensor)(l, t, s) > 0.0) hit = 1;
      }
      vpat[static_cast<size_t>(l)] = hit;
    }
    apply_inverse_pattern(vpat, upat);
    std::vector<Index> inserted;
    for (Index i = 0; i < n; ++i)
      if (upat[static_cast<size_t>(i)] && !in_s[static_cast<size_t>(i)]) {
        in_s[static_cast<size_t>(i)] = 1;
        ++s_count;
        queue.push_back(i);
        inserted.push_back(i);
      }
    out.trace.emplace_back(t, std::move(inserted));
  }

  for (Index i = 0; i < n; ++i)
    if (in_s[static_cast<size_t>(i)]) out.support.push_back(i);
  return out;
}

Vector ReducedProblem::embed(const Vector& x_reduced) const {
  if (x_reduced.size() != static_cast<Index>(support.size()))
    throw std::invalid_argument("embed: vector does not match the reduced dimension");
  Vector full = Vector::Zero(full_dimension);
  for (size_t k = 0; k < support.size(); ++k) full(support[k]) = x_reduced(static_cast<Index>(k));
  return full;
}

ReducedProblem reduce_problem(const QveProblem& p, const std::vector<Index>& support) {
  const Index n = p.dimension();
  const Index m = static_cast<Index>(support.size());
  for (size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= n)
      throw std::invalid_argument("reduce_problem: support index out of range");
    if (k > 0 && support[k] <= support[k - 1])
      throw std::invalid_argument("reduce_problem: support must be strictly increasing");
  }

  Matrix sub_m(m, m);
  Vector sub_a(m);
  for (Index r = 0; r < m; ++r) {
    sub_a(r) = p.a()(support[static_cast<size_t>(r)]);
    for (Index c = 0; c < m; ++c)
      sub_m(r, c) = p.M()(support[static_cast<size_t>(r)], support[static_cast<size_t>(c)]);
  }

  const std::shared_ptr<const DenseTensor> tensor = p.b().dense();
  DenseTensor sub_t(m);
  for (Index k = 0; k < m; ++k)
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j)
        sub_t(k, i, j) = (*tensor)(support[static_cast<size_t>(k)],
                                   support[static_cast<size_t>(i)],
                                   support[static_cast<size_t>(j)]);

  ReducedProblem out{QveProblem(std::move(sub_m), std::move(sub_a),
                                BilinearMap::from_tensor(std::move(sub_t))),
                     support, n};
  return out;
}

SolveReport solve_with_reduction(const QveProblem& p, const SolverFn& solver,
                                 const SolveOptions& opts) {
  const Index n = p.dimension();
  const PositivityPattern pattern = positivity_pattern(p);

  std::vector<char> in_support(static_cast<size_t>(n), 0);
  for (Index i : pattern.support) in_support[static_cast<size_t>(i)] = 1;
  std::vector<Index> eliminated;
  for (Index i = 0; i < n; ++i)
    if (!in_support[static_cast<size_t>(i)]) eliminated.push_back(i);

  if (pattern.support.empty()) {
    // a = 0 on the detected support means a = 0 outright; the minimal
    // solution is exactly zero.
    SolveReport rep;
    rep.x = Vector::Zero(n);
    rep.status = SolveStatus::Converged;
    rep.iterations = 0;
    rep.residual_norms.push_back(0.0);
    rep.eliminated_indices = std::move(eliminated);
    rep.note = "empty support; solution is identically zero";
    return rep;
  }

  const ReducedProblem reduced = reduce_problem(p, pattern.support);
  SolveReport rep = solver(reduced.problem, opts);
  rep.x = reduced.embed(rep.x);
  for (Vector& it : rep.iterates) it = reduced.embed(it);
  rep.eliminated_indices = std::move(eliminated);
  if (!rep.eliminated_indices.empty())
    rep.note = (rep.note.empty() ? std::string() : rep.note + "; ") + "reduced from dimension " +
               std::to_string(n) + " to " + std::to_string(pattern.support.size());
  return rep;
}

} // namespace qve
