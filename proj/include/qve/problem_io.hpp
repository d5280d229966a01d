#pragma once
//
// JSON problem files.  One object per file; `format` selects the family and
// the remaining keys carry the coefficient blocks, all matrices as nested
// row-major arrays of numbers:
//
//   generic  : M (n x n), a (n), B (n x n x n nested as B[k][i][j])
//   e1       : a, B                      (identity leading matrix; normalized)
//   e2       : P, Pt                     (m x m each)
//   e3       : A (m1 x m1), B (m1 x m2), C (m2 x m1), D (m2 x m2)
//   e4       : A, B, C                   (m x m each)
//   treelike : B (m x m), A (list of m x m), D (list, same length)
//
// An optional `expected` object carries a reference solution:
//   { "x": [...], "residual_bound": r }
//
// Serialization is canonical: object keys are emitted in sorted order and
// numbers use the shortest representation that round-trips, so
// parse -> serialize is byte-identical on files produced by this writer.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qve/bilinear.hpp"
#include "qve/problem.hpp"
#include "qve/unilateral.hpp"

namespace qve {

struct GenericSpec {
  Matrix M;
  Vector a;
  DenseTensor B{0};
};

struct E1Spec {
  Vector a;
  DenseTensor B{0};
};

struct E2Spec {
  Matrix P, Pt;
};

struct E3Spec {
  Matrix A, B, C, D;
};

struct E4Spec {
  Matrix A, B, C;
};

struct TreeLikeSpec {
  Matrix B;
  std::vector<Matrix> A, D;
};

struct ExpectedBlock {
  Vector x;
  double residual_bound = 0.0;
};

struct ProblemFile {
  std::variant<GenericSpec, E1Spec, E2Spec, E3Spec, E4Spec, TreeLikeSpec> spec;
  std::optional<ExpectedBlock> expected;

  std::string format_tag() const;  // "generic", "e1", ...
};

// Parse failure with position information (1-based; 0 when the error is
// semantic rather than syntactic).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem_file(const std::string& path);  // ParseError / runtime_error

std::string serialize_problem(const ProblemFile& file);
void save_problem_file(const ProblemFile& file, const std::string& path);

// The solvable instance built from a file.  The vectorized problem is always
// present; e4 files additionally carry the matrix form for the doubling
// solvers.
struct LoadedProblem {
  std::string format;
  QveProblem qve;
  std::optional<UnilateralProblem> unilateral;
  std::optional<ExpectedBlock> expected;
  std::vector<std::string> warnings;  // non-fatal structural notes
};

// Validates and instantiates (std::invalid_argument on structural problems).
LoadedProblem instantiate_problem(const ProblemFile& file);

} // namespace qve
