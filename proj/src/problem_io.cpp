#include "qve/problem_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "qve/models.hpp"

namespace qve {

using nlohmann::json;

namespace {

// nlohmann reports byte offsets; the diagnostics want line/column.
std::pair<int, int> position_of(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void fail(const std::string& message) { throw ParseError(message, 0, 0); }

const json& member(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

double number_from(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

Vector vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Index>(i)) = number_from(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a nonempty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array()) fail(where + ": row " + std::to_string(r) + " is not an array");
    if (r == 0) {
      cols = row.size();
      if (cols == 0) fail(where + ": rows must be nonempty");
      m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (row.size() != cols) {
      fail(where + ": row " + std::to_string(r) + " has inconsistent length");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          number_from(row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

DenseTensor tensor_from(const json& j, const std::string& where, Index n) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    fail(where + ": expected " + std::to_string(n) + " output slices");
  DenseTensor t(n);
  for (Index k = 0; k < n; ++k) {
    const Matrix slice = matrix_from(j[static_cast<std::size_t>(k)],
                                     where + "[" + std::to_string(k) + "]");
    if (slice.rows() != n || slice.cols() != n)
      fail(where + "[" + std::to_string(k) + "]: slice must be " + std::to_string(n) + " x " +
           std::to_string(n));
    for (Index i = 0; i < n; ++i)
      for (Index jj = 0; jj < n; ++jj) t(k, i, jj) = slice(i, jj);
  }
  return t;
}

std::vector<Matrix> matrix_list_from(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of matrices");
  std::vector<Matrix> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(matrix_from(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const DenseTensor& t) {
  const Index n = t.dimension();
  json out = json::array();
  for (Index k = 0; k < n; ++k) {
    json slice = json::array();
    for (Index i = 0; i < n; ++i) {
      json row = json::array();
      for (Index j = 0; j < n; ++j) row.push_back(t(k, i, j));
      slice.push_back(std::move(row));
    }
    out.push_back(std::move(slice));
  }
  return out;
}

} // namespace

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ")"
                                  : message),
      line_(line),
      column_(column) {}

std::string ProblemFile::format_tag() const {
  struct Tag {
    std::string operator()(const GenericSpec&) const { return "generic"; }
    std::string operator()(const E1Spec&) const { return "e1"; }
    std::string operator()(const E2Spec&) const { return "e2"; }
    std::string operator()(const E3Spec&) const { return "e3"; }
    std::string operator()(const E4Spec&) const { return "e4"; }
    std::string operator()(const TreeLikeSpec&) const { return "treelike"; }
  };
  return std::visit(Tag{}, spec);
}

ProblemFile parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = position_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
  if (!j.is_object()) fail("top level must be a JSON object");

  const json& fmt = member(j, "format");
  if (!fmt.is_string()) fail("'format' must be a string");
  const std::string format = fmt.get<std::string>();

  ProblemFile out;
  if (format == "generic") {
    Matrix m = matrix_from(member(j, "M"), "M");
    Vector a = vector_from(member(j, "a"), "a");
    if (m.rows() != m.cols()) fail("M: must be square");
    if (a.size() != m.rows()) fail("a: length must match M");
    DenseTensor t = tensor_from(member(j, "B"), "B", m.rows());
    out.spec = GenericSpec{std::move(m), std::move(a), std::move(t)};
  } else if (format == "e1") {
    Vector a = vector_from(member(j, "a"), "a");
    DenseTensor t = tensor_from(member(j, "B"), "B", a.size());
    out.spec = E1Spec{std::move(a), std::move(t)};
  } else if (format == "e2") {
    out.spec = E2Spec{matrix_from(member(j, "P"), "P"), matrix_from(member(j, "Pt"), "Pt")};
  } else if (format == "e3") {
    out.spec = E3Spec{matrix_from(member(j, "A"), "A"), matrix_from(member(j, "B"), "B"),
                      matrix_from(member(j, "C"), "C"), matrix_from(member(j, "D"), "D")};
  } else if (format == "e4") {
    out.spec = E4Spec{matrix_from(member(j, "A"), "A"), matrix_from(member(j, "B"), "B"),
                      matrix_from(member(j, "C"), "C")};
  } else if (format == "treelike") {
    out.spec = TreeLikeSpec{matrix_from(member(j, "B"), "B"),
                            matrix_list_from(member(j, "A"), "A"),
                            matrix_list_from(member(j, "D"), "D")};
  } else {
    fail("unknown format '" + format + "'");
  }

  if (auto it = j.find("expected"); it != j.end()) {
    if (!it->is_object()) fail("'expected' must be an object");
    ExpectedBlock e;
    e.x = vector_from(member(*it, "x"), "expected.x");
    e.residual_bound = number_from(member(*it, "residual_bound"), "expected.residual_bound");
    out.expected = std::move(e);
  }
  return out;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str());
}

std::string serialize_problem(const ProblemFile& file) {
  json j;
  j["format"] = file.format_tag();
  struct Fill {
    json& j;
    void operator()(const GenericSpec& s) const {
      j["M"] = to_json(s.M);
      j["a"] = to_json(s.a);
      j["B"] = to_json(s.B);
    }
    void operator()(const E1Spec& s) const {
      j["a"] = to_json(s.a);
      j["B"] = to_json(s.B);
    }
    void operator()(const E2Spec& s) const {
      j["P"] = to_json(s.P);
      j["Pt"] = to_json(s.Pt);
    }
    void operator()(const E3Spec& s) const {
      j["A"] = to_json(s.A);
      j["B"] = to_json(s.B);
      j["C"] = to_json(s.C);
      j["D"] = to_json(s.D);
    }
    void operator()(const E4Spec& s) const {
      j["A"] = to_json(s.A);
      j["B"] = to_json(s.B);
      j["C"] = to_json(s.C);
    }
    void operator()(const TreeLikeSpec& s) const {
      j["B"] = to_json(s.B);
      json a = json::array(), d = json::array();
      for (const Matrix& m : s.A) a.push_back(to_json(m));
      for (const Matrix& m : s.D) d.push_back(to_json(m));
      j["A"] = std::move(a);
      j["D"] = std::move(d);
    }
  };
  std::visit(Fill{j}, file.spec);
  if (file.expected) {
    j["expected"] = {{"x", to_json(file.expected->x)},
                     {"residual_bound", file.expected->residual_bound}};
  }
  return j.dump(2) + "\n";
}

void save_problem_file(const ProblemFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << serialize_problem(file);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

LoadedProblem instantiate_problem(const ProblemFile& file) {
  const std::string format = file.format_tag();
  struct Build {
    LoadedProblem operator()(const GenericSpec& s) const {
      return LoadedProblem{"generic", QveProblem(s.M, s.a, BilinearMap::from_tensor(s.B)),
                           std::nullopt, std::nullopt, {}};
    }
    LoadedProblem operator()(const E1Spec& s) const {
      return LoadedProblem{"e1", make_e1(s.a, BilinearMap::from_tensor(s.B)), std::nullopt,
                           std::nullopt, {}};
    }
    LoadedProblem operator()(const E2Spec& s) const {
      return LoadedProblem{"e2", make_e2(s.P, s.Pt).qve, std::nullopt, std::nullopt, {}};
    }
    LoadedProblem operator()(const E3Spec& s) const {
      E3Problem e3 = make_e3(s.A, s.B, s.C, s.D);
      LoadedProblem out{"e3", std::move(e3.qve), std::nullopt, std::nullopt, {}};
      if (e3.singular_irreducible)
        out.warnings.push_back(
            "e3: block matrix is singular and irreducible; the instance may sit at the "
            "critical boundary");
      return out;
    }
    LoadedProblem operator()(const E4Spec& s) const {
      E4Problem e4 = make_e4(s.A, s.B, s.C);
      return LoadedProblem{"e4", std::move(e4.qve), std::move(e4.unilateral), std::nullopt, {}};
    }
    LoadedProblem operator()(const TreeLikeSpec& s) const {
      return LoadedProblem{"treelike", make_treelike(s.B, s.A, s.D).qve, std::nullopt,
                           std::nullopt, {}};
    }
  };
  LoadedProblem out = std::visit(Build{}, file.spec);
  out.expected = file.expected;
  if (out.expected && out.expected->x.size() != out.qve.dimension())
    throw std::invalid_argument("expected.x: length does not match the problem dimension");
  return out;
}

} // namespace qve
