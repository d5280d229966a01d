#pragma once
//
// Deterministic instance generation for benchmarks and tests.  Every
// generated file is certified before it is returned: a supersolution is
// exhibited (constructed for generic/e1/e2, obtained by solving and padding
// for e3/e4/treelike), so the minimal solution provably exists.  The solved
// reference solution is stored in the file's `expected` block.

#include <cstdint>
#include <string>

#include "qve/problem_io.hpp"

namespace qve {

struct GenSpec {
  std::string tag = "generic";  // generic | e1 | e2 | e3 | e4 | treelike
  Index size = 4;               // n for generic/e1, block size m otherwise
  std::uint64_t seed = 0;
  double scale = 0.5;  // coupling strength in (0, 1]; larger = closer to critical
};

// Same spec, same file, bit for bit.  Throws std::invalid_argument for bad
// specs and std::runtime_error when certification fails for this seed.
ProblemFile generate_problem(const GenSpec& spec);

} // namespace qve
