#include "qve/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qve/generate.hpp"
#include "qve/iterations.hpp"
#include "qve/newton.hpp"
#include "qve/positivity.hpp"
#include "qve/problem_io.hpp"
#include "qve/unilateral.hpp"

namespace qve {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBreakdown = 2;
constexpr int kExitMaxit = 3;

// Shortest round-tripping decimal form; keeps reports byte-stable.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::MaxIterations: return kExitMaxit;
    case SolveStatus::BreakdownSingular:
    case SolveStatus::BreakdownNotM: return kExitBreakdown;
  }
  return kExitUsage;
}

// Runs `body` with the chosen output stream ("-" = stdout).
int with_output(const std::string& out, const std::function<int(std::ostream&)>& body) {
  if (out == "-") return body(std::cout);
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open '" << out << "' for writing\n";
    return kExitUsage;
  }
  return body(f);
}

Splitting named_splitting(const QveProblem& p, const std::string& id) {
  if (id == "depth") return splitting_depth(p);
  if (id == "order") return splitting_order(p);
  if (id == "order-swap") return splitting_order_swapped(p);
  if (id == "jacobi") return splitting_jacobi(p);
  if (id == "half") return splitting_half(p);
  throw CLI::ValidationError("--splitting",
                             "unknown splitting '" + id +
                                 "' (expected depth|order|order-swap|jacobi|half)");
}

using VectorSolver = std::function<SolveReport(const QveProblem&, const SolveOptions&)>;

bool is_matrix_solver(const std::string& id) { return id == "lr" || id == "cr"; }

VectorSolver vector_solver(const std::string& id, const std::string& splitting_id) {
  if (id == "fp1") return [](const QveProblem& p, const SolveOptions& o) { return fixed_point(p, o); };
  if (id == "funit")
    return [splitting_id](const QveProblem& p, const SolveOptions& o) {
      return functional_iteration(p, named_splitting(p, splitting_id), o);
    };
  if (id == "gs")
    return [splitting_id](const QveProblem& p, const SolveOptions& o) {
      return gauss_seidel_iteration(p, named_splitting(p, splitting_id), o);
    };
  if (id == "newton") return [](const QveProblem& p, const SolveOptions& o) { return newton(p, o); };
  if (id == "newton-cr")
    return [](const QveProblem& p, const SolveOptions& o) { return newton_cr_form(p, o); };
  if (id == "mnewton")
    return [](const QveProblem& p, const SolveOptions& o) { return modified_newton(p, o); };
  if (id == "mnewton-cr")
    return [](const QveProblem& p, const SolveOptions& o) { return modified_newton_cr_form(p, o); };
  throw CLI::ValidationError(
      "--solver", "unknown solver '" + id +
                      "' (expected fp1|funit|gs|newton|newton-cr|mnewton|mnewton-cr|lr|cr)");
}

struct CommonRunArgs {
  std::string file;
  std::string solver = "newton";
  std::string splitting = "order";
  double tol = 1e-12;
  int maxit = 10000;
  bool reduce = false;
  std::string out = "-";
};

void print_warnings(std::ostream& os, std::vector<std::string> ws,
                    const std::vector<std::string>& more = {}) {
  ws.insert(ws.end(), more.begin(), more.end());
  if (ws.empty()) {
    os << "# warnings: none\n";
  } else {
    for (const std::string& w : ws) os << "# warning: " << w << "\n";
  }
}

int do_run(const CommonRunArgs& args) {
  LoadedProblem lp = instantiate_problem(load_problem_file(args.file));

  SolveOptions opts;
  opts.tol = args.tol;
  opts.maxit = args.maxit;
  opts.record_history = true;

  if (is_matrix_solver(args.solver)) {
    if (!lp.unilateral) {
      std::cerr << "error: solver '" << args.solver
                << "' needs the matrix form; only e4 files provide one (got format '"
                << lp.format << "')\n";
      return kExitUsage;
    }
    if (args.reduce) {
      std::cerr << "error: --reduce applies to the vectorized solvers only\n";
      return kExitUsage;
    }
    const MatrixSolveReport rep =
        args.solver == "lr" ? solve_lr(*lp.unilateral, opts) : solve_cr(*lp.unilateral, opts);
    return with_output(args.out, [&](std::ostream& os) {
      os << "# qve-bench run\n";
      os << "# file: " << args.file << "\n";
      os << "# format: " << lp.format << "\n";
      os << "# solver: " << args.solver << "\n";
      os << "# tol: " << fmt(opts.tol) << "\n";
      os << "# maxit: " << opts.maxit << "\n";
      os << "# status: " << to_string(rep.status) << "\n";
      os << "# iterations: " << rep.iterations << "\n";
      if (!rep.note.empty()) os << "# note: " << rep.note << "\n";
      print_warnings(os, lp.warnings, rep.warnings);
      os << "iter\tresidual\tcorrection\n";
      for (std::size_t k = 0; k < rep.residual_norms.size(); ++k) {
        os << k << "\t" << fmt(rep.residual_norms[k]) << "\t";
        os << (k < rep.correction_norms.size() ? fmt(rep.correction_norms[k]) : "-");
        os << "\n";
      }
      os << "# final_residual: "
         << (rep.residual_norms.empty() ? "-" : fmt(rep.residual_norms.back())) << "\n";
      return exit_code_for(rep.status);
    });
  }

  const VectorSolver solver = vector_solver(args.solver, args.splitting);
  const SolveReport rep = args.reduce ? solve_with_reduction(lp.qve, solver, opts)
                                      : solver(lp.qve, opts);
  return with_output(args.out, [&](std::ostream& os) {
    os << "# qve-bench run\n";
    os << "# file: " << args.file << "\n";
    os << "# format: " << lp.format << "\n";
    os << "# solver: " << args.solver << "\n";
    if (args.solver == "funit" || args.solver == "gs")
      os << "# splitting: " << args.splitting << "\n";
    os << "# tol: " << fmt(opts.tol) << "\n";
    os << "# maxit: " << opts.maxit << "\n";
    os << "# reduce: " << (args.reduce ? "on" : "off") << "\n";
    os << "# status: " << to_string(rep.status) << "\n";
    os << "# iterations: " << rep.iterations << "\n";
    if (rep.diverged) os << "# diverged: yes\n";
    if (!rep.note.empty()) os << "# note: " << rep.note << "\n";
    if (!rep.eliminated_indices.empty()) {
      os << "# eliminated:";
      for (Index i : rep.eliminated_indices) os << " " << i;
      os << "\n";
    }
    print_warnings(os, lp.warnings, rep.warnings);
    if (lp.expected && rep.x.size() == lp.expected->x.size()) {
      const double dev = (rep.x - lp.expected->x).cwiseAbs().maxCoeff();
      os << "# deviation_from_expected: " << fmt(dev) << "\n";
    }
    os << "iter\tresidual\telapsed_s\n";
    for (std::size_t k = 0; k < rep.residual_norms.size(); ++k) {
      os << k << "\t" << fmt(rep.residual_norms[k]) << "\t";
      os << (k < rep.elapsed_seconds.size() ? fmt_fixed6(rep.elapsed_seconds[k]) : "-");
      os << "\n";
    }
    os << "# final_residual: "
       << (rep.residual_norms.empty() ? "-" : fmt(rep.residual_norms.back())) << "\n";
    return exit_code_for(rep.status);
  });
}

struct CompareArgs {
  std::string file;
  std::vector<std::string> solvers{"fp1", "newton"};
  std::string splitting = "order";
  double tol = 1e-12;
  int maxit = 10000;
  std::string out = "-";
};

int do_compare(const CompareArgs& args) {
  LoadedProblem lp = instantiate_problem(load_problem_file(args.file));

  SolveOptions opts;
  opts.tol = args.tol;
  opts.maxit = args.maxit;
  opts.record_history = true;

  std::vector<SolveReport> reports;
  for (const std::string& id : args.solvers) {
    if (is_matrix_solver(id)) {
      std::cerr << "error: compare works on the vectorized solvers only (got '" << id << "')\n";
      return kExitUsage;
    }
    reports.push_back(vector_solver(id, args.splitting)(lp.qve, opts));
  }

  // Iterate-wise orderings with a guarantee behind them, annotated when both
  // sides were run.  The pairs that involve a splitting only hold for the
  // splittings listed: a fully implicit quadratic term dominates the basic
  // fixed point, and the entrywise sweep refines the plain step only when the
  // step matrix is diagonal.
  struct OrderedPair {
    const char* lo;
    const char* hi;
    std::vector<std::string> splittings;  // empty: holds for any splitting
  };
  const std::vector<OrderedPair> known_pairs = {
      {"fp1", "funit", {"order", "order-swap"}},
      {"funit", "gs", {"jacobi"}},
      {"newton", "mnewton", {}},
      {"fp1", "newton", {}},
  };

  return with_output(args.out, [&](std::ostream& os) {
    os << "# qve-bench compare\n";
    os << "# file: " << args.file << "\n";
    os << "# format: " << lp.format << "\n";
    os << "# tol: " << fmt(opts.tol) << "\n";
    os << "# maxit: " << opts.maxit << "\n";
    print_warnings(os, lp.warnings);
    std::size_t rows = 0;
    for (std::size_t s = 0; s < reports.size(); ++s) {
      const SolveReport& r = reports[s];
      os << "# solver " << args.solvers[s] << ": status=" << to_string(r.status)
         << " iterations=" << r.iterations << " final_residual="
         << (r.residual_norms.empty() ? "-" : fmt(r.residual_norms.back())) << "\n";
      rows = std::max(rows, r.residual_norms.size());
    }
    for (const auto& [lo, hi, splittings] : known_pairs) {
      if (!splittings.empty() &&
          std::find(splittings.begin(), splittings.end(), args.splitting) == splittings.end())
        continue;
      auto lo_it = std::find(args.solvers.begin(), args.solvers.end(), lo);
      auto hi_it = std::find(args.solvers.begin(), args.solvers.end(), hi);
      if (lo_it == args.solvers.end() || hi_it == args.solvers.end()) continue;
      const SolveReport& rlo = reports[static_cast<std::size_t>(lo_it - args.solvers.begin())];
      const SolveReport& rhi = reports[static_cast<std::size_t>(hi_it - args.solvers.begin())];
      const std::size_t common = std::min(rlo.iterates.size(), rhi.iterates.size());
      double violation = 0.0;
      for (std::size_t k = 0; k < common; ++k)
        violation = std::max(violation, (rlo.iterates[k] - rhi.iterates[k]).maxCoeff());
      os << "# dominance " << hi << " >= " << lo << ": "
         << (violation <= 1e-12 ? "pass" : "fail") << " (max violation " << fmt(violation)
         << ")\n";
    }
    os << "iter";
    for (const std::string& id : args.solvers) os << "\tresidual[" << id << "]";
    os << "\n";
    for (std::size_t k = 0; k < rows; ++k) {
      os << k;
      for (const SolveReport& r : reports)
        os << "\t" << (k < r.residual_norms.size() ? fmt(r.residual_norms[k]) : "-");
      os << "\n";
    }
    bool any_breakdown = false, any_maxit = false;
    for (const SolveReport& r : reports) {
      if (r.status == SolveStatus::BreakdownSingular || r.status == SolveStatus::BreakdownNotM)
        any_breakdown = true;
      if (r.status == SolveStatus::MaxIterations) any_maxit = true;
    }
    return any_breakdown ? kExitBreakdown : (any_maxit ? kExitMaxit : kExitOk);
  });
}

struct GenArgs {
  std::string tag = "generic";
  Index size = 4;
  std::uint64_t seed = 0;
  double scale = 0.5;
  std::string out = "-";
};

int do_gen(const GenArgs& args) {
  GenSpec spec;
  spec.tag = args.tag;
  spec.size = args.size;
  spec.seed = args.seed;
  spec.scale = args.scale;
  const ProblemFile file = generate_problem(spec);
  return with_output(args.out, [&](std::ostream& os) {
    os << serialize_problem(file);
    return kExitOk;
  });
}

int do_pattern(const std::string& path, const std::string& out) {
  LoadedProblem lp = instantiate_problem(load_problem_file(path));
  const PositivityPattern pat = positivity_pattern(lp.qve);
  return with_output(out, [&](std::ostream& os) {
    os << "# qve-bench pattern\n";
    os << "# file: " << path << "\n";
    os << "# format: " << lp.format << "\n";
    os << "# dimension: " << lp.qve.dimension() << "\n";
    os << "# indices are 0-based\n";
    os << "# pattern_products: " << pat.pattern_products << "\n";
    print_warnings(os, lp.warnings);
    os << "support:";
    for (Index i : pat.support) os << " " << i;
    os << "\n";
    os << "eliminated:";
    for (Index i = 0, k = 0; i < lp.qve.dimension(); ++i) {
      if (k < static_cast<Index>(pat.support.size()) && pat.support[static_cast<std::size_t>(k)] == i) {
        ++k;
        continue;
      }
      os << " " << i;
    }
    os << "\n";
    for (const auto& [popped, inserted] : pat.trace) {
      os << "trace: pop " << popped << " ->";
      for (Index i : inserted) os << " " << i;
      os << "\n";
    }
    return kExitOk;
  });
}

int do_validate(const std::string& path) {
  LoadedProblem lp = instantiate_problem(load_problem_file(path));
  std::cout << "ok: format=" << lp.format << " n=" << lp.qve.dimension();
  if (lp.unilateral) std::cout << " (matrix form m=" << lp.unilateral->dimension() << ")";
  std::cout << "\n";
  for (const std::string& w : lp.warnings) std::cout << "warning: " << w << "\n";
  if (lp.expected)
    std::cout << "expected solution present (residual_bound="
              << fmt(lp.expected->residual_bound) << ")\n";
  return kExitOk;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Benchmark driver for quadratic vector equation solvers"};
  app.require_subcommand(1);

  CommonRunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Solve a problem file and print a report");
  run->add_option("file", run_args.file, "JSON problem file")->required();
  run->add_option("--solver", run_args.solver,
                  "fp1|funit|gs|newton|newton-cr|mnewton|mnewton-cr|lr|cr");
  run->add_option("--splitting", run_args.splitting,
                  "depth|order|order-swap|jacobi|half (funit/gs only)");
  run->add_option("--tol", run_args.tol, "residual stopping tolerance");
  run->add_option("--maxit", run_args.maxit, "iteration budget");
  run->add_flag("--reduce", run_args.reduce, "project onto the detected support first");
  run->add_option("--out", run_args.out, "report destination ('-' = stdout)");

  CompareArgs cmp_args;
  CLI::App* cmp = app.add_subcommand("compare", "Run several solvers side by side");
  cmp->add_option("file", cmp_args.file, "JSON problem file")->required();
  cmp->add_option("--solvers", cmp_args.solvers, "vector solver ids")->delimiter(',');
  cmp->add_option("--splitting", cmp_args.splitting, "splitting for funit/gs");
  cmp->add_option("--tol", cmp_args.tol, "residual stopping tolerance");
  cmp->add_option("--maxit", cmp_args.maxit, "iteration budget");
  cmp->add_option("--out", cmp_args.out, "report destination ('-' = stdout)");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a certified random instance");
  gen->add_option("--tag", gen_args.tag, "generic|e1|e2|e3|e4|treelike");
  gen->add_option("--size", gen_args.size, "dimension (n or block size m)");
  gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_option("--scale", gen_args.scale, "coupling strength in (0, 1]");
  gen->add_option("--out", gen_args.out, "file destination ('-' = stdout)");

  std::string pattern_file, pattern_out = "-";
  CLI::App* pat = app.add_subcommand("pattern", "Print the minimal solution's support");
  pat->add_option("file", pattern_file, "JSON problem file")->required();
  pat->add_option("--out", pattern_out, "report destination ('-' = stdout)");

  std::string validate_file;
  CLI::App* val = app.add_subcommand("validate", "Parse and validate a problem file");
  val->add_option("file", validate_file, "JSON problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return do_run(run_args);
    if (cmp->parsed()) return do_compare(cmp_args);
    if (gen->parsed()) return do_gen(gen_args);
    if (pat->parsed()) return do_pattern(pattern_file, pattern_out);
    if (val->parsed()) return do_validate(validate_file);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace qve
