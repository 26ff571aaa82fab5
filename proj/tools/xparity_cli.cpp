#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xparity/dimacs.hpp"
#include "xparity/generators.hpp"
#include "xparity/report.hpp"
#include "xparity/verify.hpp"

namespace fs = std::filesystem;
using namespace xparity;

namespace {

struct SolveArgs {
  std::string solver = "auto";
  std::string input;
  std::string telemetry;
  std::string report;
  std::string ledger = "record";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool oracle_check = false;
  bool explain = false;
  bool exit_parity = false;
  bool timing = false;
};

struct GenArgs {
  std::string family = "docc";
  std::string graph;
  Var n = 10;
  unsigned d = 2;
  unsigned min_len = 2;
  unsigned max_len = 3;
  std::optional<std::size_t> m;
  bool positive = false;
  std::optional<std::uint64_t> seed;
  std::string output;
};

struct BenchArgs {
  std::string corpus;
  std::string solver = "auto";
  std::string output;
  std::optional<std::uint64_t> seed;
  bool oracle_check = false;
  bool timing = false;
};

struct VerifyArgs {
  std::vector<int> only;
  double scale = 1.0;
  std::string graphs = XPARITY_GRAPH_CATALOGUE;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --seed wins, then XPARITY_SEED, then the library default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("XPARITY_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("XPARITY_SEED is not an unsigned integer: '") + env + "'");
  }
  return fallback;
}

Formula read_input(const std::string& path) {
  if (path == "-") return parse_dimacs(std::cin);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input '" + path + "'");
  return parse_dimacs(in);
}

/// Opens `path` for writing; "-" or empty means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

MeasureLedger::Mode parse_ledger_mode(const std::string& s) {
  if (s == "strict") return MeasureLedger::Mode::strict;
  if (s == "record") return MeasureLedger::Mode::record;
  throw UsageError("--ledger must be strict or record, not '" + s + "'");
}

int run_solve(const SolveArgs& a) {
  const Formula f = read_input(a.input);
  RunConfig cfg;
  cfg.solver = parse_solver(a.solver);
  cfg.options.seed = resolve_seed(a.seed, cfg.options.seed);
  cfg.options.jobs = std::max(1U, a.jobs);
  cfg.options.ledger_mode = parse_ledger_mode(a.ledger);
  cfg.instance = a.input == "-" ? "stdin" : fs::path(a.input).filename().string();
  cfg.timing = a.timing;
  cfg.oracle_check = a.oracle_check;

  std::unique_ptr<Output> telemetry;
  if (!a.telemetry.empty()) {
    telemetry = std::make_unique<Output>(a.telemetry);
    cfg.sink = [&telemetry](const NodeRecord& r) { telemetry->stream() << to_json(r).dump() << '\n'; };
  }
  if (a.explain) std::cout << explain_json(f, reduce(f, cfg.options.reduce)).dump(2) << '\n';

  const RunReport rep = run_solver(f, cfg);
  std::cout << "parity: " << rep.parity << '\n';
  std::cout << "path: " << rep.path << '\n';
  std::cout << "formula: n=" << rep.n << " m=" << rep.m << " L=" << rep.length << '\n';
  std::cout << "nodes: " << rep.stats.nodes << '\n';
  std::cout << "leaves: " << rep.stats.leaves << '\n';
  std::cout << "max depth: " << rep.stats.max_depth << '\n';
  std::cout << "reductions: " << rep.stats.reductions << '\n';
  std::cout << "ledger failures: " << rep.ledger_failures << '\n';
  if (rep.wall_ms) std::cout << "wall ms: " << *rep.wall_ms << '\n';
  if (rep.oracle) std::cout << "oracle: " << *rep.oracle << '\n';
  if (!a.report.empty()) {
    Output out(a.report);
    out.stream() << to_json(rep).dump() << '\n';
  }
  if (rep.ledger_failures > 0) {
    std::cerr << "warning: " << rep.ledger_failures << " branching node(s) missed a claimed measure bound\n";
  }
  if (rep.oracle && *rep.oracle == "disagree") {
    std::cerr << "error: solver and oracle disagree\n";
    return 1;
  }
  if (a.exit_parity) return rep.parity == 1 ? 10 : 20;
  return 0;
}

int run_gen(const GenArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed, 1);
  Formula f;
  if (a.family == "docc") {
    DoccParams p;
    p.n = a.n;
    p.d = a.d;
    p.min_len = a.min_len;
    p.max_len = a.max_len;
    p.m = a.m;
    p.seed = seed;
    p.positive = a.positive;
    f = gen_random_docc(p);
  } else if (a.family == "exact") {
    const std::size_t slots = static_cast<std::size_t>(a.n) * a.d;
    if (a.max_len == 0 || slots % a.max_len != 0) {
      throw UsageError("--family exact needs n*d divisible by --max-len");
    }
    f = gen_exact_occ(a.n, a.d, std::vector<unsigned>(slots / a.max_len, a.max_len), seed, a.positive);
  } else if (a.family == "edge-cover") {
    if (a.graph.empty()) throw UsageError("--family edge-cover needs --graph");
    f = gen_edge_cover_formula(parse_graph_spec(a.graph));
  } else if (a.family == "cubic") {
    if (!a.m) throw UsageError("--family cubic needs --m (the number of 3-clauses)");
    const auto g = gen_reduced_cubic(*a.m, seed);
    if (!g) throw UsageError("no reduced cubic formula found near seed " + std::to_string(seed));
    f = *g;
  } else {
    throw UsageError("unknown family '" + a.family + "' (docc, exact, edge-cover, cubic)");
  }
  Output out(a.output);
  out.stream() << write_dimacs(f);
  return 0;
}

int run_bench(const BenchArgs& a) {
  if (!fs::is_directory(a.corpus)) throw UsageError("not a directory: '" + a.corpus + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.corpus)) {
    if (e.is_regular_file() && e.path().extension() == ".cnf") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no .cnf files in '" + a.corpus + "'");
  Output out(a.output);
  RunConfig cfg;
  cfg.solver = parse_solver(a.solver);
  cfg.options.seed = resolve_seed(a.seed, cfg.options.seed);
  cfg.options.ledger_mode = MeasureLedger::Mode::record;
  cfg.timing = a.timing;
  cfg.oracle_check = a.oracle_check;
  for (const auto& p : files) {
    std::ifstream in(p);
    if (!in) throw UsageError("cannot open '" + p.string() + "'");
    cfg.instance = p.filename().string();
    out.stream() << to_json(run_solver(parse_dimacs(in), cfg)).dump() << '\n';
  }
  return 0;
}

int run_verify_cmd(const VerifyArgs& a) {
  VerifyConfig cfg;
  cfg.scale = a.scale;
  cfg.graph_catalogue = a.graphs;
  bool ok = true;
  run_verify(cfg, a.only, [&ok](const CriterionResult& r) {
    std::cout << format_result(r) << std::endl;
    ok = ok && r.pass;
  });
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parity-SAT solvers with measure ledgers and an oracle harness"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Decide the parity of the model count of a DIMACS formula");
  solve->add_option("--solver", sa.solver, "auto, occ2, length, docc, positive-fib or brute")->capture_default_str();
  solve->add_option("--input", sa.input, "DIMACS file, or - for stdin")->required();
  solve->add_option("--telemetry", sa.telemetry, "Write one JSON line per branching node");
  solve->add_option("--report", sa.report, "Write the run report as one JSON line (- for stdout)");
  solve->add_option("--seed", sa.seed, "Seed for the bisection heuristic (falls back to XPARITY_SEED)");
  solve->add_option("--jobs", sa.jobs, "Worker threads for the root's children")->capture_default_str();
  solve->add_option("--ledger", sa.ledger, "strict aborts on a missed measure bound, record counts it")
      ->capture_default_str();
  solve->add_flag("--oracle-check", sa.oracle_check, "Compare with brute-force enumeration when n <= 20");
  solve->add_flag("--explain", sa.explain, "Print the reduction trace as JSON");
  solve->add_flag("--exit-parity", sa.exit_parity, "Exit 10 when the parity is odd and 20 when it is even");
  solve->add_flag("--timing", sa.timing, "Include wall time (reports are no longer byte-identical)");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Write a generated instance as DIMACS");
  gen->add_option("--family", ga.family, "docc, exact, edge-cover or cubic")->capture_default_str();
  gen->add_option("--graph", ga.graph, "For edge-cover: k5, c6, p4, s3 or an edge list like 0-1,1-2");
  gen->add_option("--n", ga.n, "Variables")->capture_default_str();
  gen->add_option("--d", ga.d, "Occurrence bound (exact: occurrences per variable)")->capture_default_str();
  gen->add_option("--min-len", ga.min_len, "Shortest clause")->capture_default_str();
  gen->add_option("--max-len", ga.max_len, "Longest clause (exact: the clause length)")->capture_default_str();
  gen->add_option("--m", ga.m, "Clauses (cubic: 3-clauses, even)");
  gen->add_flag("--positive", ga.positive, "Only positive literals");
  gen->add_option("--seed", ga.seed, "Generator seed (falls back to XPARITY_SEED, then 1)");
  gen->add_option("--output", ga.output, "Output file (default stdout)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Solve every .cnf file of a directory, one JSON report per line");
  bench->add_option("--corpus", ba.corpus, "Directory of .cnf files")->required();
  bench->add_option("--solver", ba.solver, "Solver for every instance")->capture_default_str();
  bench->add_option("--output", ba.output, "Output file (default stdout)");
  bench->add_option("--seed", ba.seed, "Seed for the bisection heuristic (falls back to XPARITY_SEED)");
  bench->add_flag("--oracle-check", ba.oracle_check, "Cross-check small instances by enumeration");
  bench->add_flag("--timing", ba.timing, "Include wall time");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the acceptance property suites");
  verify->add_option("--only", va.only, "Criterion ids to run (default: all)");
  verify->add_option("--scale", va.scale, "Corpus size multiplier")->capture_default_str();
  verify->add_option("--graphs", va.graphs, "graph6 catalogue of connected graphs on 2..8 vertices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*gen) return run_gen(ga);
    if (*bench) return run_bench(ba);
    if (*verify) return run_verify_cmd(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
