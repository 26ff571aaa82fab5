#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "xparity/measure.hpp"
#include "xparity/reducer.hpp"

namespace xparity {

/// One branching node, as streamed to a telemetry sink.
struct NodeRecord {
  std::size_t depth = 0;
  std::string scheme;
  std::string pivot;
  std::vector<std::int64_t> drops;
  std::vector<bool> resolved;
  bool pass = true;
  bool fallback = false;
};

struct SolveOptions {
  /// Multigraphs with at most this many vertices are finished by plain 3-clause branching.
  std::size_t base_threshold = 16;
  double eps = 1e-9;
  std::uint64_t seed = 0x5eed;
  unsigned bisect_restarts = 8;
  MeasureLedger::Mode ledger_mode = MeasureLedger::Mode::strict;
  ReduceOptions reduce;
  /// Worker threads for the children of the root branching node (length solver).
  unsigned jobs = 1;
  /// Compare every node's parity with the oracle when the node is small enough.
  bool verify_nodes = false;
};

struct SolveStats {
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t max_depth = 0;
  std::map<std::string, std::size_t> branchings;
  std::size_t bisections = 0;
  std::size_t splits = 0;
  std::size_t loops_removed = 0;
  std::size_t cut_total = 0;
  std::size_t cut_above_bound = 0;
  std::size_t untracked_3clauses = 0;
  std::size_t reductions = 0;
  std::size_t zero_verdicts = 0;
  std::size_t polarity_flips = 0;

  void merge(const SolveStats& o) {
    nodes += o.nodes;
    leaves += o.leaves;
    max_depth = std::max(max_depth, o.max_depth);
    for (const auto& [k, v] : o.branchings) branchings[k] += v;
    bisections += o.bisections;
    splits += o.splits;
    loops_removed += o.loops_removed;
    cut_total += o.cut_total;
    cut_above_bound += o.cut_above_bound;
    untracked_3clauses += o.untracked_3clauses;
    reductions += o.reductions;
    zero_verdicts += o.zero_verdicts;
    polarity_flips += o.polarity_flips;
  }
};

class SolveContext {
 public:
  explicit SolveContext(SolveOptions opt = {}) : options(std::move(opt)), ledger(options.ledger_mode) {}

  SolveOptions options;
  MeasureLedger ledger;
  SolveStats stats;
  std::function<void(const NodeRecord&)> sink;

  void enter(std::size_t depth) {
    ++stats.nodes;
    if (depth > stats.max_depth) stats.max_depth = depth;
  }
  void leaf() { ++stats.leaves; }

  ReductionOutcome run_reduce(const Formula& f) {
    ++stats.reductions;
    auto r = reduce(f, options.reduce);
    if (r.verdict_zero) ++stats.zero_verdicts;
    return r;
  }

  void log(const LedgerEntry& e) {
    ++stats.branchings[e.scheme];
    if (sink) sink(NodeRecord{e.depth, e.scheme, e.pivot, e.drops, e.resolved, e.pass(), e.fallback});
    ledger.record(e);
  }
};

}  // namespace xparity
