#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "xparity/docc.hpp"
#include "xparity/formula.hpp"
#include "xparity/length_solver.hpp"
#include "xparity/measure.hpp"
#include "xparity/occ2.hpp"
#include "xparity/oracle.hpp"
#include "xparity/reducer.hpp"
#include "xparity/telemetry.hpp"

namespace xparity {

enum class SolverKind { automatic, occ2, length, docc, positive_fib, brute };

inline const char* solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::automatic: return "auto";
    case SolverKind::occ2: return "occ2";
    case SolverKind::length: return "length";
    case SolverKind::docc: return "docc";
    case SolverKind::positive_fib: return "positive-fib";
    case SolverKind::brute: return "brute";
  }
  return "?";
}

inline SolverKind parse_solver(const std::string& s) {
  for (auto k : {SolverKind::automatic, SolverKind::occ2, SolverKind::length, SolverKind::docc,
                 SolverKind::positive_fib, SolverKind::brute}) {
    if (s == solver_name(k)) return k;
  }
  throw std::invalid_argument("unknown solver '" + s + "'");
}

/// max degree <= 2 goes to occ2, everything else to the length solver.
inline SolverKind dispatch(const Formula& f) {
  return f.max_degree() <= 2 ? SolverKind::occ2 : SolverKind::length;
}

struct GrowthFit {
  /// Which size parameter the fit is taken against: "n", "m" or "L".
  std::string measure;
  std::size_t size = 0;
  /// leaves^(1/size), or 1 when size is 0.
  double base = 1.0;
};

struct RunReport {
  static constexpr int kSchemaVersion = 1;

  std::string instance;
  std::string solver;
  std::string path;
  int parity = 0;
  std::size_t n = 0, m = 0, length = 0;
  Halves mu_halves = 0;
  SolveStats stats;
  std::map<std::string, LedgerTally> ledger;
  std::size_t ledger_failures = 0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  GrowthFit growth;
  /// Filled only when timing is requested, so reports stay reproducible by default.
  std::optional<double> wall_ms;
  /// "agree", "disagree", or "skipped: ..." when an oracle check was requested.
  std::optional<std::string> oracle;
};

struct RunConfig {
  SolverKind solver = SolverKind::automatic;
  SolveOptions options;
  std::string instance;
  bool timing = false;
  bool oracle_check = false;
  std::size_t oracle_cap = 20;
  std::function<void(const NodeRecord&)> sink;
};

inline GrowthFit fit_growth(const std::string& measure, std::size_t size, std::size_t leaves) {
  GrowthFit g{measure, size, 1.0};
  if (size > 0 && leaves > 0) g.base = std::pow(static_cast<double>(leaves), 1.0 / static_cast<double>(size));
  return g;
}

inline RunReport run_solver(const Formula& f, const RunConfig& cfg) {
  RunReport rep;
  rep.instance = cfg.instance;
  rep.solver = solver_name(cfg.solver);
  rep.n = f.num_vars();
  rep.m = f.num_clauses();
  rep.length = f.length();
  rep.mu_halves = measure_mu_halves(f);
  rep.seed = cfg.options.seed;
  rep.jobs = cfg.options.jobs;

  const SolverKind path = cfg.solver == SolverKind::automatic ? dispatch(f) : cfg.solver;
  rep.path = solver_name(path);
  SolveContext ctx(cfg.options);
  ctx.sink = cfg.sink;
  const auto start = std::chrono::steady_clock::now();
  std::string measure = "m";
  std::size_t size = rep.m;
  switch (path) {
    case SolverKind::occ2:
      rep.parity = solve_occ2(f, ctx);
      break;
    case SolverKind::length:
      rep.parity = solve_length(f, ctx);
      measure = "L";
      size = rep.length;
      break;
    case SolverKind::docc:
      rep.parity = solve_docc(f, std::max(2U, f.max_degree()), ctx);
      break;
    case SolverKind::positive_fib:
      rep.parity = solve_positive_fib(f, std::max(2U, f.max_degree()), ctx);
      break;
    case SolverKind::brute:
      ctx.enter(0);
      ctx.leaf();
      rep.parity = brute_parity(f);
      measure = "n";
      size = rep.n;
      break;
    case SolverKind::automatic:
      throw ContractViolation("run_solver: unresolved dispatch");
  }
  const auto stop = std::chrono::steady_clock::now();
  if (cfg.timing) rep.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  rep.stats = ctx.stats;
  rep.ledger = ctx.ledger.tally();
  rep.ledger_failures = ctx.ledger.failures();
  rep.growth = fit_growth(measure, size, rep.stats.leaves);
  if (cfg.oracle_check) {
    if (f.num_vars() <= cfg.oracle_cap) {
      rep.oracle = brute_parity(f) == rep.parity ? "agree" : "disagree";
    } else {
      rep.oracle = "skipped: " + std::to_string(f.num_vars()) + " variables exceed the oracle cap " +
                   std::to_string(cfg.oracle_cap);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON.

using json = nlohmann::ordered_json;

inline json to_json(const NodeRecord& r) {
  json j;
  j["depth"] = r.depth;
  j["scheme"] = r.scheme;
  j["pivot"] = r.pivot;
  json drops = json::array();
  for (std::size_t i = 0; i < r.drops.size(); ++i) {
    if (i < r.resolved.size() && r.resolved[i]) {
      drops.push_back("resolved");
    } else {
      drops.push_back(r.drops[i]);
    }
  }
  j["drops"] = drops;
  j["pass"] = r.pass;
  if (r.fallback) j["fallback"] = true;
  return j;
}

inline json to_json(const RunReport& r) {
  json j;
  j["schema"] = RunReport::kSchemaVersion;
  j["instance"] = r.instance;
  j["solver"] = r.solver;
  j["path"] = r.path;
  j["parity"] = r.parity;
  j["formula"] = {{"n", r.n}, {"m", r.m}, {"L", r.length}, {"mu", static_cast<double>(r.mu_halves) / 2.0}};
  j["nodes"] = r.stats.nodes;
  j["leaves"] = r.stats.leaves;
  j["max_depth"] = r.stats.max_depth;
  j["reductions"] = r.stats.reductions;
  json ledger = json::object();
  for (const auto& [scheme, t] : r.ledger) {
    ledger[scheme] = {{"entries", t.entries},
                      {"failures", t.failures},
                      {"resolved_children", t.resolved_children},
                      {"fallbacks", t.fallbacks},
                      {"failures_within_factor", t.failures_within_factor}};
  }
  j["ledger"] = ledger;
  j["ledger_failures"] = r.ledger_failures;
  j["seed"] = r.seed;
  j["jobs"] = r.jobs;
  j["growth"] = {{"measure", r.growth.measure}, {"size", r.growth.size}, {"base", r.growth.base}};
  if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
  if (r.oracle) j["oracle"] = *r.oracle;
  return j;
}

/// Reduction trace of one `reduce` call, for --explain.
inline json explain_json(const Formula& input, const ReductionOutcome& r) {
  json j;
  j["input"] = {{"n", input.num_vars()}, {"m", input.num_clauses()}, {"L", input.length()}};
  json steps = json::array();
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    json s = {{"rule", rule_name(r.trace[i].rule)}, {"detail", r.trace[i].detail}};
    if (i + 1 < r.mu_log.size()) s["mu"] = static_cast<double>(r.mu_log[i + 1]) / 2.0;
    steps.push_back(s);
  }
  j["steps"] = steps;
  const auto settled = r.settled_parity();
  j["settled"] = settled ? json(*settled) : json(nullptr);
  j["reduced"] = {{"n", r.formula.num_vars()}, {"m", r.formula.num_clauses()}, {"L", r.formula.length()}};
  return j;
}

}  // namespace xparity
