#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xparity/branching.hpp"
#include "xparity/formula.hpp"
#include "xparity/measure.hpp"
#include "xparity/occ2.hpp"
#include "xparity/oracle.hpp"
#include "xparity/reducer.hpp"
#include "xparity/telemetry.hpp"

namespace xparity {

// Bounded-occurrence chain: mixed formula -> positive leaves -> dual set
// systems -> hitting-set parity. Only R1-R5 run between branchings so that the
// clause-count accounting stays intact.

inline ReduceOptions basic_rules() {
  ReduceOptions o;
  o.order = {RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5};
  return o;
}

/// Flips every variable that occurs only negatively.
inline Formula flip_negative_only(const Formula& f, std::size_t* flips = nullptr) {
  Formula g = f;
  for (Var v : f.variables()) {
    if (f.degree(v) > 0 && f.positive_count(v) == 0) {
      g = flip_variable(g, v);
      if (flips) ++*flips;
    }
  }
  return g;
}

namespace detail {

inline void positive_descent(const Formula& f, SolveContext& ctx, std::size_t depth,
                             const std::function<void(const Formula&)>& visit, std::size_t& zero_leaves) {
  ctx.enter(depth);
  const Formula g = flip_negative_only(f, &ctx.stats.polarity_flips);
  if (g.is_positive()) {
    ctx.leaf();
    visit(g);
    return;
  }
  Var x = 0;
  for (Var v : g.variables()) {
    if (g.positive_count(v) > 0 && g.negative_count(v) > 0) {
      x = v;
      break;
    }
  }
  const Clause* pivot = nullptr;
  for (const auto& o : g.occurrences(x)) {
    if (!o.negative) {
      pivot = &g.clause(o.clause);
      break;
    }
  }
  const BranchSet b = clause_branch(g, *pivot);
  LedgerEntry e;
  e.scheme = "docc.positive";
  e.depth = depth;
  e.pivot = b.pivot;
  std::vector<ReductionOutcome> kids;
  for (const auto& child : b.children) {
    kids.push_back(reduce(child, basic_rules()));
    ++ctx.stats.reductions;
    const bool resolved = kids.back().verdict_zero;
    e.resolved.push_back(resolved);
    e.drops.push_back(resolved ? kResolvedDrop
                               : static_cast<std::int64_t>(g.num_clauses()) -
                                     static_cast<std::int64_t>(kids.back().formula.num_clauses()));
  }
  e.checks = {{"dm1 >= 1", e.drops[0], 1}, {"dm2 >= 2", e.drops[1], 2}};
  ctx.log(e);
  for (const auto& k : kids) {
    if (k.verdict_zero) {
      ctx.enter(depth + 1);
      ctx.leaf();
      ++zero_leaves;
      ++ctx.stats.zero_verdicts;
    } else {
      positive_descent(k.formula, ctx, depth + 1, visit, zero_leaves);
    }
  }
}

}  // namespace detail

struct PositiveLeaves {
  std::vector<Formula> leaves;
  /// Branches closed by an empty clause; they contribute parity 0.
  std::size_t zero_leaves = 0;
};

/// Streams positive formulas whose parities XOR to parity(f). Returns the number
/// of branches that closed with parity 0.
inline std::size_t for_each_positive_leaf(const Formula& f, SolveContext& ctx,
                                          const std::function<void(const Formula&)>& visit) {
  std::size_t zeros = 0;
  const ReductionOutcome r = reduce(f, basic_rules());
  ++ctx.stats.reductions;
  if (r.verdict_zero) {
    ctx.enter(0);
    ctx.leaf();
    return 1;
  }
  detail::positive_descent(r.formula, ctx, 0, visit, zeros);
  return zeros;
}

inline PositiveLeaves reduce_to_positive(const Formula& f, SolveContext& ctx) {
  PositiveLeaves out;
  out.zero_leaves = for_each_positive_leaf(f, ctx, [&](const Formula& g) { out.leaves.push_back(g); });
  return out;
}

inline PositiveLeaves reduce_to_positive(const Formula& f) {
  SolveContext ctx;
  return reduce_to_positive(f, ctx);
}

namespace detail {

inline void require_positive(const Formula& f, const char* op) {
  if (!f.is_positive()) throw ContractViolation(std::string(op) + ": formula has a negative literal");
}

inline int fib_node(const Formula& f, SolveContext& ctx, std::size_t depth) {
  ctx.enter(depth);
  if (f.num_clauses() == 0 || std::any_of(f.variables().begin(), f.variables().end(),
                                          [&](Var v) { return f.degree(v) == 0; })) {
    ctx.leaf();
    return f.num_vars() == 0 ? 1 : 0;
  }
  const unsigned k = f.max_degree();
  Var x = 0;
  for (Var v : f.variables()) {
    if (f.degree(v) == k) {
      x = v;
      break;
    }
  }
  const BranchSet b = variable_branch(f, x);
  LedgerEntry e;
  e.scheme = "docc.fib";
  e.depth = depth;
  e.pivot = b.pivot;
  std::vector<ReductionOutcome> kids;
  for (std::size_t i = 0; i < b.children.size(); ++i) {
    kids.push_back(reduce(b.children[i], basic_rules()));
    ++ctx.stats.reductions;
    const bool resolved = kids.back().verdict_zero;
    e.resolved.push_back(resolved);
    const std::int64_t dm = resolved ? kResolvedDrop
                                     : static_cast<std::int64_t>(f.num_clauses()) -
                                           static_cast<std::int64_t>(kids.back().formula.num_clauses());
    e.drops.push_back(dm);
    e.checks.push_back({"child " + std::to_string(i + 1) + " dm", dm, static_cast<std::int64_t>(k - i)});
  }
  ctx.log(e);
  int parity = 0;
  for (const auto& r : kids) {
    if (r.verdict_zero) {
      ctx.enter(depth + 1);
      ctx.leaf();
      ++ctx.stats.zero_verdicts;
    } else {
      parity ^= fib_node(r.formula, ctx, depth + 1);
    }
  }
  return parity;
}

}  // namespace detail

/// Variable branching on a maximum-degree variable of a positive formula with
/// maximum degree at most d.
inline int solve_positive_fib(const Formula& f, unsigned d, SolveContext& ctx) {
  detail::require_positive(f, "solve_positive_fib");
  require_max_degree(f, d, "solve_positive_fib");
  const ReductionOutcome r = reduce(f, basic_rules());
  ++ctx.stats.reductions;
  if (r.verdict_zero) {
    ctx.enter(0);
    ctx.leaf();
    return 0;
  }
  return detail::fib_node(r.formula, ctx, 0);
}

inline int solve_positive_fib(const Formula& f, unsigned d) {
  SolveContext ctx;
  return solve_positive_fib(f, d, ctx);
}

/// Universe: clause indices 0..m-1. One set per variable (in variable order):
/// the clauses containing it.
inline SetSystem to_dual_system(const Formula& f) {
  detail::require_positive(f, "to_dual_system");
  SetSystem s;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) s.universe.push_back(static_cast<int>(i));
  for (Var v : f.variables()) {
    std::vector<int> set;
    for (const auto& o : f.occurrences(v)) set.push_back(static_cast<int>(o.clause));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    s.family.push_back(std::move(set));
  }
  return s;
}

/// Parity of a formula with maximum degree at most d, via positive leaves and
/// hitting sets of their dual systems. With options.verify_nodes set, every leaf
/// also checks parity(leaf) = #SC(dual) = #HS(dual) mod 2.
inline int solve_docc(const Formula& f, unsigned d, SolveContext& ctx, const OracleLimits& lim = {}) {
  require_max_degree(f, d, "solve_docc");
  int parity = 0;
  for_each_positive_leaf(f, ctx, [&](const Formula& leaf) {
    const SetSystem dual = to_dual_system(leaf);
    if (dual.universe.size() > lim.max_universe) {
      throw OracleRefusal("solve_docc: positive leaf has " + std::to_string(dual.universe.size()) +
                          " clauses and " + std::to_string(leaf.num_vars()) + " variables; hitting-set cap is " +
                          std::to_string(lim.max_universe));
    }
    const int hs = static_cast<int>(count_hitting_sets(dual, lim) % 2);
    if (ctx.options.verify_nodes && dual.family.size() <= lim.max_family) {
      const int sc = static_cast<int>(count_set_covers(dual, lim) % 2);
      if (sc != hs) throw ContractViolation("solve_docc: #SC and #HS of the dual differ mod 2 at " + to_string(leaf));
      if (leaf.num_vars() <= lim.max_vars && brute_parity(leaf, lim) != sc) {
        throw ContractViolation("solve_docc: #SC of the dual differs from parity at " + to_string(leaf));
      }
    }
    parity ^= hs;
  });
  return parity;
}

inline int solve_docc(const Formula& f, unsigned d) {
  SolveContext ctx;
  return solve_docc(f, d, ctx);
}

}  // namespace xparity
