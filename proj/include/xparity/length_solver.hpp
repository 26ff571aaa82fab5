#pragma once

#include <algorithm>
#include <cstdint>
#include <future>
#include <memory>
#include <optional>
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

// Parity-SAT parameterised by formula length. Steps 1 to 5 branch on
// variables of degree 3 or more; Step 6 hands a max-degree-2 formula to
// solve_occ2. All measure quantities are in halves (see measure.hpp).

/// `small` is the fallback for a whole formula of at most small_cap variables in
/// which Step 5 finds neither an external neighbour nor an all-proper structure.
enum class Step { step1, step2, step3_1, step3_2, step4, step5_1, step5_2, step6, small };

inline const char* step_name(Step s) {
  switch (s) {
    case Step::step1: return "1";
    case Step::step2: return "2";
    case Step::step3_1: return "3.1";
    case Step::step3_2: return "3.2";
    case Step::step4: return "4";
    case Step::step5_1: return "5.1";
    case Step::step5_2: return "5.2";
    case Step::step6: return "6";
    case Step::small: return "small";
  }
  return "?";
}

/// Worst-case mu-drop vector of a step with the factor quoted for it (rounded up
/// to four decimals).
struct StepVector {
  Step step;
  std::vector<double> drops;
  double quoted;
};

inline const std::vector<StepVector>& step_vectors() {
  static const std::vector<StepVector> table = {
      {Step::step1, {12, 4}, 1.1003},         {Step::step2, {7.5, 7.5}, 1.0969},
      {Step::step3_1, {6, 9}, 1.0983},        {Step::step3_2, {10.5, 4.5}, 1.1031},
      {Step::step4, {10.5, 4.5}, 1.1031},     {Step::step5_1, {13.5, 3}, 1.1052},
      {Step::step5_2, {15, 12, 9}, 1.0983},
  };
  return table;
}

/// Neighbourhood of a positive 3-variable x whose clauses (x | C_i) all have length 3.
struct LocalStructure {
  Var x = 0;
  std::vector<Clause> clauses;
  /// C_1, C_2, C_3: the clauses above with x removed.
  std::vector<Clause> sub;
  /// Variables of the C_i with exactly one occurrence outside the three clauses.
  std::vector<Var> y;
  /// Clauses outside the three that hold those remaining occurrences.
  std::vector<Clause> r;
  /// var(R_x) minus Y_x.
  std::vector<Var> ext;
  bool proper = false;
};

inline LocalStructure compute_ext(const Formula& f, Var x) {
  detail::require_var(f, x, "compute_ext");
  if (f.degree(x) != 3 || f.negative_count(x) != 0) {
    throw ContractViolation("compute_ext: x" + std::to_string(x) + " is not a positive 3-variable");
  }
  LocalStructure ls;
  ls.x = x;
  std::vector<std::size_t> own;
  for (const auto& o : f.occurrences(x)) own.push_back(o.clause);
  std::sort(own.begin(), own.end());
  own.erase(std::unique(own.begin(), own.end()), own.end());
  if (own.size() != 3) throw ContractViolation("compute_ext: x" + std::to_string(x) + " repeats within a clause");
  std::vector<Var> sub_vars;
  for (auto i : own) {
    const Clause& c = f.clause(i);
    if (c.size() != 3) throw ContractViolation("compute_ext: clause " + to_string(c) + " does not have length 3");
    ls.clauses.push_back(c);
    ls.sub.push_back(c.without(Literal::positive(x)));
    for (Var v : ls.sub.back().variables()) sub_vars.push_back(v);
  }
  std::sort(sub_vars.begin(), sub_vars.end());
  sub_vars.erase(std::unique(sub_vars.begin(), sub_vars.end()), sub_vars.end());

  auto is_own = [&](std::size_t i) { return std::binary_search(own.begin(), own.end(), i); };
  for (Var v : sub_vars) {
    std::size_t outside = 0;
    for (const auto& o : f.occurrences(v)) outside += is_own(o.clause) ? 0U : 1U;
    if (outside == 1) ls.y.push_back(v);
  }
  std::vector<Var> rvars;
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    if (is_own(i)) continue;
    const Clause& c = f.clause(i);
    const auto vs = c.variables();
    const bool hit = std::any_of(vs.begin(), vs.end(),
                                 [&](Var v) { return std::binary_search(ls.y.begin(), ls.y.end(), v); });
    if (!hit) continue;
    ls.r.push_back(c);
    rvars.insert(rvars.end(), vs.begin(), vs.end());
  }
  std::sort(rvars.begin(), rvars.end());
  rvars.erase(std::unique(rvars.begin(), rvars.end()), rvars.end());
  std::set_difference(rvars.begin(), rvars.end(), ls.y.begin(), ls.y.end(), std::back_inserter(ls.ext));

  bool disjoint = true;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      for (Var v : ls.sub[i].variables()) disjoint = disjoint && !ls.sub[j].has_variable(v);
    }
  }
  const bool all_three = std::all_of(sub_vars.begin(), sub_vars.end(), [&](Var v) { return f.degree(v) == 3; });
  ls.proper = disjoint && all_three;
  return ls;
}

struct Classification {
  Step step = Step::step6;
  /// The input with every 3-variable flipped so that positives are not outnumbered
  /// (only from Step 3 on; Steps 1 and 2 see the input as is).
  Formula formula;
  std::vector<Var> flipped;
  Var x = 0;
  /// Pivot clause of Steps 2 and 3.1.
  std::optional<Clause> clause;
  std::optional<LocalStructure> local;
};

/// First applicable step in the order 1, 2, 3.1, 3.2, 4, 5.1, 5.2, 6 for a reduced formula.
/// Pivots are the smallest eligible variable or clause.
inline Classification classify_step(const Formula& f, std::size_t small_cap = 10) {
  Classification c;
  c.formula = f;
  const unsigned d = f.max_degree();
  if (d >= 4) {
    c.step = Step::step1;
    for (Var v : f.variables()) {
      if (f.degree(v) == d) {
        c.x = v;
        break;
      }
    }
    return c;
  }
  for (const auto& cl : f.clauses()) {
    if (cl.size() < 4) continue;
    for (Var v : cl.variables()) {
      if (f.degree(v) == 3) {
        c.step = Step::step2;
        c.clause = cl;
        c.x = v;
        return c;
      }
    }
  }

  Formula g = f;
  for (Var v : f.variables()) {
    if (f.degree(v) == 3 && f.negative_count(v) > f.positive_count(v)) {
      g = flip_variable(g, v);
      c.flipped.push_back(v);
    }
  }
  c.formula = g;

  std::vector<Var> threes;
  for (Var v : g.variables()) {
    if (g.degree(v) == 3) threes.push_back(v);
  }
  if (threes.empty()) {
    c.step = Step::step6;
    return c;
  }

  auto negative_clause = [&](Var v) -> const Clause& {
    for (const auto& o : g.occurrences(v)) {
      if (o.negative) return g.clause(o.clause);
    }
    throw ContractViolation("classify_step: x" + std::to_string(v) + " has no negative occurrence");
  };
  std::optional<Var> step32;
  for (Var v : threes) {
    if (g.negative_count(v) == 0) continue;
    const Clause& neg = negative_clause(v);
    if (neg.size() == 3) {
      c.step = Step::step3_1;
      c.x = v;
      c.clause = neg;
      return c;
    }
    if (neg.size() != 2) {
      throw ContractViolation("classify_step: clause " + to_string(neg) + " of mixed x" + std::to_string(v) +
                              " has unexpected length");
    }
    if (!step32) step32 = v;
  }
  if (step32) {
    c.step = Step::step3_2;
    c.x = *step32;
    return c;
  }

  // From here on every 3-variable is purely positive.
  for (Var v : threes) {
    for (const auto& o : g.occurrences(v)) {
      if (o.negative) throw ContractViolation("classify_step: 3-variable x" + std::to_string(v) + " is not positive");
      if (g.clause(o.clause).size() == 2) {
        c.step = Step::step4;
        c.x = v;
        return c;
      }
    }
  }
  for (Var v : threes) {
    for (const auto& o : g.occurrences(v)) {
      if (g.clause(o.clause).size() != 3) {
        throw ContractViolation("classify_step: clause " + to_string(g.clause(o.clause)) + " of 3-variable x" +
                                std::to_string(v) + " does not have length 3");
      }
    }
  }
  bool all_proper = true;
  for (Var v : threes) {
    LocalStructure ls = compute_ext(g, v);
    if (!ls.ext.empty()) {
      c.step = Step::step5_1;
      c.x = v;
      c.local = std::move(ls);
      return c;
    }
    all_proper = all_proper && ls.proper;
  }
  if (!all_proper) {
    // Only possible when the subformula around a non-proper x is the whole formula.
    if (g.num_vars() <= small_cap) {
      c.step = Step::small;
      return c;
    }
    throw ContractViolation("classify_step: a non-proper 3-variable exists but no 3-variable has an external neighbour");
  }
  c.step = Step::step5_2;
  c.x = threes.front();
  c.local = compute_ext(g, c.x);
  return c;
}

/// One branching node: the children after reduction and the ledger entry that was logged.
struct StepBranch {
  Step step = Step::step6;
  BranchSet branches;
  std::vector<ReductionOutcome> children;
  LedgerEntry entry;
};

namespace detail {

inline StepBranch open_step(Step step, const Formula& f, BranchSet b, SolveContext& ctx, std::size_t depth) {
  StepBranch sb;
  sb.step = step;
  sb.branches = std::move(b);
  const Halves mu = measure_mu_halves(f);
  for (const auto& child : sb.branches.children) {
    sb.children.push_back(ctx.run_reduce(child));
    const auto& r = sb.children.back();
    const bool resolved = r.settled_parity().has_value();
    sb.entry.resolved.push_back(resolved);
    sb.entry.drops.push_back(resolved ? kResolvedDrop : mu - measure_mu_halves(r.formula));
  }
  sb.entry.scheme = std::string("length.step") + step_name(step);
  sb.entry.depth = depth;
  sb.entry.pivot = sb.branches.pivot;
  sb.entry.factor_drops = sb.entry.drops;
  for (const auto& sv : step_vectors()) {
    if (sv.step != step) continue;
    for (double a : sv.drops) sb.entry.claimed.push_back(2.0 * a);
  }
  return sb;
}

inline unsigned count_degree(const Formula& f, const std::vector<Var>& vs, unsigned d) {
  unsigned n = 0;
  for (Var v : vs) n += f.degree(v) == d ? 1U : 0U;
  return n;
}

inline std::int64_t sum2(const std::vector<std::int64_t>& d) { return d[0] + d[1]; }

}  // namespace detail

/// Simple branching on a maximum-degree variable of degree d >= 4. Drops are
/// indexed [x = 0, x = 1].
inline StepBranch step1_branch(const Formula& f, Var x, SolveContext& ctx, std::size_t depth = 0) {
  const unsigned d = f.degree(x);
  if (d < 4 || d != f.max_degree()) throw ContractViolation("step1_branch: x" + std::to_string(x) + " is not a max-degree 4+-variable");
  StepBranch sb = detail::open_step(Step::step1, f, simple_branch(f, x), ctx, depth);
  const Halves wd = weight_halves(d);
  const auto& dr = sb.entry.drops;
  sb.entry.checks = {{"D0 >= w_d", dr[0], wd},
                     {"D1 >= w_d", dr[1], wd},
                     {"D1+D0 >= 2w_d+2d*delta_d", detail::sum2(dr), 2 * wd + 2 * d * delta_halves(d)}};
  ctx.log(sb.entry);
  return sb;
}

/// Clause branching on a 4+-clause (x | C') that contains a 3-variable x.
inline StepBranch step2_branch(const Formula& f, const Clause& c, SolveContext& ctx, std::size_t depth = 0) {
  if (c.size() < 4 || !f.contains(c)) throw ContractViolation("step2_branch: " + to_string(c) + " is not a 4+-clause of f");
  const auto vs = c.variables();
  if (detail::count_degree(f, vs, 3) == 0) throw ContractViolation("step2_branch: " + to_string(c) + " has no 3-variable");
  const unsigned c2 = detail::count_degree(f, vs, 2);
  StepBranch sb = detail::open_step(Step::step2, f, clause_branch(f, c), ctx, depth);
  const auto& dr = sb.entry.drops;
  if (c2 == 0) {
    sb.entry.checks = {{"c2=0 D1 >= 4w2", dr[0], 4 * kW2}, {"c2=0 D2 >= 8w2", dr[1], 8 * kW2}};
  } else {
    sb.entry.checks = {{"c2>=1 D1 >= 5w2", dr[0], 5 * kW2}, {"c2>=1 D2 >= 5w2", dr[1], 5 * kW2}};
  }
  ctx.log(sb.entry);
  return sb;
}

/// Step 3 on a mixed 3-variable x with two positive occurrences and one negative
/// occurrence (not-x | D). |D| = 2 gives clause branching on that clause (3.1);
/// |D| = 1 gives simple branching on x (3.2), with drops indexed [x = 0, x = 1].
inline StepBranch step3_branch(const Formula& f, Var x, SolveContext& ctx, std::size_t depth = 0) {
  if (f.degree(x) != 3 || f.positive_count(x) != 2) {
    throw ContractViolation("step3_branch: x" + std::to_string(x) + " is not a normalized mixed 3-variable");
  }
  std::vector<Clause> pos;
  Clause neg;
  for (const auto& o : f.occurrences(x)) {
    if (o.negative) {
      neg = f.clause(o.clause);
    } else {
      pos.push_back(f.clause(o.clause));
    }
  }
  const Clause dd = neg.without(Literal::negative(x));
  if (dd.size() == 2) {
    const unsigned c2 = detail::count_degree(f, dd.variables(), 2);
    StepBranch sb = detail::open_step(Step::step3_1, f, clause_branch(f, neg), ctx, depth);
    const auto& dr = sb.entry.drops;
    if (c2 == 0) {
      sb.entry.checks = {{"c2=0 D1 >= 3w2", dr[0], 3 * kW2}, {"c2=0 D2 >= 8w2", dr[1], 8 * kW2}};
    } else {
      sb.entry.checks = {{"c2>=1 D1 >= 4w2", dr[0], 4 * kW2}, {"c2>=1 D2 >= 6w2", dr[1], 6 * kW2}};
    }
    ctx.log(sb.entry);
    return sb;
  }
  if (dd.size() != 1) throw ContractViolation("step3_branch: negative clause " + to_string(neg) + " has unexpected length");

  const Var y = dd[0].var();
  const Clause c1 = pos[0].without(Literal::positive(x));
  const Clause c2 = pos[1].without(Literal::positive(x));
  if (c1.has_variable(y) && c2.has_variable(y)) {
    throw ContractViolation("step3_branch: y" + std::to_string(y) + " occurs in both C1 and C2 of a reduced formula");
  }
  for (const Clause* ci : {&c1, &c2}) {
    if (ci->size() == 1 && ci->has_variable(y)) {
      throw ContractViolation("step3_branch: unit sub-clause " + to_string(*ci) + " contains y" + std::to_string(y));
    }
  }
  StepBranch sb = detail::open_step(Step::step3_2, f, simple_branch(f, x), ctx, depth);
  const auto& dr = sb.entry.drops;
  if (c1.size() == 1 && c2.size() == 1) {
    sb.entry.checks = {{"case1 D0 >= 5w2", dr[0], 5 * kW2}, {"case1 D1 >= 5w2", dr[1], 5 * kW2}};
  } else {
    sb.entry.checks = {{"case2 D1+D0 >= 10w2", detail::sum2(dr), 10 * kW2},
                       {"case2 min >= 3w2", std::min(dr[0], dr[1]), 3 * kW2}};
  }
  ctx.log(sb.entry);
  return sb;
}

/// Simple branching on a positive 3-variable that lies in a 2-clause. Drops are indexed [x = 0, x = 1].
inline StepBranch step4_branch(const Formula& f, Var x, SolveContext& ctx, std::size_t depth = 0) {
  bool in_two = false;
  for (const auto& o : f.occurrences(x)) in_two = in_two || f.clause(o.clause).size() == 2;
  if (f.degree(x) != 3 || f.negative_count(x) != 0 || !in_two) {
    throw ContractViolation("step4_branch: x" + std::to_string(x) + " is not a positive 3-variable in a 2-clause");
  }
  StepBranch sb = detail::open_step(Step::step4, f, simple_branch(f, x), ctx, depth);
  const auto& dr = sb.entry.drops;
  sb.entry.checks = {{"D0 >= 3w2", dr[0], 3 * kW2},
                     {"D1 >= 5w2", dr[1], 5 * kW2},
                     {"D1+D0 >= 10w2", detail::sum2(dr), 10 * kW2}};
  ctx.log(sb.entry);
  return sb;
}

/// Step 5.1 when |Ext_x| >= 1 (simple branching, drops [x = 0, x = 1]); otherwise
/// Step 5.2 on a proper x (variable branching over its clauses in canonical order).
inline StepBranch step5_branch(const Formula& f, Var x, SolveContext& ctx, std::size_t depth = 0) {
  const LocalStructure ls = compute_ext(f, x);
  if (!ls.ext.empty()) {
    StepBranch sb = detail::open_step(Step::step5_1, f, simple_branch(f, x), ctx, depth);
    const auto& dr = sb.entry.drops;
    const auto ext = static_cast<std::int64_t>(ls.ext.size());
    sb.entry.checks = {{"D0 >= 2w2", dr[0], 2 * kW2},
                       {"D1 >= 9w2", dr[1], 9 * kW2},
                       {"D1 >= (8+|Ext|)w2", dr[1], (8 + ext) * kW2}};
    ctx.log(sb.entry);
    return sb;
  }
  if (!ls.proper) throw ContractViolation("step5_branch: x" + std::to_string(x) + " is neither proper nor has Ext");
  StepBranch sb = detail::open_step(Step::step5_2, f, variable_branch(f, x, ls.clauses), ctx, depth);
  const auto& dr = sb.entry.drops;
  sb.entry.checks = {{"D1 >= 10w2", dr[0], 10 * kW2}, {"D2 >= 8w2", dr[1], 8 * kW2}, {"D3 >= 6w2", dr[2], 6 * kW2}};
  ctx.log(sb.entry);
  return sb;
}

namespace detail {

inline StepBranch run_step(const Classification& c, SolveContext& ctx, std::size_t depth) {
  switch (c.step) {
    case Step::step1: return step1_branch(c.formula, c.x, ctx, depth);
    case Step::step2: return step2_branch(c.formula, *c.clause, ctx, depth);
    case Step::step3_1:
    case Step::step3_2: return step3_branch(c.formula, c.x, ctx, depth);
    case Step::step4: return step4_branch(c.formula, c.x, ctx, depth);
    case Step::step5_1:
    case Step::step5_2: return step5_branch(c.formula, c.x, ctx, depth);
    case Step::step6:
    case Step::small: break;
  }
  throw ContractViolation(std::string("run_step: step ") + step_name(c.step) + " does not branch");
}

inline int length_node(const Formula& f, SolveContext& ctx, std::size_t depth);

/// Children of the root on separate threads, each with its own context. Telemetry
/// records are buffered and replayed in child order so output stays deterministic.
inline int parallel_children(const StepBranch& sb, SolveContext& ctx, std::size_t depth) {
  struct Part {
    SolveContext ctx;
    std::vector<NodeRecord> records;
    int parity = 0;
  };
  std::vector<std::unique_ptr<Part>> parts;
  std::vector<std::future<void>> work;
  int parity = 0;
  for (const auto& r : sb.children) {
    if (auto p = r.settled_parity()) {
      ctx.enter(depth + 1);
      ctx.leaf();
      parity ^= *p;
      continue;
    }
    SolveOptions opt = ctx.options;
    opt.jobs = 1;
    auto part = std::make_unique<Part>(Part{SolveContext(opt), {}, 0});
    Part* raw = part.get();
    if (ctx.sink) raw->ctx.sink = [raw](const NodeRecord& n) { raw->records.push_back(n); };
    const Formula* child = &r.formula;
    work.push_back(std::async(std::launch::async, [raw, child, depth] {
      raw->parity = length_node(*child, raw->ctx, depth + 1);
    }));
    parts.push_back(std::move(part));
  }
  for (auto& w : work) w.get();
  for (const auto& part : parts) {
    parity ^= part->parity;
    ctx.stats.merge(part->ctx.stats);
    ctx.ledger.merge(part->ctx.ledger);
    if (ctx.sink) {
      for (const auto& n : part->records) ctx.sink(n);
    }
  }
  return parity;
}

inline int length_node(const Formula& f, SolveContext& ctx, std::size_t depth) {
  if (measure_mu_halves(f) > 2 * static_cast<Halves>(f.length())) {
    throw ContractViolation("length_node: mu exceeds formula length at " + to_string(f));
  }
  const Classification c = classify_step(f, ctx.options.reduce.small_cap);
  ctx.stats.polarity_flips += c.flipped.size();
  int parity = 0;
  if (c.step == Step::step6) {
    parity = solve_occ2(c.formula, ctx, depth);
  } else if (c.step == Step::small) {
    ctx.enter(depth);
    ctx.leaf();
    ++ctx.stats.branchings["length.small"];
    parity = brute_parity(c.formula);
  } else {
    ctx.enter(depth);
    const StepBranch sb = run_step(c, ctx, depth);
    if (depth == 0 && ctx.options.jobs > 1) {
      parity = parallel_children(sb, ctx, depth);
    } else {
      for (const auto& r : sb.children) {
        if (auto p = r.settled_parity()) {
          ctx.enter(depth + 1);
          ctx.leaf();
          parity ^= *p;
        } else {
          parity ^= length_node(r.formula, ctx, depth + 1);
        }
      }
    }
  }
  if (ctx.options.verify_nodes && f.num_vars() <= 20 && brute_parity(f) != parity) {
    throw ContractViolation("length_node: parity mismatch with the oracle at " + to_string(f));
  }
  return parity;
}

}  // namespace detail

/// Parity of an arbitrary CNF formula.
inline int solve_length(const Formula& f, SolveContext& ctx) {
  const ReductionOutcome r = ctx.run_reduce(f);
  if (auto p = r.settled_parity()) {
    ctx.enter(0);
    ctx.leaf();
    return *p;
  }
  return detail::length_node(r.formula, ctx, 0);
}

inline int solve_length(const Formula& f) {
  SolveContext ctx;
  return solve_length(f, ctx);
}

}  // namespace xparity
