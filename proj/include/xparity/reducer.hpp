#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "xparity/assignment_trace.hpp"
#include "xparity/formula.hpp"
#include "xparity/measure.hpp"
#include "xparity/oracle.hpp"

namespace xparity {

enum class RuleId : int { R1 = 1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12, R13 };

constexpr std::array<RuleId, 13> kAllRules = {RuleId::R1, RuleId::R2,  RuleId::R3,  RuleId::R4, RuleId::R5,
                                              RuleId::R6, RuleId::R7,  RuleId::R8,  RuleId::R9, RuleId::R10,
                                              RuleId::R11, RuleId::R12, RuleId::R13};

inline std::string rule_name(RuleId r) { return "R" + std::to_string(static_cast<int>(r)); }

struct RuleResult {
  enum class Kind { not_applicable, changed, verdict };
  Kind kind = Kind::not_applicable;
  Formula formula;
  std::string detail;
  AssignmentTrace delta;

  bool applied() const { return kind != Kind::not_applicable; }
};

struct ReduceOptions {
  std::vector<RuleId> order{kAllRules.begin(), kAllRules.end()};
  /// Variable cap for the isolate / semi-isolate rules.
  std::size_t small_cap = 10;
  /// Throw if a step fails to lower (n, m, L) or raises mu.
  bool check_steps = true;
};

struct Potential {
  std::size_t n = 0, m = 0, length = 0;
  auto operator<=>(const Potential&) const = default;
};

inline Potential potential_of(const Formula& f) { return {f.num_vars(), f.num_clauses(), f.length()}; }

struct TraceStep {
  RuleId rule;
  std::string detail;
};

struct ReductionOutcome {
  bool verdict_zero = false;
  Formula formula;
  std::vector<TraceStep> trace;
  AssignmentTrace assignments;
  std::vector<Potential> potential_log;
  std::vector<Halves> mu_log;

  /// Parity when reduction alone settles it: 0 on a verdict, 1 for the empty formula.
  std::optional<int> settled_parity() const {
    if (verdict_zero) return 0;
    if (formula.empty()) return 1;
    return std::nullopt;
  }
};

namespace detail {

inline RuleResult changed(Formula f, std::string detail, AssignmentTrace delta = {}) {
  return {RuleResult::Kind::changed, std::move(f), std::move(detail), std::move(delta)};
}

inline RuleResult verdict(std::string detail) {
  return {RuleResult::Kind::verdict, Formula{}, std::move(detail), {}};
}

inline std::string lit_str(Literal l) { return std::to_string(l.to_dimacs()); }

inline Clause dedup(const Clause& c) {
  std::vector<Literal> lits(c.begin(), c.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  return Clause(std::move(lits));
}

inline std::size_t distinct_size(const Clause& c) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < c.size(); ++i) k += (i == 0 || c[i] != c[i - 1]) ? 1U : 0U;
  return k;
}

/// Clause components: clauses joined when they share a variable other than `skip`.
/// Returns, for each clause, the index of its component (numbered in order of first clause).
inline std::vector<std::uint32_t> clause_components(const Formula& f, Var skip = 0) {
  const std::size_t m = f.num_clauses();
  std::vector<std::uint32_t> comp(m, UINT32_MAX);
  std::vector<std::uint32_t> stack;
  std::uint32_t next = 0;
  for (std::uint32_t s = 0; s < m; ++s) {
    if (comp[s] != UINT32_MAX) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t c = stack.back();
      stack.pop_back();
      for (Literal l : f.clause(c)) {
        if (l.var() == skip) continue;
        for (const auto& o : f.occurrences(l.var())) {
          if (comp[o.clause] == UINT32_MAX) {
            comp[o.clause] = next;
            stack.push_back(o.clause);
          }
        }
      }
    }
    ++next;
  }
  return comp;
}

inline std::vector<Var> vars_of(const std::vector<Clause>& cs) {
  std::vector<Var> vs;
  for (const auto& c : cs) {
    for (Literal l : c) vs.push_back(l.var());
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

/// Remove the clauses of a subformula and the variables only it mentions (except `keep`).
inline Formula cut_out(const Formula& f, std::vector<Clause> part, const std::vector<Var>& part_vars, Var keep,
                       AssignmentTrace& delta) {
  std::sort(part.begin(), part.end());
  for (const auto& c : part) delta.push(AssignmentTrace::RemoveClause{c});
  Formula g = remove_clauses(f, part);
  std::vector<Var> vs;
  for (Var v : g.variables()) {
    if (v == keep || !std::binary_search(part_vars.begin(), part_vars.end(), v)) vs.push_back(v);
    else delta.push(AssignmentTrace::RemoveVariable{v});
  }
  return Formula(std::move(vs), g.clauses());
}

inline RuleResult rule_empty_clause(const Formula& f) {
  if (f.has_empty_clause()) return verdict("empty clause");
  return {};
}

inline RuleResult rule_duplicates(const Formula& f) {
  for (const auto& c : f.clauses()) {
    if (!c.has_duplicates()) continue;
    Clause d = dedup(c);
    AssignmentTrace t;
    t.push(AssignmentTrace::ReplaceClause{c, d});
    return changed(add_clause(remove_clause(f, c), d), to_string(c) + " -> " + to_string(d), std::move(t));
  }
  return {};
}

inline RuleResult rule_tautology(const Formula& f) {
  for (const auto& c : f.clauses()) {
    if (!c.is_tautology()) continue;
    AssignmentTrace t;
    t.push(AssignmentTrace::RemoveClause{c});
    return changed(remove_clause(f, c), to_string(c), std::move(t));
  }
  return {};
}

inline RuleResult rule_subsumption(const Formula& f) {
  auto drop = [&f](const Clause& d, const Clause& by) {
    AssignmentTrace t;
    t.push(AssignmentTrace::RemoveClause{d});
    return changed(remove_clause(f, d), to_string(d) + " by " + to_string(by), std::move(t));
  };
  if (f.has_empty_clause() && f.num_clauses() > 1) return drop(f.clause(1), f.clause(0));
  for (std::uint32_t j = 0; j < f.num_clauses(); ++j) {
    const Clause& d = f.clause(j);
    const std::size_t dsz = distinct_size(d);
    for (Literal l : d) {
      for (const auto& o : f.occurrences(l.var())) {
        if (o.clause == j || o.negative != l.is_negative()) continue;
        const Clause& c = f.clause(o.clause);
        if (distinct_size(c) > dsz || !c.subset_of(d)) continue;
        // Equal literal sets only arise with duplicates; drop the longer copy.
        if (d.subset_of(c) && !(c.size() < d.size() || (c.size() == d.size() && o.clause < j))) continue;
        return drop(d, c);
      }
    }
  }
  return {};
}

inline RuleResult rule_unit(const Formula& f) {
  for (const auto& c : f.clauses()) {
    if (c.size() != 1) continue;
    AssignmentTrace t;
    t.push(AssignmentTrace::Assign{c[0].var(), c[0].is_positive()});
    return changed(assign_literal(f, c[0]), "unit " + lit_str(c[0]), std::move(t));
  }
  return {};
}

inline RuleResult rule_zero_var(const Formula& f) {
  for (Var v : f.variables()) {
    if (f.degree(v) == 0) return verdict("free variable " + std::to_string(v));
  }
  return {};
}

inline RuleResult rule_one_var(const Formula& f) {
  for (Var v : f.variables()) {
    if (f.degree(v) != 1) continue;
    const auto occ = f.occurrences(v)[0];
    const Clause& c = f.clause(occ.clause);
    if (c.is_tautology()) continue;
    const Literal x = Literal::make(v, occ.negative);
    const Clause rest = c.without(x);
    AssignmentTrace t;
    t.push(AssignmentTrace::Assign{v, x.is_positive()});
    for (Var u : rest.variables()) t.push(AssignmentTrace::Assign{u, rest.contains(Literal::negative(u))});
    return changed(falsify_clause(assign_literal(f, x), rest), "1-variable " + lit_str(x) + " in " + to_string(c),
                   std::move(t));
  }
  return {};
}

inline RuleResult rule_domination(const Formula& f) {
  for (Var y : f.variables()) {
    const auto occ = f.occurrences(y);
    if (occ.empty()) continue;
    std::vector<Literal> common;
    for (Literal l : f.clause(occ[0].clause)) {
      if (l.var() != y && (common.empty() || common.back() != l)) common.push_back(l);
    }
    for (std::size_t i = 1; i < occ.size() && !common.empty(); ++i) {
      const Clause& c = f.clause(occ[i].clause);
      std::erase_if(common, [&c](Literal l) { return !c.contains(l); });
    }
    if (common.empty()) continue;
    const Literal x = common.front();
    AssignmentTrace t;
    t.push(AssignmentTrace::Assign{x.var(), x.is_negative()});
    return changed(assign_literal(f, ~x), lit_str(x) + " dominates " + std::to_string(y), std::move(t));
  }
  return {};
}

inline RuleResult rule_twins(const Formula& f) {
  for (Var a : f.variables()) {
    const auto oa = f.occurrences(a);
    if (oa.empty()) continue;
    for (Var b : f.clause(oa[0].clause).variables()) {
      if (b <= a) continue;
      const auto ob = f.occurrences(b);
      if (ob.size() != oa.size()) continue;
      const bool flip = oa[0].negative != ob[0].negative;
      bool twins = true;
      for (std::size_t i = 0; i < oa.size() && twins; ++i) {
        twins = oa[i].clause == ob[i].clause && (oa[i].negative != ob[i].negative) == flip;
      }
      if (!twins) continue;
      AssignmentTrace t;
      t.push(AssignmentTrace::RemoveVariable{b});
      return changed(remove_variable(f, b),
                     std::to_string(a) + (flip ? " twin of -" : " twin of ") + std::to_string(b) + ", drop " +
                         std::to_string(b),
                     std::move(t));
    }
  }
  return {};
}

inline RuleResult rule_strengthen(const Formula& f) {
  for (std::uint32_t e = 0; e < f.num_clauses(); ++e) {
    const Clause& big = f.clause(e);
    for (std::size_t k = 0; k < big.size(); ++k) {
      const Literal drop = big[k];
      if (k > 0 && big[k - 1] == drop) continue;
      const Literal keep = ~drop;
      const Clause rest = big.without(drop);
      for (const auto& o : f.occurrences(keep.var())) {
        if (o.clause == e || o.negative != keep.is_negative()) continue;
        const Clause& small = f.clause(o.clause);
        if (!small.without(keep).subset_of(rest)) continue;
        AssignmentTrace t;
        t.push(AssignmentTrace::ReplaceClause{big, rest});
        return changed(add_clause(remove_clause(f, big), rest),
                       "drop " + lit_str(drop) + " from " + to_string(big) + " using " + to_string(small),
                       std::move(t));
      }
    }
  }
  return {};
}

inline RuleResult rule_complementary_pair(const Formula& f) {
  for (const auto& c : f.clauses()) {
    if (c.size() != 2 || c[0].var() == c[1].var()) continue;
    const Literal a = c[0], b = c[1];
    const Clause partner{~a, ~b};
    if (!f.contains(partner)) continue;
    // a := ~b
    const Literal into = a.is_negative() ? b : ~b;
    AssignmentTrace t;
    t.push(AssignmentTrace::Merge{a.var(), into});
    Formula g = merge_variables(f, a.var(), into);
    std::vector<Clause> taut;
    for (const auto& d : g.clauses()) {
      if (d.is_tautology()) {
        taut.push_back(d);
        t.push(AssignmentTrace::RemoveClause{d});
      }
    }
    return changed(remove_clauses(g, taut),
                   to_string(c) + " and " + to_string(partner) + ": set " + std::to_string(a.var()) + " = " +
                       lit_str(into),
                   std::move(t));
  }
  return {};
}

inline RuleResult rule_isolate(const Formula& f, std::size_t cap) {
  const auto comp = clause_components(f);
  const std::uint32_t count = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  if (count < 2) return {};
  std::vector<std::vector<Clause>> parts(count);
  for (std::size_t i = 0; i < comp.size(); ++i) parts[comp[i]].push_back(f.clause(i));
  for (auto& part : parts) {
    const auto vs = vars_of(part);
    if (vs.size() > cap) continue;
    const std::string what = "isolated part of " + std::to_string(part.size()) + " clauses over " +
                             std::to_string(vs.size()) + " vars";
    if (brute_parity(induced_subformula(part)) == 0) return verdict(what + ", parity 0");
    AssignmentTrace t;
    return changed(cut_out(f, std::move(part), vs, 0, t), what + ", parity 1", std::move(t));
  }
  return {};
}

inline RuleResult rule_semi_isolate(const Formula& f, std::size_t cap) {
  for (Var x : f.variables()) {
    const auto occ = f.occurrences(x);
    if (occ.size() < 2) continue;
    const auto comp = clause_components(f, x);
    std::vector<std::uint32_t> touching;
    for (const auto& o : occ) touching.push_back(comp[o.clause]);
    std::sort(touching.begin(), touching.end());
    touching.erase(std::unique(touching.begin(), touching.end()), touching.end());
    if (touching.size() < 2) continue;
    for (std::uint32_t k : touching) {
      std::vector<Clause> part;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        if (comp[i] == k) part.push_back(f.clause(i));
      }
      const auto vs = vars_of(part);
      if (vs.size() > cap) continue;
      const Formula sub = induced_subformula(part);
      const int p0 = brute_parity(assign(sub, x, false));
      const int p1 = brute_parity(assign(sub, x, true));
      const std::string what = "part of " + std::to_string(part.size()) + " clauses over " +
                               std::to_string(vs.size()) + " vars hanging on " + std::to_string(x) + ", p0=" +
                               std::to_string(p0) + " p1=" + std::to_string(p1);
      if (p0 == 0 && p1 == 0) return verdict(what);
      AssignmentTrace t;
      Formula g = cut_out(f, std::move(part), vs, x, t);
      if (p0 != p1) {
        t.push(AssignmentTrace::Assign{x, p1 == 1});
        g = assign(g, x, p1 == 1);
      }
      return changed(std::move(g), what, std::move(t));
    }
  }
  return {};
}

}  // namespace detail

inline RuleResult apply_rule(const Formula& f, RuleId rule, std::size_t small_cap = 10) {
  switch (rule) {
    case RuleId::R1: return detail::rule_empty_clause(f);
    case RuleId::R2: return detail::rule_duplicates(f);
    case RuleId::R3: return detail::rule_tautology(f);
    case RuleId::R4: return detail::rule_subsumption(f);
    case RuleId::R5: return detail::rule_unit(f);
    case RuleId::R6: return detail::rule_zero_var(f);
    case RuleId::R7: return detail::rule_one_var(f);
    case RuleId::R8: return detail::rule_domination(f);
    case RuleId::R9: return detail::rule_twins(f);
    case RuleId::R10: return detail::rule_strengthen(f);
    case RuleId::R11: return detail::rule_complementary_pair(f);
    case RuleId::R12: return detail::rule_isolate(f, small_cap);
    case RuleId::R13: return detail::rule_semi_isolate(f, small_cap);
  }
  throw ContractViolation("apply_rule: unknown rule");
}

inline ReductionOutcome reduce(const Formula& input, const ReduceOptions& opt = {}) {
  ReductionOutcome out;
  out.formula = input;
  out.potential_log.push_back(potential_of(input));
  out.mu_log.push_back(measure_mu_halves(input));
  for (;;) {
    bool fired = false;
    for (RuleId r : opt.order) {
      RuleResult res = apply_rule(out.formula, r, opt.small_cap);
      if (!res.applied()) continue;
      out.trace.push_back({r, res.detail});
      if (res.kind == RuleResult::Kind::verdict) {
        out.verdict_zero = true;
        out.formula = Formula{};
        return out;
      }
      const Potential before = out.potential_log.back();
      const Potential after = potential_of(res.formula);
      const Halves mu = measure_mu_halves(res.formula);
      if (opt.check_steps && !(after < before)) {
        throw ContractViolation(rule_name(r) + " did not lower (n, m, L): " + res.detail);
      }
      if (opt.check_steps && mu > out.mu_log.back()) {
        throw ContractViolation(rule_name(r) + " raised mu: " + res.detail);
      }
      out.potential_log.push_back(after);
      out.mu_log.push_back(mu);
      out.assignments.append(res.delta);
      out.formula = std::move(res.formula);
      fired = true;
      break;
    }
    if (!fired) return out;
  }
}

// ---------------------------------------------------------------------------
// Structural check of a reduced formula. Deliberately shares no search code
// with the rules above: property 5 uses union-find over variables.

struct ReducedReport {
  std::array<bool, 5> holds{true, true, true, true, true};
  std::array<std::string, 5> witness;

  bool all() const { return std::all_of(holds.begin(), holds.end(), [](bool b) { return b; }); }
  std::string summary() const {
    std::string s;
    for (std::size_t i = 0; i < 5; ++i) {
      if (!holds[i]) s += "property " + std::to_string(i + 1) + ": " + witness[i] + "\n";
    }
    return s;
  }
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0U); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Property 5 is read for nonempty subformulas whose complement is also nonempty.
inline ReducedReport is_reduced(const Formula& f, std::size_t small_cap = 10) {
  ReducedReport rep;
  auto fail = [&rep](int k, std::string w) {
    if (rep.holds[k]) {
      rep.holds[k] = false;
      rep.witness[k] = std::move(w);
    }
  };

  for (Var v : f.variables()) {
    if (f.degree(v) < 2) fail(0, "variable " + std::to_string(v) + " has degree " + std::to_string(f.degree(v)));
  }
  for (const auto& c : f.clauses()) {
    if (c.size() < 2) fail(1, "clause " + to_string(c) + " is shorter than 2");
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Var>> shared2;
  for (Var v : f.variables()) {
    const auto occ = f.occurrences(v);
    if (occ.size() != 2 || occ[0].clause == occ[1].clause) continue;
    auto& list = shared2[{occ[0].clause, occ[1].clause}];
    list.push_back(v);
    if (list.size() == 2) {
      fail(2, to_string(f.clause(occ[0].clause)) + " and " + to_string(f.clause(occ[1].clause)) +
                  " share 2-variables " + std::to_string(list[0]) + ", " + std::to_string(list[1]));
    }
  }

  std::map<std::pair<Var, Var>, const Clause*> pairs;
  for (const auto& c : f.clauses()) {
    if (c.size() != 2 || c[0].var() == c[1].var()) continue;
    auto [it, fresh] = pairs.emplace(std::pair{c[0].var(), c[1].var()}, &c);
    if (!fresh) fail(3, to_string(*it->second) + " and " + to_string(c) + " share both variables");
  }

  // Property 5. Group variables (and clauses, through a sentinel per clause) with
  // union-find, once globally and once with each variable x cut away.
  const Var top = f.max_variable();
  const std::size_t m = f.num_clauses();
  auto groups = [&](Var skip) {
    detail::UnionFind uf(top + 1 + m);
    for (std::size_t i = 0; i < m; ++i) {
      for (Literal l : f.clause(i)) {
        if (l.var() != skip) uf.unite(top + 1 + i, l.var());
      }
    }
    std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<Var>>> g;
    for (std::size_t i = 0; i < m; ++i) g[uf.find(top + 1 + i)].first.push_back(i);
    for (Var v : f.variables()) {
      if (v == skip || f.degree(v) == 0) continue;
      g[uf.find(v)].second.push_back(v);
    }
    return g;
  };

  const auto whole = groups(0);
  if (whole.size() >= 2) {
    for (const auto& [root, part] : whole) {
      if (part.second.size() <= small_cap) {
        fail(4, "clause " + to_string(f.clause(part.first.front())) + " lies in a separate part over " +
                    std::to_string(part.second.size()) + " variables");
        break;
      }
    }
  }
  for (Var x : f.variables()) {
    if (!rep.holds[4]) break;
    if (f.degree(x) < 2) continue;
    for (const auto& [root, part] : groups(x)) {
      std::size_t inside = 0;
      for (std::size_t ci : part.first) inside += f.clause(ci).has_variable(x) ? 1U : 0U;
      if (inside == 0) continue;
      std::size_t total = 0;
      for (std::size_t ci = 0; ci < m; ++ci) total += f.clause(ci).has_variable(x) ? 1U : 0U;
      if (inside == total) continue;
      if (part.second.size() + 1 <= small_cap) {
        fail(4, "clause " + to_string(f.clause(part.first.front())) + " belongs to a part over " +
                    std::to_string(part.second.size() + 1) + " variables attached only through " +
                    std::to_string(x));
        break;
      }
    }
  }
  return rep;
}

}  // namespace xparity
