#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xparity/formula.hpp"

namespace xparity {

enum class Scheme { simple, variable, clause };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::simple: return "simple";
    case Scheme::variable: return "variable";
    case Scheme::clause: return "clause";
  }
  return "?";
}

/// Children whose parities XOR to the parent's parity. Children are unreduced.
struct BranchSet {
  Scheme scheme = Scheme::simple;
  std::string pivot;
  std::vector<Formula> children;
};

inline BranchSet simple_branch(const Formula& f, Var x) {
  detail::require_var(f, x, "simple_branch");
  return {Scheme::simple, "x" + std::to_string(x), {assign(f, x, false), assign(f, x, true)}};
}

/// Child i is f[C_1 = 1, ..., C_{i-1} = 1, C_i = 0, l_i = 1], where the i-th
/// clause containing x is (l_i | C_i). `order` lists those clauses; by default
/// they are taken in canonical order.
inline BranchSet variable_branch(const Formula& f, Var x, std::optional<std::vector<Clause>> order = std::nullopt) {
  detail::require_var(f, x, "variable_branch");
  std::vector<Clause> cs;
  if (order) {
    cs = *order;
  } else {
    for (const auto& o : f.occurrences(x)) {
      if (cs.empty() || cs.back() != f.clause(o.clause)) cs.push_back(f.clause(o.clause));
    }
  }
  if (cs.size() != f.degree(x)) {
    throw ContractViolation("variable_branch: expected " + std::to_string(f.degree(x)) + " clauses for x" +
                            std::to_string(x) + ", got " + std::to_string(cs.size()));
  }
  std::vector<Literal> lits;
  std::vector<Clause> rests;
  for (const auto& c : cs) {
    if (!f.contains(c)) throw ContractViolation("variable_branch: clause " + to_string(c) + " not in formula");
    if (c.has_duplicates() || c.is_tautology()) {
      throw ContractViolation("variable_branch: clause " + to_string(c) + " has repeated or complementary literals");
    }
    const Literal l = c.contains(Literal::positive(x)) ? Literal::positive(x) : Literal::negative(x);
    if (!c.contains(l)) throw ContractViolation("variable_branch: clause " + to_string(c) + " lacks x");
    lits.push_back(l);
    rests.push_back(c.without(l));
  }
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      if (cs[i] == cs[j]) throw ContractViolation("variable_branch: clause listed twice");
    }
  }

  BranchSet b{Scheme::variable, "x" + std::to_string(x), {}};
  Formula prefix = f;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    b.children.push_back(assign_literal(falsify_clause(prefix, rests[i]), lits[i]));
    prefix = add_clause(prefix, rests[i]);
  }
  return b;
}

inline BranchSet clause_branch(const Formula& f, const Clause& c) {
  if (!f.contains(c)) throw ContractViolation("clause_branch: clause " + to_string(c) + " not in formula");
  Formula without = remove_clause(f, c);
  Formula falsified = falsify_clause(without, c);
  return {Scheme::clause, to_string(c), {std::move(without), std::move(falsified)}};
}

}  // namespace xparity
