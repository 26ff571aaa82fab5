#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xparity {

/// Thrown when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Var = std::uint32_t;

/// A literal packed as 2*var + sign, so that sorting literals orders them by
/// variable with the positive literal first.
class Literal {
 public:
  constexpr Literal() = default;

  static constexpr Literal positive(Var v) { return Literal(v << 1); }
  static constexpr Literal negative(Var v) { return Literal((v << 1) | 1U); }
  static constexpr Literal make(Var v, bool negated) { return negated ? negative(v) : positive(v); }

  static Literal from_dimacs(int value) {
    if (value == 0) throw ContractViolation("literal 0 is not a valid DIMACS literal");
    return value > 0 ? positive(static_cast<Var>(value)) : negative(static_cast<Var>(-value));
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool is_negative() const { return (code_ & 1U) != 0; }
  constexpr bool is_positive() const { return !is_negative(); }
  constexpr std::uint32_t code() const { return code_; }
  constexpr Literal operator~() const { return Literal(code_ ^ 1U); }

  int to_dimacs() const {
    const int v = static_cast<int>(var());
    return is_negative() ? -v : v;
  }

  constexpr auto operator<=>(const Literal&) const = default;

 private:
  constexpr explicit Literal(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 2;
};

/// A clause kept as a sorted literal list. Duplicates and complementary pairs
/// are representable so that the reducer can see and remove them.
class Clause {
 public:
  Clause() = default;
  Clause(std::initializer_list<Literal> lits) : lits_(lits) { std::sort(lits_.begin(), lits_.end()); }
  explicit Clause(std::vector<Literal> lits) : lits_(std::move(lits)) { std::sort(lits_.begin(), lits_.end()); }

  static Clause from_dimacs(std::initializer_list<int> values) {
    std::vector<Literal> lits;
    for (int v : values) lits.push_back(Literal::from_dimacs(v));
    return Clause(std::move(lits));
  }

  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }
  Literal operator[](std::size_t i) const { return lits_[i]; }
  std::span<const Literal> literals() const { return lits_; }

  bool contains(Literal l) const { return std::binary_search(lits_.begin(), lits_.end(), l); }
  bool has_variable(Var v) const { return contains(Literal::positive(v)) || contains(Literal::negative(v)); }

  bool has_duplicates() const { return std::adjacent_find(lits_.begin(), lits_.end()) != lits_.end(); }

  bool is_tautology() const {
    for (std::size_t i = 0; i + 1 < lits_.size(); ++i) {
      if (lits_[i].var() == lits_[i + 1].var() && lits_[i] != lits_[i + 1]) return true;
    }
    return false;
  }

  /// Distinct variables, ascending.
  std::vector<Var> variables() const {
    std::vector<Var> vs;
    for (Literal l : lits_) {
      if (vs.empty() || vs.back() != l.var()) vs.push_back(l.var());
    }
    return vs;
  }

  /// Set inclusion on the literal sets (duplicates ignored).
  bool subset_of(const Clause& other) const {
    for (Literal l : lits_) {
      if (!other.contains(l)) return false;
    }
    return true;
  }

  Clause without(Literal l) const {
    std::vector<Literal> out;
    out.reserve(lits_.size());
    for (Literal k : lits_) {
      if (k != l) out.push_back(k);
    }
    return Clause(std::move(out));
  }

  Clause without_variable(Var v) const {
    std::vector<Literal> out;
    out.reserve(lits_.size());
    for (Literal k : lits_) {
      if (k.var() != v) out.push_back(k);
    }
    return Clause(std::move(out));
  }

  std::vector<int> to_dimacs() const {
    std::vector<int> out;
    out.reserve(lits_.size());
    for (Literal l : lits_) out.push_back(l.to_dimacs());
    return out;
  }

  auto operator<=>(const Clause&) const = default;
  bool operator==(const Clause&) const = default;

 private:
  std::vector<Literal> lits_;
};

struct Occurrence {
  std::uint32_t clause = 0;
  bool negative = false;
  bool operator==(const Occurrence&) const = default;
};

/// A CNF formula over an explicit variable set. Clauses have set semantics and
/// are kept in canonical (sorted) order; the occurrence index is rebuilt on
/// construction, so every value is internally consistent.
class Formula {
 public:
  Formula() = default;

  Formula(std::vector<Var> variables, std::vector<Clause> clauses)
      : vars_(std::move(variables)), clauses_(std::move(clauses)) {
    normalize();
  }

  /// Variables 1..num_vars and clauses written as signed DIMACS integers.
  static Formula from_dimacs(Var num_vars, std::initializer_list<std::initializer_list<int>> clauses) {
    std::vector<Clause> cs;
    for (const auto& c : clauses) cs.push_back(Clause::from_dimacs(c));
    return Formula(iota_vars(num_vars), std::move(cs));
  }

  static std::vector<Var> iota_vars(Var num_vars) {
    std::vector<Var> vs(num_vars);
    for (Var v = 0; v < num_vars; ++v) vs[v] = v + 1;
    return vs;
  }

  const std::vector<Var>& variables() const { return vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_[i]; }

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t length() const { return length_; }
  bool empty() const { return vars_.empty() && clauses_.empty(); }
  Var max_variable() const { return vars_.empty() ? 0 : vars_.back(); }

  bool has_variable(Var v) const { return std::binary_search(vars_.begin(), vars_.end(), v); }

  std::span<const Occurrence> occurrences(Var v) const {
    if (v + 1 >= occ_begin_.size()) return {};
    return std::span<const Occurrence>(occ_.data() + occ_begin_[v], occ_begin_[v + 1] - occ_begin_[v]);
  }

  unsigned degree(Var v) const { return static_cast<unsigned>(occurrences(v).size()); }

  unsigned positive_count(Var v) const {
    unsigned k = 0;
    for (const auto& o : occurrences(v)) k += o.negative ? 0U : 1U;
    return k;
  }
  unsigned negative_count(Var v) const { return degree(v) - positive_count(v); }

  unsigned max_degree() const {
    unsigned d = 0;
    for (Var v : vars_) d = std::max(d, degree(v));
    return d;
  }

  std::optional<std::size_t> index_of(const Clause& c) const {
    auto it = std::lower_bound(clauses_.begin(), clauses_.end(), c);
    if (it == clauses_.end() || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - clauses_.begin());
  }
  bool contains(const Clause& c) const { return index_of(c).has_value(); }

  bool has_empty_clause() const { return !clauses_.empty() && clauses_.front().empty(); }

  bool is_positive() const {
    for (const auto& c : clauses_) {
      for (Literal l : c) {
        if (l.is_negative()) return false;
      }
    }
    return true;
  }

  bool operator==(const Formula& o) const { return vars_ == o.vars_ && clauses_ == o.clauses_; }

 private:
  void normalize() {
    std::sort(vars_.begin(), vars_.end());
    vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
    if (!vars_.empty() && vars_.front() == 0) throw ContractViolation("variable identifiers start at 1");
    std::sort(clauses_.begin(), clauses_.end());
    clauses_.erase(std::unique(clauses_.begin(), clauses_.end()), clauses_.end());

    const Var top = max_variable();
    occ_begin_.assign(top + 2, 0);
    length_ = 0;
    for (const auto& c : clauses_) {
      length_ += c.size();
      for (Literal l : c) {
        if (!has_variable(l.var())) {
          throw ContractViolation("clause mentions variable " + std::to_string(l.var()) +
                                  " outside the variable set");
        }
        ++occ_begin_[l.var() + 1];
      }
    }
    for (std::size_t v = 1; v < occ_begin_.size(); ++v) occ_begin_[v] += occ_begin_[v - 1];
    occ_.assign(length_, Occurrence{});
    std::vector<std::uint32_t> fill(occ_begin_.begin(), occ_begin_.end() - 1);
    for (std::uint32_t ci = 0; ci < clauses_.size(); ++ci) {
      for (Literal l : clauses_[ci]) occ_[fill[l.var()]++] = Occurrence{ci, l.is_negative()};
    }
  }

  std::vector<Var> vars_;
  std::vector<Clause> clauses_;
  std::vector<std::uint32_t> occ_begin_;
  std::vector<Occurrence> occ_;
  std::size_t length_ = 0;
};

// ---------------------------------------------------------------------------
// Transforms. All are pure: they return a fresh formula.

namespace detail {

inline std::vector<Var> erase_var(std::vector<Var> vs, Var v) {
  vs.erase(std::remove(vs.begin(), vs.end(), v), vs.end());
  return vs;
}

inline void require_var(const Formula& f, Var v, const char* op) {
  if (!f.has_variable(v)) {
    throw ContractViolation(std::string(op) + ": variable " + std::to_string(v) + " is not in the formula");
  }
}

}  // namespace detail

/// phi[l = 1]: satisfied clauses go, occurrences of ~l are deleted, var(l) leaves the variable set.
inline Formula assign_literal(const Formula& f, Literal l) {
  detail::require_var(f, l.var(), "assign_literal");
  std::vector<Clause> out;
  out.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) {
    if (c.contains(l)) continue;
    out.push_back(c.contains(~l) ? c.without(~l) : c);
  }
  return Formula(detail::erase_var(f.variables(), l.var()), std::move(out));
}

inline Formula assign(const Formula& f, Var v, bool value) {
  return assign_literal(f, Literal::make(v, !value));
}

/// phi[C = 0]: every literal of C set to false, in order.
inline Formula falsify_clause(const Formula& f, const Clause& c) {
  if (c.is_tautology()) throw ContractViolation("falsify_clause: clause contains complementary literals");
  Formula g = f;
  Literal prev;
  bool first = true;
  for (Literal l : c) {
    if (!first && l == prev) continue;
    first = false;
    prev = l;
    g = assign_literal(g, ~l);
  }
  return g;
}

/// phi[C = 1], i.e. phi AND C.
inline Formula add_clause(const Formula& f, const Clause& c) {
  std::vector<Clause> cs = f.clauses();
  cs.push_back(c);
  return Formula(f.variables(), std::move(cs));
}

/// phi \ {C}; the variable set is unchanged.
inline Formula remove_clause(const Formula& f, const Clause& c) {
  std::vector<Clause> cs;
  cs.reserve(f.num_clauses());
  for (const auto& d : f.clauses()) {
    if (d != c) cs.push_back(d);
  }
  return Formula(f.variables(), std::move(cs));
}

inline Formula remove_clauses(const Formula& f, const std::vector<Clause>& sorted_victims) {
  std::vector<Clause> cs;
  cs.reserve(f.num_clauses());
  for (const auto& d : f.clauses()) {
    if (!std::binary_search(sorted_victims.begin(), sorted_victims.end(), d)) cs.push_back(d);
  }
  return Formula(f.variables(), std::move(cs));
}

/// Replace x by l and ~x by ~l everywhere; x leaves the variable set. Resulting
/// duplicate literals or tautologies are left in place.
inline Formula merge_variables(const Formula& f, Var x, Literal l) {
  if (x == l.var()) throw ContractViolation("merge_variables: cannot merge a variable into itself");
  detail::require_var(f, x, "merge_variables");
  detail::require_var(f, l.var(), "merge_variables");
  std::vector<Clause> out;
  out.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) {
    if (!c.has_variable(x)) {
      out.push_back(c);
      continue;
    }
    std::vector<Literal> lits;
    for (Literal k : c) {
      if (k.var() == x) {
        lits.push_back(k.is_negative() ? ~l : l);
      } else {
        lits.push_back(k);
      }
    }
    out.emplace_back(std::move(lits));
  }
  return Formula(detail::erase_var(f.variables(), x), std::move(out));
}

inline Formula flip_variable(const Formula& f, Var x) {
  detail::require_var(f, x, "flip_variable");
  std::vector<Clause> out;
  out.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) {
    if (!c.has_variable(x)) {
      out.push_back(c);
      continue;
    }
    std::vector<Literal> lits;
    for (Literal k : c) lits.push_back(k.var() == x ? ~k : k);
    out.emplace_back(std::move(lits));
  }
  return Formula(f.variables(), std::move(out));
}

/// Delete every literal of x from the clauses and drop x from the variable set.
inline Formula remove_variable(const Formula& f, Var x) {
  detail::require_var(f, x, "remove_variable");
  std::vector<Clause> out;
  out.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) out.push_back(c.has_variable(x) ? c.without_variable(x) : c);
  return Formula(detail::erase_var(f.variables(), x), std::move(out));
}

/// The subformula made of the given clauses, over exactly the variables they mention.
inline Formula induced_subformula(std::vector<Clause> clauses) {
  std::vector<Var> vs;
  for (const auto& c : clauses) {
    for (Literal l : c) vs.push_back(l.var());
  }
  return Formula(std::move(vs), std::move(clauses));
}

struct FormulaStats {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t length = 0;
  std::size_t m3 = 0;
  std::map<unsigned, std::size_t> degree_histogram;
  /// (positive, negative) occurrence counts per variable.
  std::map<Var, std::pair<unsigned, unsigned>> polarity;
  std::map<std::size_t, std::size_t> clause_length_histogram;
};

inline FormulaStats stats(const Formula& f) {
  FormulaStats s;
  s.n = f.num_vars();
  s.m = f.num_clauses();
  s.length = f.length();
  for (const auto& c : f.clauses()) {
    if (c.size() == 3) ++s.m3;
    ++s.clause_length_histogram[c.size()];
  }
  for (Var v : f.variables()) {
    ++s.degree_histogram[f.degree(v)];
    s.polarity[v] = {f.positive_count(v), f.negative_count(v)};
  }
  return s;
}

/// Rebuild the occurrence index from scratch and compare. Returns an empty
/// string when consistent, a description of the first mismatch otherwise.
inline std::string audit(const Formula& f) {
  std::size_t len = 0;
  std::map<Var, std::vector<Occurrence>> expected;
  for (std::uint32_t ci = 0; ci < f.num_clauses(); ++ci) {
    if (ci > 0 && !(f.clause(ci - 1) < f.clause(ci))) return "clauses not strictly sorted";
    for (Literal l : f.clause(ci)) {
      if (!f.has_variable(l.var())) return "clause variable outside variable set";
      expected[l.var()].push_back({ci, l.is_negative()});
      ++len;
    }
  }
  if (len != f.length()) return "length mismatch";
  for (Var v : f.variables()) {
    auto occ = f.occurrences(v);
    const auto& want = expected[v];
    if (!std::equal(occ.begin(), occ.end(), want.begin(), want.end())) {
      return "occurrence list mismatch for variable " + std::to_string(v);
    }
  }
  return {};
}

inline std::string to_string(const Clause& c) {
  std::string s = "(";
  bool first = true;
  for (Literal l : c) {
    if (!first) s += ' ';
    first = false;
    s += std::to_string(l.to_dimacs());
  }
  return s + ")";
}

inline std::string to_string(const Formula& f) {
  std::string s = "{";
  bool first = true;
  for (const auto& c : f.clauses()) {
    if (!first) s += ", ";
    first = false;
    s += to_string(c);
  }
  s += "} over {";
  for (std::size_t i = 0; i < f.num_vars(); ++i) s += (i ? " " : "") + std::to_string(f.variables()[i]);
  return s + "}";
}

inline std::ostream& operator<<(std::ostream& os, const Clause& c) { return os << to_string(c); }
inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << to_string(f); }

}  // namespace xparity
