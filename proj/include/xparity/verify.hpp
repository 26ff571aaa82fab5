#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "xparity/branching.hpp"
#include "xparity/dimacs.hpp"
#include "xparity/docc.hpp"
#include "xparity/generators.hpp"
#include "xparity/length_solver.hpp"
#include "xparity/occ2.hpp"
#include "xparity/oracle.hpp"
#include "xparity/reducer.hpp"
#include "xparity/report.hpp"

namespace xparity {

// Property suites behind `xparity verify` and the acceptance binary. Each one
// returns a single pass/fail verdict plus a one-line summary of what it saw.

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyConfig {
  /// Multiplies every corpus size; 1.0 is the full acceptance run.
  double scale = 1.0;
  /// graph6 catalogue of connected graphs on 2..8 vertices.
  std::string graph_catalogue;
  std::uint64_t seed = 20240601;
  /// Wall-clock budget for the whole suite, checked by criterion 9.
  double budget_seconds = 600;
};

namespace verify_detail {

inline std::size_t scaled(const VerifyConfig& cfg, std::size_t full) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(full) * cfg.scale)));
}

/// Counts failures and remembers the first few.
class Failures {
 public:
  void add(const std::string& what) {
    ++count_;
    if (first_.size() < 3) first_.push_back(what);
  }
  std::size_t count() const { return count_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : first_) s += "; " + f;
    return s;
  }

 private:
  std::size_t count_ = 0;
  std::vector<std::string> first_;
};

/// Runs `body`, turning any exception into a failure entry.
inline void guarded(Failures& fails, const std::string& label, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    fails.add(label + " threw: " + e.what());
  }
}

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

inline Formula with_clauses(const Formula& base, std::vector<Var> extra_vars, const std::vector<Clause>& extra) {
  std::vector<Var> vs = base.variables();
  vs.insert(vs.end(), extra_vars.begin(), extra_vars.end());
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  std::vector<Clause> cs = base.clauses();
  cs.insert(cs.end(), extra.begin(), extra.end());
  return Formula(vs, cs);
}

/// Number of edge subsets covering every vertex, by a sweep over edges with the
/// covered vertex set as state. Shares nothing with the oracle's enumeration.
inline std::uint64_t edge_covers_by_sweep(const SimpleGraph& g) {
  const std::size_t states = std::size_t{1} << g.num_vertices;
  std::vector<std::uint64_t> ways(states, 0);
  ways[0] = 1;
  for (const auto& [u, v] : g.edges) {
    const std::size_t bits = (std::size_t{1} << u) | (std::size_t{1} << v);
    std::vector<std::uint64_t> next = ways;
    for (std::size_t s = 0; s < states; ++s) next[s | bits] += ways[s];
    ways = std::move(next);
  }
  return ways[states - 1];
}

inline bool connected(const SimpleGraph& g) {
  if (g.num_vertices == 0) return true;
  std::vector<int> seen(static_cast<std::size_t>(g.num_vertices), 0), stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : g.edges) {
      const int w = a == u ? b : (b == u ? a : -1);
      if (w >= 0 && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s != 0; });
}

inline SimpleGraph random_graph_without_isolated(Rng& rng, int lo, int hi) {
  for (;;) {
    const auto n = static_cast<int>(rng.between(lo, hi));
    const SimpleGraph g = gen_random_graph(n, rng.between(2, 7), 10, rng.next());
    if (!g.has_isolated_vertex()) return g;
  }
}

// Generators that make the rarer rules applicable.

inline Formula with_twin(Rng& rng, Var n) {
  const Formula base = gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 8)), 1, 3, false);
  const auto a = static_cast<Var>(rng.between(1, n));
  const Var b = n + 1;
  const bool flip = rng.coin();
  std::vector<Clause> cs;
  for (const auto& c : base.clauses()) {
    std::vector<Literal> ls(c.begin(), c.end());
    for (Literal l : c) {
      if (l.var() == a) {
        ls.push_back(Literal::make(b, l.is_negative() != flip));
        break;
      }
    }
    cs.emplace_back(std::move(ls));
  }
  return Formula(Formula::iota_vars(b), cs);
}

inline Formula with_strengthening(Rng& rng, Var n) {
  const Formula base = gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 8)), 1, 3, false);
  const Clause& small = base.clause(static_cast<std::size_t>(rng.below(base.num_clauses())));
  if (small.empty()) return base;
  const Literal keep = small[static_cast<std::size_t>(rng.below(small.size()))];
  std::vector<Literal> big;
  for (Literal l : small) {
    if (l != keep) big.push_back(l);
  }
  big.push_back(~keep);
  const auto extra = static_cast<Var>(rng.between(1, n));
  if (std::none_of(big.begin(), big.end(), [extra](Literal l) { return l.var() == extra; })) {
    big.push_back(Literal::make(extra, rng.coin()));
  }
  return with_clauses(base, {}, {Clause(big)});
}

inline Formula with_complementary_pair(Rng& rng, Var n) {
  const Formula base = gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(0, 8)), 1, 3, false);
  const auto a = static_cast<Var>(rng.between(1, n));
  auto b = static_cast<Var>(rng.between(1, n));
  if (b == a) b = n + 1;
  const Literal la = Literal::make(a, rng.coin()), lb = Literal::make(b, rng.coin());
  return with_clauses(base, {a, b}, {Clause{la, lb}, Clause{~la, ~lb}});
}

inline Formula with_isolated_part(Rng& rng, Var n) {
  const Formula base = gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 8)), 1, 3, false);
  const auto k = static_cast<Var>(rng.between(1, 4));
  const Formula part = gen_random_cnf(rng, k, static_cast<std::size_t>(rng.between(1, 4)), 1, 3, false);
  std::vector<Clause> shifted;
  std::vector<Var> vs;
  for (const auto& c : part.clauses()) {
    std::vector<Literal> ls;
    for (Literal l : c) ls.push_back(Literal::make(l.var() + n, l.is_negative()));
    shifted.emplace_back(std::move(ls));
  }
  for (Var v = 1; v <= k; ++v) vs.push_back(v + n);
  return with_clauses(base, vs, shifted);
}

inline Formula with_hanging_part(Rng& rng, Var n) {
  const Formula base = gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 8)), 1, 3, false);
  const auto x = static_cast<Var>(rng.between(1, n));
  const auto k = static_cast<Var>(rng.between(1, 3));
  std::vector<Clause> part;
  std::vector<Var> vs;
  for (Var v = 1; v <= k; ++v) vs.push_back(n + v);
  const auto clauses = static_cast<std::size_t>(rng.between(1, 3));
  for (std::size_t i = 0; i < clauses; ++i) {
    std::vector<Literal> ls{Literal::make(x, rng.coin())};
    for (Var v : vs) {
      if (i == 0 || rng.coin()) ls.push_back(Literal::make(v, rng.coin()));
    }
    part.emplace_back(std::move(ls));
  }
  return with_clauses(base, vs, part);
}

inline Formula rule_corpus_formula(Rng& rng, std::size_t t) {
  const auto n = static_cast<Var>(rng.between(1, 9));
  switch (t % 7) {
    case 0: return gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(0, 10)), 0, 4, true);
    case 1: return gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 12)), 1, 3, true);
    case 2: return with_twin(rng, n);
    case 3: return with_strengthening(rng, n);
    case 4: return with_complementary_pair(rng, n);
    case 5: return with_isolated_part(rng, n);
    default: return with_hanging_part(rng, n);
  }
}

/// gen_random_docc, retried with a fresh seed and one clause fewer when the
/// requested clause count cannot be placed as distinct clauses.
inline Formula docc_sample(Rng& rng, DoccParams p) {
  for (;;) {
    try {
      return gen_random_docc(p);
    } catch (const GeneratorRefusal&) {
      p.seed = rng.next();
      if (p.m && *p.m > 1) p.m = *p.m - 1;
    }
  }
}

/// Every variable occurs exactly twice; clause lengths drawn from [2, max_len].
inline Formula exact_two_occ(Rng& rng, Var n, unsigned max_len = 4) {
  n = std::max<Var>(2, n);
  max_len = std::min<unsigned>(max_len, n);
  for (;;) {
    std::vector<unsigned> lengths;
    unsigned left = 2 * n;
    while (left > 0) {
      unsigned len = static_cast<unsigned>(rng.between(2, max_len));
      if (left - std::min(len, left) == 1) len = left <= max_len ? left : 2;
      len = std::min(len, left);
      lengths.push_back(len);
      left -= len;
    }
    try {
      return gen_exact_occ(n, 2, lengths, rng.next());
    } catch (const GeneratorRefusal&) {
    }
  }
}

/// n 3-clauses in which every variable occurs exactly three times. Small n can
/// refuse, in which case the seed is redrawn.
inline Formula exact_three_occ(Rng& rng, Var n, std::uint64_t seed, bool positive) {
  n = std::max<Var>(6, n);
  for (;;) {
    try {
      return gen_exact_occ(n, 3, std::vector<unsigned>(n, 3), seed, positive);
    } catch (const GeneratorRefusal&) {
      seed = rng.next();
    }
  }
}

/// Fuzz corpus shared by the reduction-property and ledger suites.
inline Formula general_formula(Rng& rng) {
  DoccParams p;
  p.n = static_cast<Var>(rng.between(1, 14));
  p.d = static_cast<unsigned>(rng.between(2, 6));
  p.min_len = 1;
  p.max_len = 5;
  p.seed = rng.next();
  p.positive = rng.chance(1, 5);
  const std::size_t cap = std::min<std::size_t>(20, static_cast<std::size_t>(p.n) * p.d / 2);
  p.m = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::max<std::size_t>(1, cap))));
  return docc_sample(rng, p);
}

/// Runs solvers with a recording ledger. Ledger bounds are judged by criterion 5
/// only; elsewhere a violated bound must not keep a solver from answering.
struct Recorder {
  std::size_t ledger_failures = 0;

  int operator()(const std::function<int(SolveContext&)>& run) {
    SolveOptions opt;
    opt.ledger_mode = MeasureLedger::Mode::record;
    SolveContext ctx(opt);
    const int p = run(ctx);
    ledger_failures += ctx.ledger.failures();
    return p;
  }
  std::string note() const {
    return ledger_failures ? "; ledger failures recorded (judged by criterion 5)=" + std::to_string(ledger_failures) : "";
  }
};

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// 1. Oracle equivalence.

inline CriterionResult verify_oracle_equivalence(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{1, "oracle equivalence", false, "", 0};
  const std::size_t per_family = scaled(cfg, 10000);
  Failures fails;
  std::map<std::string, std::size_t> checks;
  Rng rng(cfg.seed + 1);
  Recorder rec;

  auto check_all = [&](const std::string& family, const Formula& f) {
    const int want = brute_parity(f);
    auto expect = [&](const char* solver, const std::function<int()>& run) {
      guarded(fails, family + "/" + solver + " on " + to_string(f), [&] {
        const int got = run();
        ++checks[solver];
        if (got != want) fails.add(family + "/" + solver + " gave " + std::to_string(got) + " on " + to_string(f));
      });
    };
    const unsigned d = std::max(2U, f.max_degree());
    expect("length", [&] { return rec([&](SolveContext& c) { return solve_length(f, c); }); });
    expect("docc", [&] { return rec([&](SolveContext& c) { return solve_docc(f, d, c); }); });
    if (d <= 2) expect("occ2", [&] { return rec([&](SolveContext& c) { return solve_occ2(f, c); }); });
    if (f.is_positive()) {
      expect("positive-fib", [&] { return rec([&](SolveContext& c) { return solve_positive_fib(f, d, c); }); });
    }
    const bool two_cnf =
        std::all_of(f.clauses().begin(), f.clauses().end(), [](const Clause& c) { return c.size() <= 2; });
    if (d <= 2 && two_cnf) expect("2cnf", [&] { return solve_2cnf(f); });
    const auto r = reduce(f);
    if (auto p = r.settled_parity()) expect("reduce", [&] { return *p; });
  };

  for (std::size_t i = 0; i < per_family; ++i) {
    // general CNF: n <= 14, degrees <= 6, lengths 1-5
    check_all("general", general_formula(rng));

    DoccParams two;
    two.n = static_cast<Var>(rng.between(1, 16));
    two.d = 2;
    two.min_len = 1;
    two.max_len = 4;
    two.seed = rng.next();
    two.m = static_cast<std::size_t>(rng.between(1, std::max<std::int64_t>(1, two.n * 2 / 2)));
    check_all("2-occ", docc_sample(rng, two));

    DoccParams pos;
    pos.n = static_cast<Var>(rng.between(1, 12));
    pos.d = static_cast<unsigned>(rng.between(2, 4));
    pos.min_len = 1;
    pos.max_len = 4;
    pos.positive = true;
    pos.seed = rng.next();
    pos.m = static_cast<std::size_t>(
        rng.between(1, std::min<std::int64_t>(20, std::max<std::int64_t>(1, pos.n * pos.d / 2))));
    check_all("positive", docc_sample(rng, pos));

    DoccParams cnf2;
    cnf2.n = static_cast<Var>(rng.between(1, 12));
    cnf2.d = 2;
    cnf2.min_len = 1;
    cnf2.max_len = 2;
    cnf2.seed = rng.next();
    cnf2.m = static_cast<std::size_t>(rng.between(1, cnf2.n * 2 / 2 + 1));
    check_all("2-cnf", docc_sample(rng, cnf2));
  }
  res.pass = fails.count() == 0;
  res.detail = std::to_string(per_family) + " instances x 4 families;";
  for (const auto& [k, v] : checks) res.detail += " " + k + "=" + std::to_string(v);
  res.detail += "; mismatches=" + std::to_string(fails.count()) + rec.note() + fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 2. Reduction soundness, rule by rule.

inline CriterionResult verify_rule_soundness(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{2, "reduction soundness", false, "", 0};
  const std::size_t want = scaled(cfg, 1000);
  const std::size_t max_formulas = scaled(cfg, 400000);
  std::array<std::size_t, 13> fired{};
  Failures fails;
  Rng rng(cfg.seed + 2);
  std::size_t t = 0;
  auto done = [&] { return std::all_of(fired.begin(), fired.end(), [&](std::size_t c) { return c >= want; }); };
  for (; t < max_formulas && !done(); ++t) {
    const Formula f = rule_corpus_formula(rng, t);
    const int before = brute_parity(f);
    for (RuleId r : kAllRules) {
      auto& count = fired[static_cast<std::size_t>(r) - 1];
      if (count >= want) continue;
      guarded(fails, rule_name(r) + " on " + to_string(f), [&] {
        const RuleResult out = apply_rule(f, r);
        if (!out.applied()) return;
        ++count;
        const int after = out.kind == RuleResult::Kind::verdict ? 0 : brute_parity(out.formula);
        if (after != before) fails.add(rule_name(r) + " (" + out.detail + ") changed parity of " + to_string(f));
      });
    }
  }
  res.pass = fails.count() == 0 && done();
  res.detail = std::to_string(t) + " formulas; firings";
  for (std::size_t i = 0; i < fired.size(); ++i) res.detail += " R" + std::to_string(i + 1) + "=" + std::to_string(fired[i]);
  res.detail += " (need " + std::to_string(want) + " each); mismatches=" + std::to_string(fails.count()) + fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 3. Reduced-formula properties.

inline CriterionResult verify_reduced_properties(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{3, "reduced-formula properties", false, "", 0};
  const std::size_t total = scaled(cfg, 6000);
  Failures fails;
  std::size_t nontrivial = 0;
  Rng rng(cfg.seed + 3);
  for (std::size_t t = 0; t < total; ++t) {
    Formula f;
    switch (t % 4) {
      case 0: f = general_formula(rng); break;
      case 1: f = rule_corpus_formula(rng, t / 4); break;
      case 2: f = exact_two_occ(rng, static_cast<Var>(rng.between(3, 14)), 5); break;
      default: {
        const auto n = static_cast<Var>(rng.between(4, 12));
        f = exact_three_occ(rng, n, rng.next(), rng.coin());
      }
    }
    guarded(fails, "reduce " + to_string(f), [&] {
      const auto r = reduce(f);
      if (r.verdict_zero) return;
      nontrivial += r.formula.empty() ? 0U : 1U;
      const ReducedReport rep = is_reduced(r.formula);
      if (!rep.all()) fails.add(to_string(r.formula) + ": " + rep.summary());
    });
  }
  res.pass = fails.count() == 0;
  res.detail = std::to_string(total) + " reduce outputs (" + std::to_string(nontrivial) +
               " non-empty); property failures=" + std::to_string(fails.count()) + fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 4. Branching identities.

inline CriterionResult verify_branching_identities(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{4, "branching identities", false, "", 0};
  const std::size_t want = scaled(cfg, 5000);
  std::size_t var_pairs = 0, clause_pairs = 0, simple_pairs = 0;
  Failures fails;
  Rng rng(cfg.seed + 4);
  auto xor_of = [](const BranchSet& b) {
    int x = 0;
    for (const auto& c : b.children) x ^= brute_parity(c);
    return x;
  };
  while (var_pairs < want || clause_pairs < want || simple_pairs < want) {
    const auto n = static_cast<Var>(rng.between(1, 10));
    const Formula f = gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 14)), 1, 4, false);
    const int p = brute_parity(f);
    const auto x = static_cast<Var>(rng.between(1, n));
    guarded(fails, "simple branch", [&] {
      ++simple_pairs;
      if (xor_of(simple_branch(f, x)) != p) fails.add("simple on x" + std::to_string(x) + " of " + to_string(f));
    });
    if (f.degree(x) > 0) {
      guarded(fails, "variable branch", [&] {
        ++var_pairs;
        if (xor_of(variable_branch(f, x)) != p) fails.add("variable on x" + std::to_string(x) + " of " + to_string(f));
      });
    }
    const Clause& c = f.clause(static_cast<std::size_t>(rng.below(f.num_clauses())));
    if (!c.is_tautology()) {
      guarded(fails, "clause branch", [&] {
        ++clause_pairs;
        if (xor_of(clause_branch(f, c)) != p) fails.add("clause on " + to_string(c) + " of " + to_string(f));
      });
    }
  }
  res.pass = fails.count() == 0;
  res.detail = "variable pairs=" + std::to_string(var_pairs) + " clause pairs=" + std::to_string(clause_pairs) +
               " simple pairs=" + std::to_string(simple_pairs) + "; failures=" + std::to_string(fails.count()) +
               fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 5. Measure ledgers.

inline CriterionResult verify_ledgers(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{5, "measure ledgers", false, "", 0};
  SolveOptions opt;
  opt.ledger_mode = MeasureLedger::Mode::record;
  SolveContext occ(opt), len(opt), chain(opt);
  Failures fails;
  Rng rng(cfg.seed + 5);

  // (a) 4+-clause branching and (b) bisection cases on 2-occ inputs
  const std::size_t occ_n = scaled(cfg, 6000);
  for (std::size_t i = 0; i < occ_n; ++i) {
    const Formula f = exact_two_occ(rng, static_cast<Var>(rng.between(6, 40)), 6);
    guarded(fails, "solve_occ2 " + to_string(f), [&] { solve_occ2(f, occ); });
  }
  const std::size_t cubic_n = scaled(cfg, 300);
  for (std::size_t i = 0; i < cubic_n; ++i) {
    const std::size_t m3 = 18 + 2 * (i % 12);
    const auto f = gen_reduced_cubic(m3, rng.next());
    if (!f) continue;
    guarded(fails, "solve_occ2 cubic", [&] { solve_occ2(*f, occ); });
  }
  // (c) length steps. Clause counts are set so that most variables use their
  // whole budget; sparser samples reduce away before any step fires.
  const std::size_t len_n = scaled(cfg, 8000);
  for (std::size_t i = 0; i < len_n; ++i) {
    const std::uint64_t seed = rng.next();
    const auto n = static_cast<Var>(rng.between(16, 32));
    Formula f;
    switch (i % 5) {
      case 0:
      case 1: {
        DoccParams p;
        p.n = n;
        p.d = i % 5 == 0 ? 3 : 4;
        p.min_len = p.d == 3 ? 3 : 2;
        p.max_len = p.d == 3 ? 5 : 4;
        p.m = static_cast<std::size_t>(n) * p.d * 2 / (p.min_len + p.max_len) - 1;
        p.seed = seed;
        p.positive = rng.chance(1, 2);
        f = docc_sample(rng, p);
        break;
      }
      case 2:
      case 3:
        f = exact_three_occ(rng, n, seed, i % 5 == 3);
        break;
      default: {
        DoccParams p;
        p.n = n;
        p.d = static_cast<unsigned>(rng.between(3, 5));
        p.min_len = 1;
        p.max_len = p.d == 3 ? 5 : 3;
        p.seed = seed;
        p.positive = rng.chance(1, 3);
        f = docc_sample(rng, p);
      }
    }
    guarded(fails, "solve_length " + to_string(f), [&] { solve_length(f, len); });
  }
  // the bounded-occurrence chain
  const std::size_t chain_n = scaled(cfg, 2000);
  for (std::size_t i = 0; i < chain_n; ++i) {
    DoccParams p;
    p.n = static_cast<Var>(rng.between(3, 12));
    p.d = static_cast<unsigned>(rng.between(2, 4));
    p.min_len = 1;
    p.max_len = 4;
    p.seed = rng.next();
    p.m = std::min<std::size_t>(20, static_cast<std::size_t>(p.n) * p.d / 3);
    const Formula f = docc_sample(rng, p);
    guarded(fails, "solve_docc " + to_string(f), [&] { solve_docc(f, p.d, chain); });
    if (f.is_positive()) {
      guarded(fails, "solve_positive_fib " + to_string(f), [&] { solve_positive_fib(f, p.d, chain); });
    } else {
      guarded(fails, "solve_positive_fib on leaves of " + to_string(f), [&] {
        for (const auto& leaf : reduce_to_positive(f).leaves) solve_positive_fib(leaf, p.d, chain);
      });
    }
  }
  // (d) mu never rises across a reduction step
  std::size_t reductions = 0;
  const std::size_t mono_n = scaled(cfg, 3000);
  for (std::size_t i = 0; i < mono_n; ++i) {
    const Formula f = general_formula(rng);
    guarded(fails, "reduce " + to_string(f), [&] {
      const auto r = reduce(f);
      ++reductions;
      for (std::size_t k = 1; k < r.mu_log.size(); ++k) {
        if (r.mu_log[k] > r.mu_log[k - 1]) fails.add("mu rose at step " + std::to_string(k) + " of " + to_string(f));
      }
    });
  }

  std::size_t ledger_failures = 0, within_factor = 0;
  std::string tally;
  std::vector<std::string> missing;
  auto collect = [&](const char* corpus, const SolveContext& ctx, const std::vector<std::string>& required) {
    tally += std::string(tally.empty() ? "" : ";") + " " + corpus + ":";
    ledger_failures += ctx.ledger.failures();
    for (const auto& s : ctx.ledger.first_failures()) fails.add(s);
    for (const auto& [scheme, t] : ctx.ledger.tally()) {
      tally += " " + scheme + "=" + std::to_string(t.entries);
      within_factor += t.failures_within_factor;
      if (t.failures) {
        tally += "/" + std::to_string(t.failures) + "fail(" + std::to_string(t.failures_within_factor) +
                 " within step factor)";
      }
    }
    for (const auto& s : required) {
      if (!ctx.ledger.tally().count(s)) missing.push_back(s);
    }
  };
  collect("occ", occ, {"occ2.4plus", "occ2.bisect"});
  collect("len", len, {"length.step1", "length.step2", "length.step3.1", "length.step3.2", "length.step4", "length.step5.1",
                "length.step5.2"});
  collect("chain", chain, {"docc.positive", "docc.fib"});
  const std::size_t reductions_in_solvers = occ.stats.reductions + len.stats.reductions + chain.stats.reductions;

  res.pass = fails.count() == 0 && ledger_failures == 0 && missing.empty();
  res.detail = "entries" + tally + "; reductions checked=" + std::to_string(reductions + reductions_in_solvers) +
               "; ledger failures=" + std::to_string(ledger_failures) + " (" + std::to_string(within_factor) +
               " of them within the step's claimed factor)";
  if (!missing.empty()) {
    res.detail += "; never exercised:";
    for (const auto& s : missing) res.detail += " " + s;
  }
  res.detail += fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 6. Growth curves and branching factors.

struct GrowthCurve {
  std::string name;
  double base = 0;
  std::size_t points = 0;
  std::size_t max_size = 0;
  /// max over the corpus of leaves / base^size
  double constant = 0;
};

inline CriterionResult verify_growth(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{6, "growth curves", false, "", 0};
  Failures fails;
  Rng rng(cfg.seed + 6);
  GrowthCurve m3c{"3-CNF 2-occ leaves/1.1487^m3", 1.1487, 0, 0, 0};
  GrowthCurve mc{"2-occ leaves/1.3248^m", 1.3248, 0, 0, 0};
  GrowthCurve nc{"2-occ leaves/1.1193^n", 1.1193, 0, 0, 0};
  GrowthCurve lc{"CNF leaves/1.1052^L", 1.1052, 0, 0, 0};
  auto add = [](GrowthCurve& c, std::size_t size, std::size_t leaves) {
    ++c.points;
    c.max_size = std::max(c.max_size, size);
    c.constant = std::max(c.constant, static_cast<double>(leaves) / std::pow(c.base, static_cast<double>(size)));
  };

  SolveOptions recording;
  recording.ledger_mode = MeasureLedger::Mode::record;
  std::size_t ledger_failures = 0;
  const std::size_t reps = scaled(cfg, 6);
  for (std::size_t m3 = 4; m3 <= 50; m3 += 2) {
    for (std::size_t k = 0; k < reps; ++k) {
      const auto f = gen_reduced_cubic(m3, rng.next());
      if (!f) continue;
      guarded(fails, "cubic m3=" + std::to_string(m3), [&] {
        SolveContext ctx(recording);
        solve_occ2(*f, ctx);
        ledger_failures += ctx.ledger.failures();
        add(m3c, m3, ctx.stats.leaves);
      });
    }
  }
  for (Var n = 4; n <= 60; n += 2) {
    for (std::size_t k = 0; k < reps; ++k) {
      const auto r = reduce(exact_two_occ(rng, n));
      if (r.settled_parity()) continue;
      guarded(fails, "2-occ n=" + std::to_string(n), [&] {
        SolveContext ctx(recording);
        solve_occ2(r.formula, ctx);
        ledger_failures += ctx.ledger.failures();
        add(mc, r.formula.num_clauses(), ctx.stats.leaves);
        add(nc, r.formula.num_vars(), ctx.stats.leaves);
      });
    }
  }
  for (Var n = 6; n <= 48; n += 2) {
    for (std::size_t k = 0; k < reps; ++k) {
      DoccParams p;
      p.n = n;
      p.d = static_cast<unsigned>(rng.between(3, 4));
      p.min_len = 2;
      p.max_len = 3;
      p.seed = rng.next();
      const auto r = reduce(docc_sample(rng, p));
      if (r.settled_parity() || r.formula.length() > 120) continue;
      guarded(fails, "CNF n=" + std::to_string(n), [&] {
        SolveContext ctx(recording);
        solve_length(r.formula, ctx);
        ledger_failures += ctx.ledger.failures();
        add(lc, r.formula.length(), ctx.stats.leaves);
      });
    }
  }

  // factors of the per-step worst-case vectors, against roots computed
  // separately (scipy brentq) and against the four-decimal quoted values
  const std::vector<double> frozen = {1.100276236, 1.096824980, 1.098266680, 1.103088425,
                                      1.103088425, 1.105182214, 1.098266680};
  double worst_frozen = 0, worst_quoted = 0;
  bool quoted_above = true;
  for (std::size_t i = 0; i < step_vectors().size(); ++i) {
    const auto& sv = step_vectors()[i];
    const double tau = branching_factor(sv.drops);
    worst_frozen = std::max(worst_frozen, std::abs(tau - frozen[i]));
    worst_quoted = std::max(worst_quoted, std::abs(tau - sv.quoted));
    quoted_above = quoted_above && sv.quoted > tau && sv.quoted - tau < 1e-4;
  }

  bool curves_ok = true;
  for (const auto* c : {&m3c, &mc, &nc, &lc}) {
    curves_ok = curves_ok && c->points > 0 && c->constant <= 1000.0;
    res.detail += c->name + ": C=" + fmt(c->constant) + " over " + std::to_string(c->points) + " points up to " +
                  std::to_string(c->max_size) + "; ";
  }
  res.detail += "tau vs frozen roots max err=" + fmt(worst_frozen * 1e9, 1) +
                "e-9, quoted factors sit above the roots by at most " + fmt(worst_quoted * 1e6, 1) + "e-6";
  res.pass = fails.count() == 0 && curves_ok && worst_frozen < 1e-6 && quoted_above;
  if (ledger_failures) res.detail += "; ledger failures recorded (judged by criterion 5)=" + std::to_string(ledger_failures);
  res.detail += fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 7. Parity identities.

inline std::vector<SimpleGraph> load_graph_catalogue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph catalogue '" + path + "'");
  std::vector<SimpleGraph> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(parse_graph6(line));
  }
  return out;
}

inline CriterionResult verify_parity_identities(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{7, "parity identities", false, "", 0};
  Failures fails;
  std::map<int, std::size_t> per_order;
  std::size_t ie_checks = 0, ie_direct = 0;
  OracleLimits wide;
  wide.max_graph_edges = 64;

  guarded(fails, "graph catalogue", [&] {
    for (const auto& g : load_graph_catalogue(cfg.graph_catalogue)) {
      if (g.has_isolated_vertex() || !connected(g)) {
        fails.add("catalogue graph is disconnected or has an isolated vertex");
        continue;
      }
      ++per_order[g.num_vertices];
      const std::uint64_t ec = edge_covers_by_sweep(g);
      if (count_vertex_covers(g) % 2 != ec % 2) fails.add("vc/ec parity differs on a catalogue graph");
      if (inclusion_exclusion_edge_covers(g, wide) != ec) fails.add("inclusion-exclusion differs on a catalogue graph");
      ++ie_checks;
    }
  });
  // connected graphs on 2..8 vertices, up to isomorphism
  const std::map<int, std::size_t> expected = {{2, 1}, {3, 2}, {4, 6}, {5, 21}, {6, 112}, {7, 853}, {8, 11117}};
  const bool full_catalogue = per_order == expected;

  Rng rng(cfg.seed + 7);
  const std::size_t random_graphs = scaled(cfg, 1000);
  for (std::size_t i = 0; i < random_graphs; ++i) {
    const SimpleGraph g = random_graph_without_isolated(rng, 2, 12);
    guarded(fails, "random graph", [&] {
      const std::uint64_t ec = edge_covers_by_sweep(g);
      if (count_vertex_covers(g) % 2 != ec % 2) fails.add("vc/ec parity differs on a random graph");
      if (g.edges.size() <= 20) {
        ++ie_direct;
        if (inclusion_exclusion_edge_covers(g) != count_edge_covers(g)) {
          fails.add("inclusion-exclusion differs from enumeration");
        }
      }
    });
  }

  const std::size_t systems = scaled(cfg, 1000);
  for (std::size_t i = 0; i < systems; ++i) {
    SetSystem s;
    const auto u = static_cast<int>(rng.between(1, 12));
    for (int e = 0; e < u; ++e) s.universe.push_back(e);
    const auto k = static_cast<std::size_t>(rng.between(1, 16));
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<int> set;
      for (int e = 0; e < u; ++e) {
        if (rng.chance(1, 3)) set.push_back(e);
      }
      if (set.empty()) set.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(u))));
      s.family.push_back(std::move(set));
    }
    // cover any element no set reached
    for (int e = 0; e < u; ++e) {
      bool hit = false;
      for (const auto& set : s.family) hit = hit || std::find(set.begin(), set.end(), e) != set.end();
      if (!hit) s.family[static_cast<std::size_t>(rng.below(s.family.size()))].push_back(e);
    }
    for (auto& set : s.family) std::sort(set.begin(), set.end());
    guarded(fails, "set system", [&] {
      if (count_hitting_sets(s) % 2 != count_set_covers(s) % 2) fails.add("HS/SC parity differs");
    });
  }

  res.pass = fails.count() == 0 && full_catalogue;
  res.detail = "catalogue graphs=" + std::to_string(ie_checks) + (full_catalogue ? " (complete)" : " (INCOMPLETE)") +
               ", random graphs=" + std::to_string(random_graphs) + " (" + std::to_string(ie_direct) +
               " also by edge enumeration), set systems=" + std::to_string(systems) +
               "; failures=" + std::to_string(fails.count()) + fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 8. Edge-cover pipeline.

inline CriterionResult verify_edge_cover_pipeline(const VerifyConfig& cfg) {
  using namespace verify_detail;
  CriterionResult res{8, "edge-cover pipeline", false, "", 0};
  Failures fails;
  Rng rng(cfg.seed + 8);
  Recorder rec;
  const std::size_t total = scaled(cfg, 500);
  std::size_t max_edges = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const SimpleGraph g = random_graph_without_isolated(rng, 2, 10);
    max_edges = std::max(max_edges, g.edges.size());
    guarded(fails, "pipeline", [&] {
      const Formula f = gen_edge_cover_formula(g);
      const int got = rec([&](SolveContext& c) { return solve_occ2(f, c); });
      const int want = static_cast<int>(count_vertex_covers(g) % 2);
      if (got != want) fails.add("graph with " + std::to_string(g.edges.size()) + " edges: occ2 " +
                                 std::to_string(got) + " vs vertex covers " + std::to_string(want));
    });
  }
  res.pass = fails.count() == 0;
  res.detail = std::to_string(total) + " graphs (up to " + std::to_string(max_edges) +
               " edges); mismatches=" + std::to_string(fails.count()) + rec.note() + fails.summary();
  return res;
}

// ---------------------------------------------------------------------------
// 9. Determinism and format.

inline CriterionResult verify_determinism(const VerifyConfig& cfg, double elapsed_before) {
  using namespace verify_detail;
  CriterionResult res{9, "determinism and format", false, "", 0};
  const auto start = std::chrono::steady_clock::now();
  Failures fails;
  Rng rng(cfg.seed + 9);
  const std::size_t round_trips = scaled(cfg, 1000);
  for (std::size_t i = 0; i < round_trips; ++i) {
    const auto n = static_cast<Var>(rng.between(0, 20));
    const Formula f = n == 0 ? Formula{} : gen_random_cnf(rng, n, static_cast<std::size_t>(rng.between(0, 25)), 1, 6, i % 2 == 0);
    guarded(fails, "round trip", [&] {
      const std::string text = write_dimacs(f);
      if (!(parse_dimacs(text) == f) || write_dimacs(parse_dimacs(text)) != text) {
        fails.add("round trip changed " + to_string(f));
      }
    });
  }
  const std::size_t reports = scaled(cfg, 60);
  for (std::size_t i = 0; i < reports; ++i) {
    const auto cubic = i % 3 == 0 ? gen_reduced_cubic(12 + 2 * (i % 8), 1000 + i) : std::nullopt;
    const Formula f = cubic ? *cubic : general_formula(rng);
    std::vector<SolverKind> usable{SolverKind::automatic, SolverKind::length};
    if (f.max_degree() <= 2) usable.push_back(SolverKind::occ2);
    if (f.num_clauses() <= 20) usable.push_back(SolverKind::docc);
    if (f.is_positive()) usable.push_back(SolverKind::positive_fib);
    if (f.num_vars() <= 20) usable.push_back(SolverKind::brute);
    RunConfig rc;
    rc.solver = usable[i % usable.size()];
    rc.options.seed = 77 + i;
    rc.options.ledger_mode = MeasureLedger::Mode::record;
    rc.instance = "det-" + std::to_string(i);
    guarded(fails, "report", [&] {
      std::string trace_a, trace_b;
      rc.sink = [&](const NodeRecord& r) { trace_a += to_json(r).dump() + "\n"; };
      const std::string a = to_json(run_solver(f, rc)).dump();
      rc.sink = [&](const NodeRecord& r) { trace_b += to_json(r).dump() + "\n"; };
      const std::string b = to_json(run_solver(f, rc)).dump();
      if (a != b || trace_a != trace_b) fails.add("reports differ for " + rc.instance);
    });
  }
  const double own = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double total = elapsed_before + own;
  res.pass = fails.count() == 0 && total < cfg.budget_seconds;
  res.detail = std::to_string(round_trips) + " DIMACS round trips, " + std::to_string(reports) +
               " repeated reports; failures=" + std::to_string(fails.count()) + "; suite wall time " + fmt(total, 1) +
               " s (budget " + fmt(cfg.budget_seconds, 0) + " s)" + fails.summary();
  return res;
}

// ---------------------------------------------------------------------------

/// Runs the selected criteria (all when `only` is empty) in order, calling
/// `report` after each one.
inline std::vector<CriterionResult> run_verify(const VerifyConfig& cfg, const std::vector<int>& only = {},
                                               const std::function<void(const CriterionResult&)>& report = {}) {
  std::vector<CriterionResult> out;
  double elapsed = 0;
  for (int id = 1; id <= 9; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = verify_oracle_equivalence(cfg); break;
        case 2: r = verify_rule_soundness(cfg); break;
        case 3: r = verify_reduced_properties(cfg); break;
        case 4: r = verify_branching_identities(cfg); break;
        case 5: r = verify_ledgers(cfg); break;
        case 6: r = verify_growth(cfg); break;
        case 7: r = verify_parity_identities(cfg); break;
        case 8: r = verify_edge_cover_pipeline(cfg); break;
        default: r = verify_determinism(cfg, elapsed); break;
      }
    } catch (const std::exception& e) {
      r.id = id;
      static const char* titles[] = {"oracle equivalence", "reduction soundness", "reduced-formula properties",
                                     "branching identities", "measure ledgers", "growth curves",
                                     "parity identities", "edge-cover pipeline", "determinism and format"};
      r.title = titles[id - 1];
      r.pass = false;
      r.detail = std::string("aborted: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    elapsed += r.seconds;
    out.push_back(r);
    if (report) report(r);
  }
  return out;
}

inline std::string format_result(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" + r.title + ", " +
         verify_detail::fmt(r.seconds, 1) + " s): " + r.detail;
}

}  // namespace xparity
