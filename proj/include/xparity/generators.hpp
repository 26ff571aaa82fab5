#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xparity/formula.hpp"
#include "xparity/oracle.hpp"
#include "xparity/reducer.hpp"
#include "xparity/rng.hpp"

namespace xparity {

class GeneratorRefusal : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DoccParams {
  Var n = 10;
  unsigned d = 2;
  unsigned min_len = 2;
  unsigned max_len = 3;
  std::uint64_t seed = 1;
  /// Number of clauses; by default as many as the budget n*d allows at max_len.
  std::optional<std::size_t> m;
  bool positive = false;
  /// Chance, in thousandths, that a literal is negated (ignored when positive).
  unsigned negative_permille = 500;
};

/// Random formula in which every variable occurs at most d times. Variables are
/// drawn with probability proportional to their remaining budget.
inline Formula gen_random_docc(const DoccParams& p) {
  if (p.d < 1) throw GeneratorRefusal("gen_random_docc: d must be positive");
  if (p.min_len < 1 || p.min_len > p.max_len) throw GeneratorRefusal("gen_random_docc: bad length range");
  const std::size_t budget = static_cast<std::size_t>(p.n) * p.d;
  const std::size_t m = p.m.value_or(budget / p.max_len);
  if (m * p.min_len > budget) {
    throw GeneratorRefusal("gen_random_docc: " + std::to_string(m) + " clauses of length >= " +
                           std::to_string(p.min_len) + " exceed the occurrence budget " + std::to_string(budget));
  }
  Rng rng(p.seed);
  // Greedy sampling can strand a clause with too few open variables; retry from
  // the current stream position, which keeps the output a function of the seed.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<unsigned> left(p.n + 1, p.d);
    left[0] = 0;
    std::vector<Clause> clauses;
    std::size_t remaining = budget;
    bool stuck = false;
    for (std::size_t i = 0; i < m && !stuck; ++i) {
      auto len = static_cast<unsigned>(rng.between(p.min_len, p.max_len));
      // keep enough budget for the clauses still to come
      const std::size_t reserve = (m - i - 1) * p.min_len;
      if (remaining < reserve + len) len = static_cast<unsigned>(remaining - reserve);
      std::size_t open = 0;
      for (Var v = 1; v <= p.n; ++v) open += left[v] > 0 ? 1U : 0U;
      if (open < len) len = static_cast<unsigned>(open);
      if (len < p.min_len) {
        stuck = true;
        break;
      }
      std::vector<Literal> lits;
      std::vector<unsigned> w = left;
      for (unsigned k = 0; k < len; ++k) {
        std::uint64_t total = 0;
        for (Var v = 1; v <= p.n; ++v) total += w[v];
        std::uint64_t r = rng.below(total);
        Var pick = 1;
        for (Var v = 1; v <= p.n; ++v) {
          if (r < w[v]) {
            pick = v;
            break;
          }
          r -= w[v];
        }
        w[pick] = 0;
        --left[pick];
        --remaining;
        const bool neg = !p.positive && rng.chance(p.negative_permille, 1000);
        lits.push_back(Literal::make(pick, neg));
      }
      clauses.emplace_back(std::move(lits));
    }
    if (stuck) continue;
    Formula f(Formula::iota_vars(p.n), std::move(clauses));
    if (f.num_clauses() == m) return f;
  }
  throw GeneratorRefusal("gen_random_docc: could not place " + std::to_string(m) + " clauses within the budget");
}

/// Every variable occurs exactly d times; clause lengths are given. Slots are
/// shuffled and dealt, retrying until no clause repeats a variable.
inline Formula gen_exact_occ(Var n, unsigned d, const std::vector<unsigned>& lengths, std::uint64_t seed,
                             bool positive = false) {
  std::size_t total = 0;
  for (unsigned l : lengths) total += l;
  if (total != static_cast<std::size_t>(n) * d) {
    throw GeneratorRefusal("gen_exact_occ: clause lengths sum to " + std::to_string(total) + ", need " +
                           std::to_string(static_cast<std::size_t>(n) * d));
  }
  Rng rng(seed);
  std::vector<Var> slots;
  for (Var v = 1; v <= n; ++v) {
    for (unsigned k = 0; k < d; ++k) slots.push_back(v);
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    rng.shuffle(slots);
    std::vector<Clause> clauses;
    std::size_t at = 0;
    bool ok = true;
    for (unsigned l : lengths) {
      std::vector<Var> vs(slots.begin() + static_cast<long>(at), slots.begin() + static_cast<long>(at + l));
      at += l;
      std::sort(vs.begin(), vs.end());
      if (std::adjacent_find(vs.begin(), vs.end()) != vs.end()) {
        ok = false;
        break;
      }
      std::vector<Literal> lits;
      for (Var v : vs) lits.push_back(Literal::make(v, !positive && rng.coin()));
      clauses.emplace_back(std::move(lits));
    }
    if (!ok) continue;
    Formula f(Formula::iota_vars(n), clauses);
    if (f.num_clauses() == clauses.size()) return f;
  }
  throw GeneratorRefusal("gen_exact_occ: could not deal slots without repeats");
}

/// Unconstrained random CNF with clause lengths in [lo, hi]. With allow_junk,
/// literals may repeat or clash inside a clause so that every rule fires.
inline Formula gen_random_cnf(Rng& rng, Var n, std::size_t m, unsigned lo, unsigned hi, bool allow_junk = true) {
  std::vector<Clause> cs;
  for (std::size_t i = 0; i < m; ++i) {
    const auto len = static_cast<unsigned>(rng.between(lo, hi));
    std::vector<Literal> lits;
    while (lits.size() < len) {
      const auto v = static_cast<Var>(rng.between(1, n));
      const Literal l = Literal::make(v, rng.coin());
      if (!allow_junk && std::any_of(lits.begin(), lits.end(), [v](Literal k) { return k.var() == v; })) {
        if (lits.size() >= n) break;
        continue;
      }
      lits.push_back(l);
    }
    cs.emplace_back(std::move(lits));
  }
  return Formula(Formula::iota_vars(n), std::move(cs));
}

/// Reduced 3-CNF in which every variable occurs exactly twice (n = 3*m3/2),
/// from the first of 200 seeds starting at `seed` that is already reduced.
inline std::optional<Formula> gen_reduced_cubic(std::size_t m3, std::uint64_t seed) {
  if (m3 % 2 != 0) throw GeneratorRefusal("gen_reduced_cubic: m3 must be even");
  const auto n = static_cast<Var>(m3 * 3 / 2);
  for (std::uint64_t s = seed; s < seed + 200; ++s) {
    const Formula f = gen_exact_occ(n, 2, std::vector<unsigned>(m3, 3), s);
    if (reduce(f).trace.empty()) return f;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Graphs.

/// phi_G: one variable per edge, one clause per vertex listing its incident edges.
inline Formula gen_edge_cover_formula(const SimpleGraph& g) {
  if (g.has_isolated_vertex()) throw GeneratorRefusal("gen_edge_cover_formula: graph has an isolated vertex");
  std::vector<std::vector<Literal>> per_vertex(static_cast<std::size_t>(g.num_vertices));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto [u, v] = g.edges[i];
    if (u == v) throw GeneratorRefusal("gen_edge_cover_formula: loop at vertex " + std::to_string(u));
    const Literal x = Literal::positive(static_cast<Var>(i + 1));
    per_vertex[static_cast<std::size_t>(u)].push_back(x);
    per_vertex[static_cast<std::size_t>(v)].push_back(x);
  }
  std::vector<Clause> clauses;
  for (auto& lits : per_vertex) clauses.emplace_back(std::move(lits));
  return Formula(Formula::iota_vars(static_cast<Var>(g.edges.size())), std::move(clauses));
}

/// G(n, p) with p = num/den.
inline SimpleGraph gen_random_graph(int n, std::uint64_t num, std::uint64_t den, std::uint64_t seed) {
  Rng rng(seed);
  SimpleGraph g;
  g.num_vertices = n;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.chance(num, den)) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

/// One graph in graph6 format (up to 62 vertices).
inline SimpleGraph parse_graph6(const std::string& line) {
  if (line.empty() || line[0] < 63 || line[0] > 125) throw GeneratorRefusal("bad graph6 line '" + line + "'");
  SimpleGraph g;
  g.num_vertices = line[0] - 63;
  std::size_t bit = 0;
  auto next = [&]() {
    const std::size_t at = 1 + bit / 6;
    if (at >= line.size()) throw GeneratorRefusal("truncated graph6 line '" + line + "'");
    const int chunk = line[at] - 63;
    const bool b = ((chunk >> (5 - bit % 6)) & 1) != 0;
    ++bit;
    return b;
  };
  for (int v = 1; v < g.num_vertices; ++v) {
    for (int u = 0; u < v; ++u) {
      if (next()) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

/// "k5" complete, "c6" cycle, "p4" path, "s3" star with 3 leaves, or an edge list "0-1,1-2,2-0".
inline SimpleGraph parse_graph_spec(const std::string& spec) {
  SimpleGraph g;
  auto number = [&spec](std::size_t from) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(spec.substr(from), &used);
    } catch (const std::exception&) {
      throw GeneratorRefusal("bad graph spec '" + spec + "'");
    }
    if (from + used != spec.size() || k < 1) throw GeneratorRefusal("bad graph spec '" + spec + "'");
    return k;
  };
  if (spec.empty()) throw GeneratorRefusal("empty graph spec");
  if (spec.find('-') == std::string::npos) {
    const char kind = static_cast<char>(std::tolower(static_cast<unsigned char>(spec[0])));
    const int k = number(1);
    switch (kind) {
      case 'k':
        g.num_vertices = k;
        for (int u = 0; u < k; ++u) {
          for (int v = u + 1; v < k; ++v) g.edges.emplace_back(u, v);
        }
        return g;
      case 'c':
        if (k < 3) throw GeneratorRefusal("cycle needs at least 3 vertices");
        g.num_vertices = k;
        for (int u = 0; u < k; ++u) g.edges.emplace_back(u, (u + 1) % k);
        return g;
      case 'p':
        g.num_vertices = k;
        for (int u = 0; u + 1 < k; ++u) g.edges.emplace_back(u, u + 1);
        return g;
      case 's':
        g.num_vertices = k + 1;
        for (int u = 1; u <= k; ++u) g.edges.emplace_back(0, u);
        return g;
      default:
        throw GeneratorRefusal("unknown graph family '" + spec + "'");
    }
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    if (dash == std::string::npos) throw GeneratorRefusal("bad edge '" + item + "'");
    try {
      const int u = std::stoi(item.substr(0, dash));
      const int v = std::stoi(item.substr(dash + 1));
      if (u < 0 || v < 0) throw GeneratorRefusal("negative vertex in '" + item + "'");
      g.edges.emplace_back(u, v);
      g.num_vertices = std::max({g.num_vertices, u + 1, v + 1});
    } catch (const std::logic_error&) {
      throw GeneratorRefusal("bad edge '" + item + "'");
    }
    pos = comma + 1;
  }
  return g;
}

}  // namespace xparity
