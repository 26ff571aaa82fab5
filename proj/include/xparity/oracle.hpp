#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "xparity/formula.hpp"

// Brute-force ground truth. Everything here enumerates; nothing is clever.

namespace xparity {

using BigCount = boost::multiprecision::cpp_int;

class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleLimits {
  std::size_t max_vars = 24;
  std::size_t max_universe = 20;
  std::size_t max_family = 20;
  std::size_t max_graph_vertices = 20;
  std::size_t max_graph_edges = 20;
};

struct SetSystem {
  std::vector<int> universe;
  std::vector<std::vector<int>> family;

  /// Every family member is a subset of the universe.
  bool valid() const {
    for (const auto& s : family) {
      for (int e : s) {
        if (std::find(universe.begin(), universe.end(), e) == universe.end()) return false;
      }
    }
    return true;
  }
  bool has_empty_set() const {
    return std::any_of(family.begin(), family.end(), [](const auto& s) { return s.empty(); });
  }
  bool has_uncovered_element() const {
    for (int e : universe) {
      bool hit = false;
      for (const auto& s : family) hit = hit || std::find(s.begin(), s.end(), e) != s.end();
      if (!hit) return true;
    }
    return false;
  }
};

/// Vertices are 0..num_vertices-1. Parallel edges are allowed only when the
/// graph is used as a multigraph; loops are never allowed.
struct SimpleGraph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;

  bool is_simple() const {
    auto es = edges;
    for (auto& [u, v] : es) {
      if (u == v) return false;
      if (u > v) std::swap(u, v);
    }
    std::sort(es.begin(), es.end());
    return std::adjacent_find(es.begin(), es.end()) == es.end();
  }
  bool has_isolated_vertex() const {
    std::vector<int> deg(static_cast<std::size_t>(num_vertices), 0);
    for (auto [u, v] : edges) {
      ++deg[static_cast<std::size_t>(u)];
      ++deg[static_cast<std::size_t>(v)];
    }
    return std::any_of(deg.begin(), deg.end(), [](int d) { return d == 0; });
  }
};

namespace detail {

struct MaskedClause {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

inline std::vector<MaskedClause> mask_clauses(const Formula& f) {
  std::vector<std::size_t> bit(f.max_variable() + 1, 0);
  for (std::size_t i = 0; i < f.num_vars(); ++i) bit[f.variables()[i]] = i;
  std::vector<MaskedClause> out;
  out.reserve(f.num_clauses());
  for (const auto& c : f.clauses()) {
    MaskedClause mc;
    for (Literal l : c) (l.is_negative() ? mc.neg : mc.pos) |= std::uint64_t{1} << bit[l.var()];
    out.push_back(mc);
  }
  return out;
}

inline std::uint64_t mask_of(const std::vector<int>& members, const std::vector<int>& index_space) {
  std::uint64_t m = 0;
  for (int e : members) {
    auto it = std::find(index_space.begin(), index_space.end(), e);
    m |= std::uint64_t{1} << static_cast<unsigned>(it - index_space.begin());
  }
  return m;
}

inline void refuse_if(bool cond, const std::string& what) {
  if (cond) throw OracleRefusal(what);
}

}  // namespace detail

/// Number of satisfying assignments over the full variable set.
inline BigCount brute_count(const Formula& f, const OracleLimits& lim = {}) {
  detail::refuse_if(f.num_vars() > lim.max_vars || f.num_vars() > 40,
                    "brute_count: " + std::to_string(f.num_vars()) + " variables exceeds cap " +
                        std::to_string(lim.max_vars));
  const auto cs = detail::mask_clauses(f);
  const std::uint64_t total = std::uint64_t{1} << f.num_vars();
  std::uint64_t count = 0;
  for (std::uint64_t a = 0; a < total; ++a) {
    bool ok = true;
    for (const auto& c : cs) {
      if (((a & c.pos) | (~a & c.neg)) == 0) {
        ok = false;
        break;
      }
    }
    count += ok ? 1U : 0U;
  }
  return BigCount(count);
}

inline int brute_parity(const Formula& f, const OracleLimits& lim = {}) {
  return static_cast<int>(brute_count(f, lim) & 1);
}

inline BigCount count_hitting_sets(const SetSystem& s, const OracleLimits& lim = {}) {
  detail::refuse_if(s.universe.size() > lim.max_universe, "count_hitting_sets: universe exceeds cap");
  std::vector<std::uint64_t> sets;
  for (const auto& fam : s.family) sets.push_back(detail::mask_of(fam, s.universe));
  const std::uint64_t total = std::uint64_t{1} << s.universe.size();
  std::uint64_t count = 0;
  for (std::uint64_t h = 0; h < total; ++h) {
    bool ok = true;
    for (auto m : sets) {
      if ((h & m) == 0) {
        ok = false;
        break;
      }
    }
    count += ok ? 1U : 0U;
  }
  return BigCount(count);
}

inline BigCount count_set_covers(const SetSystem& s, const OracleLimits& lim = {}) {
  detail::refuse_if(s.family.size() > lim.max_family, "count_set_covers: family exceeds cap");
  detail::refuse_if(s.universe.size() > 63, "count_set_covers: universe too wide for a bitmask");
  std::vector<std::uint64_t> sets;
  for (const auto& fam : s.family) sets.push_back(detail::mask_of(fam, s.universe));
  const std::uint64_t full =
      s.universe.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << s.universe.size()) - 1;
  const std::uint64_t total = std::uint64_t{1} << sets.size();
  std::uint64_t count = 0;
  for (std::uint64_t pick = 0; pick < total; ++pick) {
    std::uint64_t cover = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if ((pick >> i) & 1U) cover |= sets[i];
    }
    count += cover == full ? 1U : 0U;
  }
  return BigCount(count);
}

inline BigCount count_vertex_covers(const SimpleGraph& g, const OracleLimits& lim = {}) {
  detail::refuse_if(static_cast<std::size_t>(g.num_vertices) > lim.max_graph_vertices,
                    "count_vertex_covers: too many vertices");
  const std::uint64_t total = std::uint64_t{1} << g.num_vertices;
  std::uint64_t count = 0;
  for (std::uint64_t s = 0; s < total; ++s) {
    bool ok = true;
    for (auto [u, v] : g.edges) {
      if (((s >> u) & 1U) == 0 && ((s >> v) & 1U) == 0) {
        ok = false;
        break;
      }
    }
    count += ok ? 1U : 0U;
  }
  return BigCount(count);
}

inline BigCount count_edge_covers(const SimpleGraph& g, const OracleLimits& lim = {}) {
  detail::refuse_if(g.edges.size() > lim.max_graph_edges, "count_edge_covers: too many edges");
  const std::uint64_t full = g.num_vertices >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.num_vertices) - 1;
  const std::uint64_t total = std::uint64_t{1} << g.edges.size();
  std::uint64_t count = 0;
  for (std::uint64_t pick = 0; pick < total; ++pick) {
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      if ((pick >> i) & 1U) covered |= (std::uint64_t{1} << g.edges[i].first) | (std::uint64_t{1} << g.edges[i].second);
    }
    count += covered == full ? 1U : 0U;
  }
  return BigCount(count);
}

/// sum over S subset of V of (-1)^|S| * 2^{|E(G - S)|}.
inline BigCount inclusion_exclusion_edge_covers(const SimpleGraph& g, const OracleLimits& lim = {}) {
  detail::refuse_if(static_cast<std::size_t>(g.num_vertices) > lim.max_graph_vertices,
                    "inclusion_exclusion_edge_covers: too many vertices");
  const std::uint64_t total = std::uint64_t{1} << g.num_vertices;
  BigCount sum = 0;
  for (std::uint64_t s = 0; s < total; ++s) {
    unsigned surviving = 0;
    for (auto [u, v] : g.edges) {
      if (((s >> u) & 1U) == 0 && ((s >> v) & 1U) == 0) ++surviving;
    }
    BigCount term = BigCount(1) << surviving;
    if (__builtin_popcountll(s) & 1) sum -= term;
    else sum += term;
  }
  return sum;
}

}  // namespace xparity
