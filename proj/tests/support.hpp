#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "xparity/formula.hpp"
#include "xparity/generators.hpp"
#include "xparity/oracle.hpp"
#include "xparity/rng.hpp"

namespace xparity::testkit {

/// C1..C4 and D1..D4 from the worked multigraph example: x1..x4 are 1..4,
/// y1..y4 are 5..8, z1 = 9, z2 = 10.
inline Formula fig2_formula() {
  return Formula::from_dimacs(10, {{1, -4, 5}, {-1, 2, 6}, {2, 3, 7}, {3, 4, 8},
                                   {-5, 9}, {9, 6}, {7, 10}, {-10, 8}});
}

inline Formula random_cnf(Rng& rng, Var n, std::size_t m, unsigned lo, unsigned hi, bool allow_junk = true) {
  return gen_random_cnf(rng, n, m, lo, hi, allow_junk);
}

/// Independent property-5 check: every nonempty proper clause subset with at
/// most `cap` variables must share at least two variables with its complement.
inline bool brute_property5(const Formula& f, std::size_t cap = 10) {
  const std::size_t m = f.num_clauses();
  if (m > 16) throw ContractViolation("brute_property5: too many clauses");
  for (std::uint32_t mask = 1; mask + 1 < (1U << m); ++mask) {
    std::vector<Var> in, out;
    for (std::size_t i = 0; i < m; ++i) {
      for (Literal l : f.clause(i)) ((mask >> i) & 1U ? in : out).push_back(l.var());
    }
    std::sort(in.begin(), in.end());
    in.erase(std::unique(in.begin(), in.end()), in.end());
    if (in.size() > cap) continue;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::vector<Var> both;
    std::set_intersection(in.begin(), in.end(), out.begin(), out.end(), std::back_inserter(both));
    if (both.size() < 2) return false;
  }
  return true;
}

}  // namespace xparity::testkit
