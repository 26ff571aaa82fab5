#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "xparity/generators.hpp"
#include "xparity/occ2.hpp"

using namespace xparity;

namespace {

Formula F(Var n, std::initializer_list<std::initializer_list<int>> cs) { return Formula::from_dimacs(n, cs); }

Formula random_occ2(std::uint64_t seed, Var n, unsigned lo, unsigned hi) {
  DoccParams p;
  p.n = n;
  p.d = 2;
  p.min_len = lo;
  p.max_len = hi;
  p.seed = seed;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t budget = static_cast<std::size_t>(n) * 2;
  p.m = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(2 * budget / (lo + hi))));
  return gen_random_docc(p);
}

std::optional<Formula> reduced_cubic(std::size_t m3, std::uint64_t seed) { return gen_reduced_cubic(m3, seed); }

}  // namespace

TEST(Solve2Cnf, TriangleIsEven) {
  const Formula f = F(3, {{1, 2}, {2, 3}, {3, 1}});
  EXPECT_EQ(solve_2cnf(f), 0);
  EXPECT_EQ(brute_count(f), 4);
}

TEST(Solve2Cnf, PathMatchesOracle) {
  const Formula f = F(3, {{1, 2}, {-2, 3}});
  EXPECT_EQ(solve_2cnf(f), brute_parity(f));
}

TEST(Solve2Cnf, RejectsLongClauses) {
  EXPECT_THROW(solve_2cnf(F(3, {{1, 2, 3}})), ContractViolation);
  EXPECT_THROW(solve_2cnf(F(2, {{1, 2}, {1, -2}, {-1, 2}})), ContractViolation);
}

TEST(Solve2Cnf, AgreesWithOracleOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    Rng rng(seed);
    const Formula f = random_occ2(seed, static_cast<Var>(rng.between(1, 10)), 1, 2);
    ASSERT_EQ(solve_2cnf(f), brute_parity(f)) << to_string(f);
  }
}

TEST(Multigraph, WorkedExampleStructure) {
  const Formula f = testkit::fig2_formula();
  EXPECT_TRUE(reduce(f).trace.empty());
  const auto g = build_multigraph(f);
  ASSERT_EQ(g.vertices.size(), 4U);
  EXPECT_EQ(g.vertices[0], Clause::from_dimacs({1, -4, 5}));
  EXPECT_EQ(g.vertices[1], Clause::from_dimacs({-1, 2, 6}));
  EXPECT_EQ(g.vertices[2], Clause::from_dimacs({2, 3, 7}));
  EXPECT_EQ(g.vertices[3], Clause::from_dimacs({3, 4, 8}));
  ASSERT_EQ(g.edges.size(), 6U);
  std::map<Var, std::pair<std::uint32_t, std::uint32_t>> by_key;
  for (const auto& e : g.edges) by_key[e.key()] = {std::min(e.u, e.v), std::max(e.u, e.v)};
  EXPECT_EQ(by_key.at(1), std::make_pair(0U, 1U));
  EXPECT_EQ(by_key.at(2), std::make_pair(1U, 2U));
  EXPECT_EQ(by_key.at(3), std::make_pair(2U, 3U));
  EXPECT_EQ(by_key.at(4), std::make_pair(0U, 3U));
  EXPECT_EQ(by_key.at(5), std::make_pair(0U, 1U));
  EXPECT_EQ(by_key.at(7), std::make_pair(2U, 3U));
  for (unsigned d : g.degrees()) EXPECT_EQ(d, 3U);
}

TEST(Multigraph, DualGraphHasOneEdgePerSharedVariable) {
  const auto d = build_dual_graph(testkit::fig2_formula());
  EXPECT_EQ(d.vertices.size(), 8U);
  EXPECT_EQ(d.edges.size(), 10U);
}

TEST(Multigraph, PureTwoClauseFormulaHasNoVertices) {
  const auto g = build_multigraph(F(3, {{1, 2}, {2, 3}, {3, 1}}));
  EXPECT_TRUE(g.vertices.empty());
  EXPECT_TRUE(g.edges.empty());
}

TEST(Multigraph, CubicOnRandomReducedInstances) {
  int seen = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto f = reduced_cubic(12, seed * 1000);
    if (!f) continue;
    ++seen;
    const auto g = build_multigraph(*f);
    EXPECT_EQ(g.vertices.size(), 12U);
    for (unsigned d : g.degrees()) ASSERT_EQ(d, 3U);
  }
  EXPECT_GT(seen, 30);
}

TEST(Bisect, WorkedExampleCuts) {
  const auto g = build_multigraph(testkit::fig2_formula());
  const auto w = detail::weight_matrix(g);
  auto cut = [&w](std::vector<char> side) { return detail::cut_of(w, side); };
  EXPECT_EQ(cut({0, 0, 1, 1}), 2U);
  EXPECT_EQ(cut({0, 1, 0, 1}), 6U);
  EXPECT_EQ(cut({0, 1, 1, 0}), 4U);
  const Bisection b = bisect(g);
  EXPECT_EQ(b.cut, 2U);
  EXPECT_EQ(b.a, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(b.b, (std::vector<std::uint32_t>{2, 3}));
}

TEST(Bisect, SeparatesDisconnectedParts) {
  ClauseMultigraph g;
  for (int i = 0; i < 6; ++i) g.vertices.push_back(Clause{Literal::positive(static_cast<Var>(i + 1))});
  auto edge = [&g](std::uint32_t u, std::uint32_t v, Var key) {
    MultiEdge e;
    e.u = u;
    e.v = v;
    e.vars = {key};
    g.edges.push_back(e);
  };
  Var k = 1;
  for (std::uint32_t base : {0U, 3U}) {
    edge(base, base + 1, k++);
    edge(base + 1, base + 2, k++);
    edge(base + 2, base, k++);
  }
  EXPECT_EQ(bisect(g).cut, 0U);
}

TEST(Bisect, BalancedAndNearExactOnSmallGraphs) {
  std::size_t gap = 0;
  int seen = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto f = reduced_cubic(12, seed * 77);
    if (!f) continue;
    ++seen;
    const auto g = build_multigraph(*f);
    const Bisection h = bisect(g, seed, 8);
    const Bisection x = exhaustive_bisection(g);
    ASSERT_LE(std::max(h.a.size(), h.b.size()) - std::min(h.a.size(), h.b.size()), 1U);
    ASSERT_GE(h.cut, x.cut);
    gap += h.cut - x.cut;
  }
  EXPECT_GT(seen, 20);
  RecordProperty("total_gap", static_cast<int>(gap));
}

TEST(Bisect, DeterministicUnderSeed) {
  const auto f = reduced_cubic(30, 5);
  ASSERT_TRUE(f);
  const auto g = build_multigraph(*f);
  const Bisection a = bisect(g, 42, 8), b = bisect(g, 42, 8);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.cut, b.cut);
}

TEST(SelfLoops, LoopIsRemovedAndParityKept) {
  // (1|2|3) with 2 and 3 joined by the 2-clause (-2|-3); 1 continues elsewhere
  const Formula f = F(5, {{1, 2, 3}, {-2, -3}, {-1, 4, 5}, {-4, 5}});
  const auto r = eliminate_self_loops(f);
  ASSERT_EQ(r.kind, LoopElimination::Kind::changed);
  EXPECT_EQ(r.removed, 1U);
  const int got = r.kind == LoopElimination::Kind::verdict ? 0 : brute_parity(r.formula);
  EXPECT_EQ(got, brute_parity(f));
}

TEST(SelfLoops, BothSidesEvenGivesVerdict) {
  // loop part (1|2|3)(-2|4)(-4|-3): even count with x1=0 and with x1=1
  const Formula f = F(6, {{1, 2, 3}, {-2, 4}, {-4, -3}, {-1, 5, 6}});
  const Formula part = F(4, {{1, 2, 3}, {-2, 4}, {-4, -3}});
  ASSERT_EQ(brute_parity(assign(part, 1, false)), 0);
  ASSERT_EQ(brute_parity(assign(part, 1, true)), 0);
  const auto r = eliminate_self_loops(f);
  EXPECT_EQ(r.kind, LoopElimination::Kind::verdict);
  EXPECT_EQ(brute_parity(f), 0);
}

TEST(SelfLoops, LoopFreeFormulaUnchanged) {
  const auto r = eliminate_self_loops(testkit::fig2_formula());
  EXPECT_EQ(r.kind, LoopElimination::Kind::none);
  EXPECT_EQ(r.formula, testkit::fig2_formula());
}

TEST(FourPlus, HandBuiltFourClause) {
  const Formula f = F(9, {{1, 2, 3, 4}, {-1, 5}, {-2, 6}, {-3, 7}, {-4, 8}, {-5, -6, 9}, {-7, -8, -9}});
  ASSERT_TRUE(reduce(f).trace.empty());
  SolveContext ctx;
  const auto br = branch_4plus(f, ctx);
  EXPECT_TRUE(br.entry.pass()) << br.entry.describe();
  EXPECT_FALSE(br.entry.fallback);
  EXPECT_EQ(solve_occ2(f), brute_parity(f));
}

TEST(FourPlus, FiveClausePivotDropsAtLeastSixClauses) {
  const Formula f =
      F(11, {{1, 2, 3, 4, 5}, {-1, 6}, {-2, 7}, {-3, 8}, {-4, 9}, {-5, 10}, {-6, -7, 11}, {-8, -9}, {-10, -11}});
  ASSERT_TRUE(reduce(f).trace.empty());
  SolveContext ctx;
  const auto br = branch_4plus(f, ctx);
  EXPECT_GE(br.entry.drops[0], 6);
  EXPECT_TRUE(br.entry.pass()) << br.entry.describe();
  EXPECT_EQ(solve_occ2(f), brute_parity(f));
}

// Two 2-clause neighbours of the pivot share their outside variable 1, so the
// clause-0 child loses five variables, not |C| + |N(C,2)| = 6.
TEST(FourPlus, SharedPartnerMissesNeighbourCountButKeepsFactor) {
  const Formula f = F(8, {{1, 3}, {-1, -7}, {-2, -4, 5}, {-2, -6, -8}, {-3, -4, -7, -8}, {-5, -6}});
  ASSERT_TRUE(reduce(f).trace.empty());
  ASSERT_TRUE(is_reduced(f).all());
  SolveOptions opt;
  opt.ledger_mode = MeasureLedger::Mode::record;
  SolveContext ctx(opt);
  const auto br = branch_4plus(f, ctx);
  EXPECT_EQ(to_string(br.pivot), "(-3 -4 -7 -8)");
  EXPECT_EQ(br.entry.drops[3], 5);
  EXPECT_FALSE(br.entry.pass());
  EXPECT_EQ(br.entry.within_claimed_factor(), std::optional<bool>(true));
  EXPECT_EQ(ctx.ledger.tally().at("occ2.4plus").failures_within_factor, 1U);

  SolveContext strict;
  EXPECT_THROW(solve_occ2(f, strict), LedgerViolation);
  SolveContext recording(opt);
  EXPECT_EQ(solve_occ2(f, recording), brute_parity(f));
}

TEST(FourPlus, NoLedgerViolationsOnFuzzedInstances) {
  SolveContext ctx;
  std::size_t fired = 0;
  for (std::uint64_t seed = 1; seed <= 3000; ++seed) {
    Rng rng(seed);
    const Formula f = random_occ2(seed, static_cast<Var>(rng.between(8, 20)), 3, 6);
    const auto r = reduce(f);
    if (r.settled_parity()) continue;
    bool has_long = false;
    for (const auto& c : r.formula.clauses()) has_long = has_long || c.size() >= 4;
    if (!has_long) continue;
    ++fired;
    ASSERT_NO_THROW(branch_4plus(r.formula, ctx)) << to_string(r.formula);
  }
  EXPECT_GT(fired, 50U);
  EXPECT_EQ(ctx.ledger.failures(), 0U);
}

TEST(SolveOcc2, WorkedExample) {
  EXPECT_EQ(solve_occ2(testkit::fig2_formula()), 1);
}

TEST(SolveOcc2, RejectsThreeOccurrences) {
  EXPECT_THROW(solve_occ2(F(2, {{1, 2}, {1, -2}, {-1, 2}})), ContractViolation);
}

TEST(SolveOcc2, AgreesWithOracleOnMixedLengths) {
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    Rng rng(seed);
    const Formula f = random_occ2(seed, static_cast<Var>(rng.between(1, 16)), 1, 6);
    SolveContext ctx;
    ASSERT_EQ(solve_occ2(f, ctx), brute_parity(f)) << to_string(f);
    ASSERT_EQ(ctx.ledger.failures(), 0U);
  }
}

TEST(SolveOcc2, AgreesWithSolve2CnfOnTwoCnf) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    Rng rng(seed);
    const Formula f = random_occ2(seed, static_cast<Var>(rng.between(2, 12)), 2, 2);
    ASSERT_EQ(solve_occ2(f), solve_2cnf(f));
  }
}

TEST(BisectionSolve, WorkedExampleWithGivenPartition) {
  const Formula f = testkit::fig2_formula();
  SolveOptions opt;
  opt.base_threshold = 2;
  SolveContext ctx(opt);
  const int p = bisection_solve(f, {Clause::from_dimacs({1, -4, 5}), Clause::from_dimacs({-1, 2, 6})},
                                {Clause::from_dimacs({2, 3, 7}), Clause::from_dimacs({3, 4, 8})}, ctx);
  EXPECT_EQ(p, brute_parity(f));
  EXPECT_EQ(ctx.ledger.failures(), 0U);
}

TEST(BisectionSolve, SplitsDisjointHalves) {
  const auto f1 = reduced_cubic(6, 11);
  const auto f2 = reduced_cubic(6, 500);
  ASSERT_TRUE(f1 && f2);
  std::vector<Clause> cs = f1->clauses();
  std::vector<Var> vs = f1->variables();
  std::vector<Clause> shifted;
  for (const auto& c : f2->clauses()) {
    std::vector<Literal> ls;
    for (Literal l : c) ls.push_back(Literal::make(l.var() + 9, l.is_negative()));
    shifted.emplace_back(std::move(ls));
  }
  cs.insert(cs.end(), shifted.begin(), shifted.end());
  for (Var v : f2->variables()) vs.push_back(v + 9);
  const Formula f(vs, cs);
  SolveOptions opt;
  opt.base_threshold = 2;
  SolveContext ctx(opt);
  const int p = bisection_solve(f, f1->clauses(), shifted, ctx);
  EXPECT_EQ(p, brute_parity(f));
  EXPECT_GE(ctx.stats.splits, 1U);
  EXPECT_EQ(p, brute_parity(*f1) & brute_parity(*f2));
}

TEST(BisectionSolve, SmallThresholdStillCorrectAndLedgerClean) {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto f = reduced_cubic(14, seed * 31);
    if (!f) continue;
    SolveOptions opt;
    opt.base_threshold = 3;
    SolveContext ctx(opt);
    ASSERT_EQ(solve_occ2(*f, ctx), brute_parity(*f));
    ASSERT_EQ(ctx.ledger.failures(), 0U);
  }
}

TEST(BisectionSolve, EpsPrimeSatisfiesRhoInequality) {
  const double eps = 1e-9;
  for (std::size_t n : {16U, 32U, 100U}) {
    const double ep = eps_prime(n, eps);
    EXPECT_LE((3.0 - ep) * (1.0 / 6.0 + eps), 0.5 - 1.0 / static_cast<double>(n) + 1e-12);
  }
  EXPECT_NEAR(eps_prime(16, eps), 0.375, 1e-7);
}
