#include <gtest/gtest.h>

#include "support.hpp"
#include "xparity/generators.hpp"
#include "xparity/oracle.hpp"

using namespace xparity;

TEST(Oracle, CountsOnSmallFormulas) {
  EXPECT_EQ(brute_count(Formula::from_dimacs(3, {{1, 2, 3}})), 7);
  EXPECT_EQ(brute_count(Formula::from_dimacs(3, {{1, 2}, {2, 3}})), 5);
  EXPECT_EQ(brute_count(Formula::from_dimacs(3, {{1, 2}, {2, 3}, {3, 1}})), 4);
  EXPECT_EQ(brute_count(Formula::from_dimacs(1, {{1}, {-1}})), 0);
  EXPECT_EQ(brute_count(Formula::from_dimacs(2, {})), 4);
}

TEST(Oracle, EmptyFormulaHasOneModel) {
  EXPECT_EQ(brute_count(Formula{}), 1);
  EXPECT_EQ(brute_parity(Formula{}), 1);
}

TEST(Oracle, EmptyClauseHasNoModels) {
  const Formula f(std::vector<Var>{1}, {Clause{}});
  EXPECT_EQ(brute_count(f), 0);
}

TEST(Oracle, WorkedExampleCount) {
  const Formula f = testkit::fig2_formula();
  EXPECT_EQ(brute_count(f), 209);
  EXPECT_EQ(brute_parity(f), 1);
  EXPECT_EQ(brute_count(remove_clause(f, Clause::from_dimacs({1, -4, 5}))), 254);
}

TEST(Oracle, RefusesOversizedInputs) {
  EXPECT_THROW(brute_count(Formula(Formula::iota_vars(25), {})), OracleRefusal);
  OracleLimits tight;
  tight.max_vars = 3;
  EXPECT_THROW(brute_count(Formula(Formula::iota_vars(4), {}), tight), OracleRefusal);
  SetSystem big;
  for (int i = 0; i < 21; ++i) big.universe.push_back(i);
  EXPECT_THROW(count_hitting_sets(big), OracleRefusal);
}

TEST(Oracle, HittingSetsAndSetCovers) {
  SetSystem s{{1, 2}, {{1}, {1, 2}}};
  EXPECT_TRUE(s.valid());
  EXPECT_EQ(count_hitting_sets(s), 2);
  EXPECT_EQ(count_set_covers(s), 2);
  EXPECT_FALSE(SetSystem({{1}, {{2}}}).valid());
  EXPECT_TRUE(SetSystem({{1}, {{}}}).has_empty_set());
  EXPECT_TRUE(SetSystem({{1, 2}, {{1}}}).has_uncovered_element());
}

TEST(Oracle, GraphCoversOnTriangleAndEdge) {
  const SimpleGraph k3 = parse_graph_spec("k3");
  EXPECT_EQ(count_vertex_covers(k3), 4);
  EXPECT_EQ(count_edge_covers(k3), 4);
  EXPECT_EQ(inclusion_exclusion_edge_covers(k3), 4);
  const SimpleGraph e = parse_graph_spec("0-1");
  EXPECT_EQ(count_vertex_covers(e), 3);
  EXPECT_EQ(count_edge_covers(e), 1);
  EXPECT_EQ(inclusion_exclusion_edge_covers(e), 1);
}

TEST(Oracle, InclusionExclusionAgreesWithEnumeration) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    Rng rng(seed);
    const auto n = static_cast<int>(rng.between(1, 8));
    const SimpleGraph g = gen_random_graph(n, 1, 2, seed);
    if (g.edges.size() > 20) continue;
    ASSERT_EQ(count_edge_covers(g), inclusion_exclusion_edge_covers(g)) << "seed " << seed;
  }
}

TEST(Oracle, EdgeCoverFormulaCountsEdgeCovers) {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const SimpleGraph g = gen_random_graph(6, 1, 2, seed);
    if (g.has_isolated_vertex()) continue;
    const Formula f = gen_edge_cover_formula(g);
    ASSERT_EQ(brute_count(f), count_edge_covers(g)) << "seed " << seed;
  }
}

TEST(Oracle, HittingSetsAreSatisfyingAssignmentsOfPositiveFormulas) {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<Var>(rng.between(1, 10));
    const Formula f = testkit::random_cnf(rng, n, static_cast<std::size_t>(rng.between(0, 8)), 1, 4, false);
    std::vector<Clause> pos;
    for (const auto& c : f.clauses()) {
      std::vector<Literal> ls;
      for (Literal l : c) ls.push_back(Literal::positive(l.var()));
      pos.emplace_back(std::move(ls));
    }
    const Formula g(f.variables(), pos);
    SetSystem s;
    for (Var v : g.variables()) s.universe.push_back(static_cast<int>(v));
    for (const auto& c : g.clauses()) {
      std::vector<int> set;
      for (Literal l : c) set.push_back(static_cast<int>(l.var()));
      s.family.push_back(set);
    }
    ASSERT_EQ(count_hitting_sets(s), brute_count(g));
  }
}

TEST(Generators, RandomDoccRespectsDegreeBound) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DoccParams p;
    p.n = 30;
    p.d = 3;
    p.seed = seed;
    const Formula f = gen_random_docc(p);
    EXPECT_LE(f.max_degree(), 3U);
    for (const auto& c : f.clauses()) {
      EXPECT_GE(c.size(), 2U);
      EXPECT_LE(c.size(), 3U);
      EXPECT_FALSE(c.has_duplicates());
    }
  }
}

TEST(Generators, SameSeedSameFormula) {
  DoccParams p;
  p.n = 20;
  p.d = 4;
  p.seed = 9;
  EXPECT_EQ(gen_random_docc(p), gen_random_docc(p));
  EXPECT_EQ(gen_exact_occ(12, 2, {3, 3, 3, 3, 3, 3, 2, 2, 2}, 4), gen_exact_occ(12, 2, {3, 3, 3, 3, 3, 3, 2, 2, 2}, 4));
}

TEST(Generators, RefusesImpossibleBudgets) {
  DoccParams p;
  p.n = 2;
  p.d = 1;
  p.m = 5;
  EXPECT_THROW(gen_random_docc(p), GeneratorRefusal);
  EXPECT_THROW(gen_exact_occ(3, 2, {3, 2}, 1), GeneratorRefusal);
  EXPECT_THROW(parse_graph_spec("q7"), GeneratorRefusal);
  EXPECT_THROW(parse_graph_spec("0-x"), GeneratorRefusal);
  SimpleGraph lonely{3, {{0, 1}}};
  EXPECT_THROW(gen_edge_cover_formula(lonely), GeneratorRefusal);
}

TEST(Generators, ExactOccurrenceCounts) {
  const Formula f = gen_exact_occ(12, 2, {3, 3, 3, 3, 3, 3, 2, 2, 2}, 17);
  for (Var v : f.variables()) EXPECT_EQ(f.degree(v), 2U);
}
