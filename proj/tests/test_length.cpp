#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <optional>

#include "support.hpp"
#include "xparity/generators.hpp"
#include "xparity/length_solver.hpp"

using namespace xparity;

namespace {

Formula F(Var n, std::initializer_list<std::initializer_list<int>> cs) { return Formula::from_dimacs(n, cs); }

Formula fano() {
  return F(7, {{1, 2, 3}, {1, 4, 5}, {1, 6, 7}, {2, 4, 6}, {2, 5, 7}, {3, 4, 7}, {3, 5, 6}});
}

unsigned count_two(const Formula& f, const Clause& c, Var skip = 0) {
  unsigned n = 0;
  for (Var v : c.variables()) n += (v != skip && f.degree(v) == 2) ? 1U : 0U;
  return n;
}

/// First reduced formula (at most 20 variables) from a fixed generator stream
/// whose classification satisfies `want`.
std::optional<Classification> find_node(const std::function<bool(const Classification&)>& want) {
  auto consider = [&](const Formula& raw) -> std::optional<Classification> {
    const auto r = reduce(raw);
    if (r.settled_parity() || r.formula.num_vars() > 20) return std::nullopt;
    Classification c = classify_step(r.formula);
    if (want(c)) return c;
    return std::nullopt;
  };
  for (std::uint64_t s = 1; s <= 4000; ++s) {
    for (unsigned d : {3U, 4U, 5U}) {
      DoccParams p;
      p.n = static_cast<Var>(14 + s % 8);
      p.d = d;
      p.seed = s;
      p.max_len = d == 3 ? 5 : 3;
      p.positive = s % 3 == 0;
      if (auto c = consider(gen_random_docc(p))) return c;
    }
    const auto n = static_cast<Var>(9 + s % 12);
    if (auto c = consider(gen_exact_occ(n, 3, std::vector<unsigned>(n, 3), s, true))) return c;
  }
  return std::nullopt;
}

/// Runs the step's branching with a strict ledger and checks the children against the oracle.
LedgerEntry branch_and_check(const Classification& c) {
  SolveContext ctx;
  const StepBranch sb = detail::run_step(c, ctx, 0);
  EXPECT_TRUE(sb.entry.pass()) << sb.entry.describe();
  int x = 0;
  for (const auto& child : sb.branches.children) x ^= brute_parity(child);
  EXPECT_EQ(x, brute_parity(c.formula));
  int y = 0;
  for (const auto& r : sb.children) y ^= r.verdict_zero ? 0 : brute_parity(r.formula);
  EXPECT_EQ(y, brute_parity(c.formula));
  EXPECT_EQ(solve_length(c.formula), brute_parity(c.formula));
  return sb.entry;
}

}  // namespace

TEST(Measure, ThreeVariablesWeighThree) {
  const Formula f = F(4, {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}});
  EXPECT_EQ(measure_mu_halves(f), 24);
  EXPECT_DOUBLE_EQ(measure_mu(f), 12.0);
}

TEST(Measure, TwoVariablesWeighOneAndAHalf) {
  const Formula f = F(6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}});
  EXPECT_EQ(measure_mu_halves(f), 18);
  EXPECT_DOUBLE_EQ(measure_mu(f), 1.5 * 6);
}

TEST(Measure, NeverExceedsLengthAndNeverRisesUnderReduction) {
  Rng rng(41);
  for (int t = 0; t < 500; ++t) {
    const auto n = static_cast<Var>(rng.between(1, 14));
    const Formula f = testkit::random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 20)), 1, 5);
    EXPECT_LE(measure_mu_halves(f), 2 * static_cast<Halves>(f.length()));
    const auto r = reduce(f);
    for (std::size_t i = 1; i < r.mu_log.size(); ++i) ASSERT_LE(r.mu_log[i], r.mu_log[i - 1]);
  }
}

TEST(Tau, StepFactorsMatchFrozenRoots) {
  // roots of sum x^-a = 1, computed separately with scipy brentq
  const std::vector<double> frozen = {1.100276236, 1.096824980, 1.098266680, 1.103088425,
                                      1.103088425, 1.105182214, 1.098266680};
  const auto& table = step_vectors();
  ASSERT_EQ(table.size(), frozen.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double tau = branching_factor(table[i].drops);
    EXPECT_NEAR(tau, frozen[i], 1e-6) << step_name(table[i].step);
    EXPECT_GT(table[i].quoted - tau, 0.0) << step_name(table[i].step);
    EXPECT_LT(table[i].quoted - tau, 1e-4) << step_name(table[i].step);
  }
}

TEST(Tau, TwoOccurrenceFactors) {
  EXPECT_NEAR(branching_factor({9, 4}), 1.119252667, 1e-6);
  EXPECT_NEAR(branching_factor({5, 1}), 1.324717957, 1e-6);
  EXPECT_NEAR(branching_factor({10, 10, 10, 10}), 1.148698355, 1e-6);
  EXPECT_NEAR(branching_factor({1, 2}), fibonacci_constant(2), 1e-9);
  EXPECT_DOUBLE_EQ(branching_factor({5}), 1.0);
}

TEST(Classify, FiveVariableGoesToStepOne) {
  const Formula f = F(6, {{1, 2}, {1, 3}, {-1, 4}, {1, 5}, {-1, 6}, {2, 3, 4, 5, 6}});
  const auto c = classify_step(f);
  EXPECT_EQ(c.step, Step::step1);
  EXPECT_EQ(c.x, 1U);
}

TEST(Classify, TwoVariablesOnlyGoToStepSix) {
  EXPECT_EQ(classify_step(F(6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}})).step, Step::step6);
}

TEST(Classify, FanoPlaneIsProperEverywhere) {
  const Formula f = fano();
  EXPECT_TRUE(reduce(f).trace.empty());
  const auto c = classify_step(f);
  EXPECT_EQ(c.step, Step::step5_2);
  EXPECT_EQ(c.x, 1U);
  for (Var v = 1; v <= 7; ++v) {
    const LocalStructure ls = compute_ext(f, v);
    EXPECT_TRUE(ls.proper);
    EXPECT_TRUE(ls.y.empty());
    EXPECT_TRUE(ls.ext.empty());
  }
}

TEST(Classify, NegativeHeavyVariableIsFlipped) {
  // x1 occurs once positively and twice negatively
  const auto c = classify_step(F(7, {{1, 2, 3}, {-1, 4, 5}, {-1, 6, 7}, {2, 4, 6}, {3, 5, 7}}));
  ASSERT_FALSE(c.flipped.empty());
  EXPECT_EQ(c.flipped.front(), 1U);
  EXPECT_EQ(c.formula.positive_count(1), 2U);
}

TEST(LocalStructure, ComputesYRAndExt) {
  // x=1 in (1 2 3) (1 4 5) (1 6 7). 2 and 4 have one outside occurrence, in (2 4 8).
  const Formula f = F(9, {{1, 2, 3}, {1, 4, 5}, {1, 6, 7}, {2, 4, 8}, {3, 5, 9}, {3, 6, 8}, {5, 7, 9}, {6, 7, 8, 9}});
  const LocalStructure ls = compute_ext(f, 1);
  EXPECT_EQ(ls.sub.size(), 3U);
  EXPECT_EQ(ls.y, (std::vector<Var>{2, 4}));
  EXPECT_EQ(ls.r, (std::vector<Clause>{Clause::from_dimacs({2, 4, 8})}));
  EXPECT_EQ(ls.ext, (std::vector<Var>{8}));
  EXPECT_FALSE(ls.proper);
  EXPECT_THROW(compute_ext(F(3, {{1, 2}, {1, 3}, {1, 2, 3}}), 1), ContractViolation);
}

TEST(LocalStructure, NonProperFormulasHaveAnExternalNeighbour) {
  int nonproper = 0, shared_two = 0;
  for (std::uint64_t s = 1; s <= 3000; ++s) {
    const auto n = static_cast<Var>(9 + s % 12);
    DoccParams p;
    p.n = n;
    p.d = 3;
    p.min_len = 3;
    p.seed = s;
    p.positive = true;
    p.m = n - 1 - s % 3;
    const auto r = reduce(s % 2 == 0 ? gen_exact_occ(n, 3, std::vector<unsigned>(n, 3), s, true) : gen_random_docc(p));
    if (r.settled_parity()) continue;
    const Formula& f = r.formula;
    const auto c = classify_step(f);
    if (c.step != Step::step5_1 && c.step != Step::step5_2) continue;
    bool any_nonproper = false, any_ext = false;
    for (Var v : f.variables()) {
      if (f.degree(v) != 3) continue;
      const LocalStructure ls = compute_ext(f, v);
      any_nonproper = any_nonproper || !ls.proper;
      any_ext = any_ext || !ls.ext.empty();
      // a clause (x | y | z) with y a 3-variable and z a 2-variable
      for (const auto& cl : ls.clauses) {
        if (count_two(f, cl) == 1) {
          for (Var y : cl.variables()) {
            if (y != v && f.degree(y) == 3) {
              ++shared_two;
              EXPECT_TRUE(!ls.ext.empty() || !compute_ext(f, y).ext.empty()) << to_string(f);
            }
          }
        }
      }
    }
    if (any_nonproper) {
      ++nonproper;
      if (f.num_vars() > 10) {
        ASSERT_TRUE(any_ext) << to_string(f);
      }
      ASSERT_EQ(c.step, any_ext ? Step::step5_1 : Step::small);
    }
  }
  EXPECT_GT(nonproper, 100);
  EXPECT_GT(shared_two, 10);
}

TEST(LocalStructure, WholeFormulaWithoutExternalNeighbourFallsBackToBruteForce) {
  // the only 3-variable x2 has disjoint sub-clauses of 2-variables whose other
  // occurrences close up inside the formula
  const Formula f = F(10, {{1, 2, 9}, {1, 5, 10}, {2, 3, 10}, {2, 5, 8}, {3, 8, 9}});
  const Formula g = Formula(std::vector<Var>{1, 2, 3, 5, 8, 9, 10}, f.clauses());
  ASSERT_TRUE(is_reduced(g).all());
  const LocalStructure ls = compute_ext(g, 2);
  EXPECT_FALSE(ls.proper);
  EXPECT_TRUE(ls.ext.empty());
  EXPECT_EQ(classify_step(g).step, Step::small);
  EXPECT_THROW(classify_step(g, 6), ContractViolation);
  SolveContext ctx;
  EXPECT_EQ(solve_length(g, ctx), brute_parity(g));
  EXPECT_EQ(ctx.stats.branchings["length.small"], 1U);
}

TEST(StepOne, DegreeFourBalancedVariable) {
  const auto c = find_node([](const Classification& c) {
    return c.step == Step::step1 && c.formula.degree(c.x) == 4 && c.formula.positive_count(c.x) == 2;
  });
  ASSERT_TRUE(c.has_value());
  branch_and_check(*c);
}

TEST(StepOne, DegreeFivePivotMeetsSumBound) {
  const auto c = find_node([](const Classification& c) { return c.step == Step::step1 && c.formula.degree(c.x) == 5; });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  ASSERT_EQ(e.checks.size(), 3U);
  // 2 w5 + 10 delta5 = 20, in halves
  EXPECT_EQ(e.checks[2].bound, 40);
  EXPECT_GE(e.checks[2].observed, 40);
}

TEST(StepTwo, NoTwoVariablesInClause) {
  const auto c = find_node([](const Classification& c) {
    return c.step == Step::step2 && count_two(c.formula, *c.clause) == 0;
  });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_EQ(e.checks[0].bound, 4 * kW2);
  EXPECT_EQ(e.checks[1].bound, 8 * kW2);
}

TEST(StepTwo, TwoTwoVariablesInClause) {
  const auto c = find_node([](const Classification& c) {
    return c.step == Step::step2 && count_two(c.formula, *c.clause) == 2;
  });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_EQ(e.checks[0].bound, 5 * kW2);
  EXPECT_EQ(e.checks[1].bound, 5 * kW2);
}

TEST(StepThree, ClauseBranchWithThreeVariables) {
  const auto c = find_node([](const Classification& c) {
    return c.step == Step::step3_1 && count_two(c.formula, *c.clause, c.x) == 0;
  });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_EQ(e.scheme, "length.step3.1");
  EXPECT_EQ(e.checks[0].bound, 3 * kW2);
  EXPECT_EQ(e.checks[1].bound, 8 * kW2);
}

TEST(StepThree, ClauseBranchWithTwoVariable) {
  const auto c = find_node([](const Classification& c) {
    return c.step == Step::step3_1 && count_two(c.formula, *c.clause, c.x) >= 1;
  });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_EQ(e.checks[0].bound, 4 * kW2);
  EXPECT_EQ(e.checks[1].bound, 6 * kW2);
}

TEST(StepThree, SimpleBranchWithUnitSubClauses) {
  const auto c = find_node([](const Classification& c) {
    if (c.step != Step::step3_2) return false;
    for (const auto& o : c.formula.occurrences(c.x)) {
      if (!o.negative && c.formula.clause(o.clause).size() != 2) return false;
    }
    return true;
  });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_EQ(e.checks[0].what.substr(0, 5), "case1");
  EXPECT_GE(e.drops[0], 5 * kW2);
  EXPECT_GE(e.drops[1], 5 * kW2);
}

TEST(StepThree, SimpleBranchWithLongSubClause) {
  const auto c = find_node([](const Classification& c) {
    if (c.step != Step::step3_2) return false;
    for (const auto& o : c.formula.occurrences(c.x)) {
      if (!o.negative && c.formula.clause(o.clause).size() == 3) return true;
    }
    return false;
  });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_EQ(e.checks[0].what.substr(0, 5), "case2");
}

// C1 = (4 -6) lies inside var(D) = {4, 6}, so removing (x | C1) frees nothing
// beyond what assigning D already counts: D2 = 7w2 instead of 8w2.
TEST(StepThree, SubClauseInsideDMissesCaseBoundButKeepsFactor) {
  const Formula f = Formula::from_dimacs(
      7, {{1, -4, 6}, {-1, -4, -6}, {-1, 6, -7}, {2, -3, 5}, {2, -5, 7}, {-2, 3, 5}, {-3, -4, -7}});
  ASSERT_TRUE(is_reduced(f).all());
  const Classification c = classify_step(f);
  ASSERT_EQ(c.step, Step::step3_1);
  EXPECT_EQ(to_string(*c.clause), "(-1 4 6)");
  SolveOptions opt;
  opt.ledger_mode = MeasureLedger::Mode::record;
  SolveContext ctx(opt);
  const StepBranch sb = detail::run_step(c, ctx, 0);
  EXPECT_EQ(sb.entry.drops, (std::vector<std::int64_t>{4 * kW2, 7 * kW2}));
  EXPECT_FALSE(sb.entry.pass());
  EXPECT_EQ(sb.entry.within_claimed_factor(), std::optional<bool>(true));
  SolveContext recording(opt);
  EXPECT_EQ(solve_length(f, recording), brute_parity(f));
}

TEST(StepFour, OneTwoClause) {
  const auto c = find_node([](const Classification& c) {
    if (c.step != Step::step4) return false;
    int twos = 0;
    for (const auto& o : c.formula.occurrences(c.x)) twos += c.formula.clause(o.clause).size() == 2 ? 1 : 0;
    return twos == 1;
  });
  ASSERT_TRUE(c.has_value());
  branch_and_check(*c);
}

TEST(StepFour, ThreeTwoClausesForceDistinctVariables) {
  const auto c = find_node([](const Classification& c) {
    if (c.step != Step::step4) return false;
    for (const auto& o : c.formula.occurrences(c.x)) {
      if (c.formula.clause(o.clause).size() != 2) return false;
    }
    return true;
  });
  ASSERT_TRUE(c.has_value());
  std::vector<Var> ys;
  for (const auto& o : c->formula.occurrences(c->x)) {
    for (Var v : c->formula.clause(o.clause).variables()) {
      if (v != c->x) ys.push_back(v);
    }
  }
  std::sort(ys.begin(), ys.end());
  EXPECT_EQ(std::unique(ys.begin(), ys.end()), ys.end());
  const LedgerEntry e = branch_and_check(*c);
  SolveContext ctx;
  const StepBranch sb = step4_branch(c->formula, c->x, ctx);
  if (!sb.children[0].verdict_zero) {
    for (Var y : ys) EXPECT_FALSE(sb.children[0].formula.has_variable(y));
  }
  EXPECT_GE(e.drops[0], 3 * kW2 + 3 * kW2);
}

TEST(StepFive, OneExternalNeighbour) {
  const auto c = find_node([](const Classification& c) { return c.step == Step::step5_1 && c.local->ext.size() == 1; });
  ASSERT_TRUE(c.has_value());
  const LedgerEntry e = branch_and_check(*c);
  EXPECT_GE(e.drops[1], 9 * kW2);
}

TEST(StepFive, ProperVariableBranchesThreeWays) {
  const Classification c = classify_step(fano());
  const LedgerEntry e = branch_and_check(c);
  ASSERT_EQ(e.drops.size(), 3U);
  EXPECT_GE(e.drops[0], 10 * kW2);
  EXPECT_GE(e.drops[1], 8 * kW2);
  EXPECT_GE(e.drops[2], 6 * kW2);
  const auto found = find_node([](const Classification& c) { return c.step == Step::step5_2; });
  ASSERT_TRUE(found.has_value());
  branch_and_check(*found);
}

TEST(SolveLength, AgreesWithOracleOnGeneralCnf) {
  Rng rng(43);
  SolveOptions opt;
  opt.verify_nodes = true;
  SolveContext ctx(opt);
  int done = 0;
  while (done < 2000) {
    const auto n = static_cast<Var>(rng.between(1, 14));
    const Formula f = testkit::random_cnf(rng, n, static_cast<std::size_t>(rng.between(1, 3 * n)), 1, 5);
    if (f.max_degree() > 6) continue;
    ASSERT_EQ(solve_length(f, ctx), brute_parity(f)) << to_string(f);
    ++done;
  }
  EXPECT_EQ(ctx.ledger.failures(), 0U);
}

TEST(SolveLength, AgreesWithOracleOnBoundedOccurrenceCorpora) {
  SolveOptions opt;
  opt.verify_nodes = true;
  SolveContext ctx(opt);
  for (std::uint64_t s = 1; s <= 300; ++s) {
    DoccParams p;
    p.n = static_cast<Var>(12 + s % 7);
    p.d = 3 + static_cast<unsigned>(s % 3);
    p.seed = s;
    p.max_len = 4;
    p.positive = s % 4 == 0;
    const Formula f = gen_random_docc(p);
    ASSERT_EQ(solve_length(f, ctx), brute_parity(f)) << to_string(f);
    const auto n = static_cast<Var>(9 + s % 10);
    const Formula g = gen_exact_occ(n, 3, std::vector<unsigned>(n, 3), s, s % 2 == 0);
    ASSERT_EQ(solve_length(g, ctx), brute_parity(g)) << to_string(g);
  }
  for (const char* step : {"1", "2", "3.1", "3.2", "4", "5.1", "5.2"}) {
    EXPECT_GT(ctx.ledger.tally().count(std::string("length.step") + step), 0U) << step;
  }
  EXPECT_EQ(ctx.ledger.failures(), 0U);
}

TEST(SolveLength, MatchesOcc2SolverOnTwoOccurrenceInputs) {
  for (std::uint64_t s = 1; s <= 200; ++s) {
    DoccParams p;
    p.n = static_cast<Var>(10 + s % 20);
    p.d = 2;
    p.seed = s;
    p.max_len = 4;
    const Formula f = gen_random_docc(p);
    ASSERT_EQ(solve_length(f), solve_occ2(f)) << to_string(f);
  }
}

TEST(SolveLength, ParallelRootGivesSameAnswerAndTelemetry) {
  for (std::uint64_t s = 1; s <= 40; ++s) {
    const auto n = static_cast<Var>(20 + s % 10);
    const Formula f = gen_exact_occ(n, 3, std::vector<unsigned>(n, 3), s, s % 2 == 0);
    std::vector<std::string> a, b;
    SolveContext one;
    one.sink = [&](const NodeRecord& r) { a.push_back(r.scheme + r.pivot + std::to_string(r.depth)); };
    SolveOptions opt;
    opt.jobs = 2;
    SolveContext two(opt);
    two.sink = [&](const NodeRecord& r) { b.push_back(r.scheme + r.pivot + std::to_string(r.depth)); };
    ASSERT_EQ(solve_length(f, one), solve_length(f, two));
    EXPECT_EQ(a, b);
    EXPECT_EQ(one.stats.nodes, two.stats.nodes);
    EXPECT_EQ(one.stats.leaves, two.stats.leaves);
  }
}

TEST(SolveLength, LeavesStayUnderLengthBound) {
  double worst = 0;
  for (std::uint64_t s = 1; s <= 150; ++s) {
    DoccParams p;
    p.n = static_cast<Var>(20 + s % 25);
    p.d = 3 + static_cast<unsigned>(s % 2);
    p.seed = s;
    p.max_len = 3;
    const Formula f = gen_random_docc(p);
    if (f.length() > 120) continue;
    SolveContext ctx;
    solve_length(f, ctx);
    worst = std::max(worst, static_cast<double>(ctx.stats.leaves) / std::pow(1.1052, static_cast<double>(f.length())));
  }
  EXPECT_LE(worst, 1000.0);
}
