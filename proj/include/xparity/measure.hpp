#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "xparity/formula.hpp"

namespace xparity {

// ---------------------------------------------------------------------------
// The length measure. Everything is kept in half-units so comparisons are exact:
// w1 = 0, w2 = 3/2, wi = i for i >= 3.

using Halves = std::int64_t;

constexpr Halves weight_halves(unsigned degree) {
  if (degree <= 1) return 0;
  if (degree == 2) return 3;
  return 2 * static_cast<Halves>(degree);
}

/// delta_i = w_i - w_{i-1}
constexpr Halves delta_halves(unsigned degree) {
  return degree == 0 ? 0 : weight_halves(degree) - weight_halves(degree - 1);
}

constexpr Halves kW2 = weight_halves(2);

inline Halves measure_mu_halves(const Formula& f) {
  Halves mu = 0;
  for (Var v : f.variables()) mu += weight_halves(f.degree(v));
  return mu;
}

inline double measure_mu(const Formula& f) { return static_cast<double>(measure_mu_halves(f)) / 2.0; }

inline std::string halves_to_string(Halves h) {
  if (h < 0) return "-" + halves_to_string(-h);
  return std::to_string(h / 2) + (h % 2 != 0 ? ".5" : "");
}

// ---------------------------------------------------------------------------
// Branching factors.

/// The unique root x > 1 of sum_i x^{-a_i} = 1. Requires at least two
/// positive entries, or a single entry (which gives exactly 1).
inline double branching_factor(const std::vector<double>& drops) {
  if (drops.empty()) throw ContractViolation("branching_factor: empty vector");
  for (double a : drops) {
    if (!(a > 0)) throw ContractViolation("branching_factor: drops must be positive");
  }
  if (drops.size() == 1) return 1.0;
  auto g = [&drops](double x) {
    double s = 0;
    for (double a : drops) s += std::pow(x, -a);
    return s - 1.0;
  };
  double hi = 2.0;
  while (g(hi) > 0) hi *= 2.0;
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(g, 1.0, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return (r.first + r.second) / 2.0;
}

/// Root in (1, 2) of x^d (2 - x) = 1. Equals branching_factor({d, d-1, ..., 1}).
inline double fibonacci_constant(unsigned d) {
  if (d < 2) throw ContractViolation("fibonacci_constant: d must be at least 2");
  auto g = [d](double x) { return std::pow(x, static_cast<double>(d)) * (2.0 - x) - 1.0; };
  // g vanishes at 1 as well; start the bracket at the maximum of x^d (2 - x).
  double lo = 2.0 * d / (d + 1.0);
  double hi = 2.0;
  while (hi - lo > 1e-12) {
    const double mid = (lo + hi) / 2.0;
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

// ---------------------------------------------------------------------------
// Ledger. Each branching node records one entry: a list of checks of the form
// observed >= bound. A child that is settled outright by reduction (a zero
// verdict or an empty formula) is treated as having an unbounded drop.

constexpr std::int64_t kResolvedDrop = std::int64_t{1} << 40;

struct LedgerCheck {
  std::string what;
  std::int64_t observed = 0;
  std::int64_t bound = 0;
  bool pass() const { return observed >= bound; }
};

struct LedgerEntry {
  std::string scheme;
  std::size_t depth = 0;
  std::string pivot;
  std::vector<std::int64_t> drops;
  std::vector<bool> resolved;
  std::vector<LedgerCheck> checks;
  bool fallback = false;
  /// The branching vector the step is credited with, in the units of
  /// `factor_drops`. Used to tell a missed intermediate bound from a node whose
  /// observed factor is actually worse than the step's.
  std::vector<std::int64_t> factor_drops;
  std::vector<double> claimed;

  /// Null when no claim is attached. Resolved children are left out.
  std::optional<bool> within_claimed_factor() const;

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass()) return false;
    }
    return true;
  }
  std::string describe() const {
    std::string s = scheme + " at depth " + std::to_string(depth) + " pivot " + pivot + ":";
    for (const auto& c : checks) {
      s += " [" + c.what + " " + std::to_string(c.observed) + (c.pass() ? " >= " : " < ") + std::to_string(c.bound) + "]";
    }
    return s;
  }
};

inline std::optional<bool> LedgerEntry::within_claimed_factor() const {
  if (claimed.empty()) return std::nullopt;
  std::vector<double> obs;
  for (std::size_t i = 0; i < factor_drops.size(); ++i) {
    if (i < resolved.size() && resolved[i]) continue;
    if (factor_drops[i] <= 0) return false;
    obs.push_back(static_cast<double>(factor_drops[i]));
  }
  if (obs.size() <= 1) return true;
  return branching_factor(obs) <= branching_factor(claimed) + 1e-12;
}

class LedgerViolation : public std::logic_error {
 public:
  explicit LedgerViolation(const LedgerEntry& e) : std::logic_error("ledger violation: " + e.describe()), entry_(e) {}
  const LedgerEntry& entry() const { return entry_; }

 private:
  LedgerEntry entry_;
};

struct LedgerTally {
  std::size_t entries = 0;
  std::size_t failures = 0;
  std::size_t resolved_children = 0;
  std::size_t fallbacks = 0;
  /// Failing entries whose observed factor still stays within the claimed one.
  std::size_t failures_within_factor = 0;
};

/// Aggregates entries without keeping them, so memory stays bounded. In strict
/// mode the first failing entry throws.
class MeasureLedger {
 public:
  enum class Mode { strict, record };

  explicit MeasureLedger(Mode mode = Mode::strict) : mode_(mode) {}

  void record(const LedgerEntry& e) {
    auto& t = tally_[e.scheme];
    ++t.entries;
    if (e.fallback) ++t.fallbacks;
    for (bool r : e.resolved) t.resolved_children += r ? 1U : 0U;
    if (!e.pass()) {
      ++t.failures;
      if (e.within_claimed_factor().value_or(false)) ++t.failures_within_factor;
      if (first_failures_.size() < 16) first_failures_.push_back(e.describe());
      if (mode_ == Mode::strict) throw LedgerViolation(e);
    }
  }

  void merge(const MeasureLedger& other) {
    for (const auto& [k, v] : other.tally_) {
      auto& t = tally_[k];
      t.entries += v.entries;
      t.failures += v.failures;
      t.resolved_children += v.resolved_children;
      t.fallbacks += v.fallbacks;
      t.failures_within_factor += v.failures_within_factor;
    }
    for (const auto& s : other.first_failures_) {
      if (first_failures_.size() < 16) first_failures_.push_back(s);
    }
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& [k, v] : tally_) n += v.failures;
    return n;
  }
  std::size_t entries() const {
    std::size_t n = 0;
    for (const auto& [k, v] : tally_) n += v.entries;
    return n;
  }
  const std::map<std::string, LedgerTally>& tally() const { return tally_; }
  const std::vector<std::string>& first_failures() const { return first_failures_; }
  Mode mode() const { return mode_; }

 private:
  Mode mode_;
  std::map<std::string, LedgerTally> tally_;
  std::vector<std::string> first_failures_;
};

}  // namespace xparity
