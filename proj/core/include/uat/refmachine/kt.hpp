#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "uat/refmachine/program.hpp"

namespace uat::refmachine {

/// Levin complexity in bits: code length plus log2 of the steps used.
struct KtValue {
  double value = 0.0;
  auto operator<=>(const KtValue&) const = default;
};

/// Exact form of a Kt value. Comparing steps * 2^length avoids any rounding
/// in the log, so ties between witnesses are detected exactly.
struct LevinCost {
  int length = 0;
  std::uint64_t steps = 0;

  unsigned __int128 weight() const { return static_cast<unsigned __int128>(steps) << length; }
  KtValue kt() const;

  friend bool operator<(const LevinCost& a, const LevinCost& b) { return a.weight() < b.weight(); }
  friend bool operator==(const LevinCost& a, const LevinCost& b) { return a.weight() == b.weight(); }
};

struct SearchBudget {
  int max_len = 14;
  std::uint64_t max_steps = 1u << 12;
};

struct KtResult {
  KtValue value;
  LevinCost cost;
  Program witness;
};

class NotFoundWithinBudget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimum Levin cost over all programs within the budget whose output starts
/// with x. Among equal costs the lexicographically smallest encoding wins.
/// Exact within the searched space; an upper bound on Kt beyond it.
KtResult kt_complexity(const SymbolSequence& x, const SearchBudget& budget,
                       int alphabet = kDefaultAlphabet);

/// Best and runner-up next symbols after a prefix, ranked by the Levin cost of
/// prefix + symbol. Only the two leading symbols are resolved exactly.
struct ContinuationProfile {
  struct Entry {
    Symbol symbol = 0;
    KtResult result;
  };
  std::optional<Entry> best;
  std::optional<Entry> runner_up;
  /// Certified lower bound on the gap when the runner-up was not resolved:
  /// every other continuation costs at least this much more than the best.
  double margin_floor = std::numeric_limits<double>::infinity();

  /// Kt gap between the runner-up and the best continuation, or margin_floor
  /// when the search stopped before resolving the runner-up.
  double margin() const;
};

/// With a finite margin_cap the search stops once the gap is known to be at
/// least margin_cap, leaving runner_up empty. This is all a uniqueness test
/// needs and avoids paying for the (often much more expensive) runner-up.
ContinuationProfile continuation_profile(
    const SymbolSequence& prefix, const SearchBudget& budget, int alphabet = kDefaultAlphabet,
    double margin_cap = std::numeric_limits<double>::infinity());

}  // namespace uat::refmachine
