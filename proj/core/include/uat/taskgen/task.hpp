#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "uat/refmachine/kt.hpp"
#include "uat/refmachine/program.hpp"

namespace uat::taskgen {

using refmachine::KtValue;
using refmachine::LevinCost;
using refmachine::Program;
using refmachine::SearchBudget;
using refmachine::Symbol;
using refmachine::SymbolSequence;

/// A series-continuation item: the agent sees `prefix` and must produce `answer`.
struct Task {
  std::string id;
  Program generator;
  SymbolSequence prefix;
  Symbol answer = 0;
  /// Levin cost of prefix + answer. Exact when `difficulty_exact`, otherwise the
  /// cost of the generator itself, which bounds the true value from above.
  LevinCost cost;
  KtValue difficulty;
  bool difficulty_exact = true;
  bool discriminative = false;

  int alphabet() const { return generator.alphabet(); }
  SymbolSequence full() const { return prefix.appended(answer); }
};

class BandUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open Kt interval [lo, hi).
struct DifficultyBand {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double kt) const { return kt >= lo && kt < hi; }
};

inline constexpr double kDefaultMargin = 1.0;

/// True iff prefix + candidate is the cheapest continuation and beats every
/// other continuation by at least `margin` Kt units within the budget.
bool answer_uniqueness(const SymbolSequence& prefix, Symbol candidate, double margin,
                       const SearchBudget& budget, int alphabet = refmachine::kDefaultAlphabet);

/// Builds a task showing the first `prefix_len` outputs of `generator`.
/// Difficulty falls back to the generator's own cost when the search budget
/// cannot reach prefix + answer.
Task make_task(const Program& generator, std::size_t prefix_len, const SearchBudget& budget,
               double margin = kDefaultMargin);

struct PrefixRule {
  std::size_t min_prefix = 4;
  std::size_t max_prefix = 12;
  double margin = kDefaultMargin;
  /// Give up once the best continuation costs more than this; Kt of a prefix
  /// never decreases as it grows.
  double max_kt = std::numeric_limits<double>::infinity();
};

/// Uses the shortest prefix (of at least min_prefix - 1 symbols) whose
/// continuation is unique, plus one extra symbol. Returns nullopt when no
/// prefix up to max_prefix is discriminative.
std::optional<Task> task_from_program(const Program& generator, const SearchBudget& budget,
                                      const PrefixRule& rule = {});

struct GenerationOptions {
  SearchBudget budget{12, 1u << 12};
  /// prefix.max_kt is tightened to the band's upper edge.
  PrefixRule prefix;
  int alphabet = refmachine::kDefaultAlphabet;
  int min_program_len = 5;
  int max_program_len = 12;
  int attempts = 400;
};

/// Draws random generator programs until one yields a discriminative task
/// inside `band`. Deterministic in `seed`.
Task generate_task(const DifficultyBand& band, std::uint64_t seed,
                   const GenerationOptions& options = {});

/// A random series generator of at most `length` (>= 5) code symbols: a short
/// preamble followed by an unbounded loop whose body emits. Instruction kinds
/// are drawn uniformly, so SET does not crowd out the control instructions.
Program random_program(int length, std::mt19937_64& rng,
                       int alphabet = refmachine::kDefaultAlphabet);

}  // namespace uat::taskgen
