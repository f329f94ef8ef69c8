#pragma once

#include <cstdint>
#include <vector>

#include "uat/refmachine/program.hpp"

namespace uat::refmachine {

enum class RunStatus {
  Complete,              // n_emit symbols were produced
  Halted,                // the program ended before n_emit symbols
  StepBudgetExhausted,   // too slow, or stuck in a non-emitting loop
};

struct RunResult {
  SymbolSequence output;
  /// steps_at[i] is the step count (1-based) at which output[i] was emitted.
  std::vector<std::uint64_t> steps_at;
  std::uint64_t steps = 0;
  RunStatus status = RunStatus::Complete;

  bool complete() const { return status == RunStatus::Complete; }
};

/// Executes a program on the two-register modular machine.
///
/// Both registers start at symbol 0. Every executed instruction, including
/// LOOP and END, costs one step. Execution stops once n_emit symbols have been
/// emitted, the program halts, or max_steps is reached.
RunResult run_program(const Program& program, std::uint64_t max_steps, std::size_t n_emit);

}  // namespace uat::refmachine
