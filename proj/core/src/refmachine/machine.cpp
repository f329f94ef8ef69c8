#include "uat/refmachine/machine.hpp"

#include <stdexcept>
#include <utility>

namespace uat::refmachine {

RunResult run_program(const Program& program, std::uint64_t max_steps, std::size_t n_emit) {
  if (max_steps == 0) throw std::invalid_argument("run_program: max_steps must be positive");
  if (n_emit == 0) throw std::invalid_argument("run_program: n_emit must be positive");

  const auto& code = program.instructions();
  const int modulus = program.alphabet();

  struct Frame {
    std::size_t body;
    int remaining;  // < 0: forever
  };
  std::vector<Frame> frames;
  std::vector<Symbol> out;
  out.reserve(n_emit);

  RunResult result;
  int reg = 0;
  int aux = 0;
  std::size_t pc = 0;
  std::uint64_t steps = 0;

  while (pc < code.size()) {
    if (steps == max_steps) {
      result.status = RunStatus::StepBudgetExhausted;
      break;
    }
    const Instruction& ins = code[pc];
    ++steps;
    switch (ins.op) {
      case Opcode::Emit:
        out.push_back(static_cast<Symbol>(reg));
        result.steps_at.push_back(steps);
        ++pc;
        break;
      case Opcode::Swap:
        std::swap(reg, aux);
        ++pc;
        break;
      case Opcode::Add:
        reg = (reg + ins.arg) % modulus;
        ++pc;
        break;
      case Opcode::Sub:
        reg = (reg - ins.arg % modulus + modulus) % modulus;
        ++pc;
        break;
      case Opcode::Set:
        reg = ins.arg;
        ++pc;
        break;
      case Opcode::Loop:
        frames.push_back({pc + 1, ins.arg == kLoopForever ? -1 : static_cast<int>(ins.arg)});
        ++pc;
        break;
      case Opcode::LoopEnd: {
        Frame& top = frames.back();
        if (top.remaining < 0 || --top.remaining > 0) {
          pc = top.body;
        } else {
          frames.pop_back();
          ++pc;
        }
        break;
      }
    }
    if (out.size() == n_emit) break;
  }

  if (result.status != RunStatus::StepBudgetExhausted && out.size() < n_emit) {
    result.status = RunStatus::Halted;
  }
  result.steps = steps;
  result.output = SymbolSequence(std::move(out));
  return result;
}

}  // namespace uat::refmachine
