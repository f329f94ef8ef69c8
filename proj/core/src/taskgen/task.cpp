#include "uat/taskgen/task.hpp"

#include <algorithm>

#include "uat/refmachine/machine.hpp"

namespace uat::taskgen {

using refmachine::Instruction;
using refmachine::Opcode;

namespace {

constexpr std::uint64_t kRunSteps = 1u << 16;

LevinCost own_cost(const Program& p, std::size_t n) {
  const auto run = refmachine::run_program(p, kRunSteps, n);
  if (!run.complete()) return {};
  return LevinCost{p.length(), run.steps_at[n - 1]};
}

}  // namespace

bool answer_uniqueness(const SymbolSequence& prefix, Symbol candidate, double margin,
                       const SearchBudget& budget, int alphabet) {
  if (prefix.empty()) throw std::invalid_argument("answer_uniqueness: empty prefix");
  const auto profile = refmachine::continuation_profile(prefix, budget, alphabet, margin);
  if (!profile.best) throw refmachine::NotFoundWithinBudget("no continuation of " + prefix.compact());
  return profile.best->symbol == candidate && profile.margin() >= margin;
}

Task make_task(const Program& generator, std::size_t prefix_len, const SearchBudget& budget,
               double margin) {
  if (prefix_len == 0) throw std::invalid_argument("make_task: prefix_len must be positive");
  const auto run = refmachine::run_program(generator, kRunSteps, prefix_len + 1);
  if (!run.complete()) {
    throw std::invalid_argument("make_task: generator emits fewer than " +
                                std::to_string(prefix_len + 1) + " symbols");
  }
  Task t;
  t.generator = generator;
  t.prefix = run.output.prefix(prefix_len);
  t.answer = run.output[prefix_len];
  t.id = t.prefix.compact() + "_" + refmachine::symbol_char(t.answer);

  const auto profile = refmachine::continuation_profile(t.prefix, budget, generator.alphabet(), margin);
  if (profile.best && profile.best->symbol == t.answer) {
    t.cost = profile.best->result.cost;
    t.discriminative = profile.margin() >= margin;
  } else {
    try {
      t.cost = refmachine::kt_complexity(t.full(), budget, generator.alphabet()).cost;
    } catch (const refmachine::NotFoundWithinBudget&) {
      t.cost = own_cost(generator, prefix_len + 1);
      t.difficulty_exact = false;
    }
    // Uniqueness is undecided when the answer is not reachable in budget; a
    // reachable runner-up means it is not the best continuation.
    t.discriminative = false;
  }
  t.difficulty = t.cost.kt();
  return t;
}

std::optional<Task> task_from_program(const Program& generator, const SearchBudget& budget,
                                      const PrefixRule& rule) {
  const std::size_t first = std::max<std::size_t>(rule.min_prefix, 2) - 1;
  const auto run = refmachine::run_program(generator, kRunSteps, rule.max_prefix + 1);
  if (!run.complete()) return std::nullopt;
  const auto& out = run.output;

  std::optional<std::size_t> unique_at;
  for (std::size_t n = first; n + 1 <= rule.max_prefix; ++n) {
    const auto profile =
        refmachine::continuation_profile(out.prefix(n), budget, generator.alphabet(),
                                         rule.margin);
    if (profile.best && profile.best->result.value.value > rule.max_kt) return std::nullopt;
    const bool unique = profile.best && profile.best->symbol == out[n] &&
                        profile.margin() >= rule.margin;
    if (!unique) {
      unique_at.reset();
      continue;
    }
    if (!unique_at) {
      unique_at = n;
      continue;
    }
    // out[0..n) already has a unique continuation and so does its extension:
    // show n symbols and ask for out[n].
    Task t;
    t.generator = generator;
    t.prefix = out.prefix(n);
    t.answer = out[n];
    t.id = t.prefix.compact() + "_" + refmachine::symbol_char(t.answer);
    t.cost = profile.best->result.cost;
    t.difficulty = t.cost.kt();
    t.discriminative = true;
    return t;
  }
  return std::nullopt;
}

namespace {

// Random straight-or-looping code of at most `length` symbols with finite
// loops only.
std::vector<Instruction> random_block(int length, std::mt19937_64& rng, int alphabet) {
  enum Kind { kEmit, kSwap, kEnd, kAdd, kSub, kLoop, kSet, kKinds };
  std::vector<Instruction> code;
  int used = 0;
  int depth = 0;
  while (used < length) {
    const int left = length - used;
    const auto kind = static_cast<Kind>(std::uniform_int_distribution<int>(0, kKinds - 1)(rng));
    Instruction ins;
    switch (kind) {
      case kEmit: ins = {Opcode::Emit, 0}; break;
      case kSwap: ins = {Opcode::Swap, 0}; break;
      case kEnd:
        if (depth == 0 || code.back().op == Opcode::Loop) continue;
        ins = {Opcode::LoopEnd, 0};
        break;
      case kAdd:
      case kSub: {
        const auto k = std::uniform_int_distribution<int>(1, refmachine::kMaxStep)(rng);
        ins = {kind == kAdd ? Opcode::Add : Opcode::Sub, static_cast<std::uint8_t>(k)};
        break;
      }
      case kLoop: {
        const auto n = std::uniform_int_distribution<int>(2, refmachine::kMaxStep)(rng);
        ins = {Opcode::Loop, static_cast<std::uint8_t>(n)};
        break;
      }
      case kSet:
        ins = {Opcode::Set,
               static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, alphabet - 1)(rng))};
        break;
      default: continue;
    }
    const int after = depth + (ins.op == Opcode::Loop) - (ins.op == Opcode::LoopEnd);
    if (ins.encoded_length() + after > left) {
      if (depth == 0 || code.back().op == Opcode::Loop) break;
      ins = {Opcode::LoopEnd, 0};
    }
    code.push_back(ins);
    used += ins.encoded_length();
    depth += (ins.op == Opcode::Loop) - (ins.op == Opcode::LoopEnd);
  }
  while (!code.empty() && depth > 0 && code.back().op == Opcode::Loop) {
    code.pop_back();
    --depth;
  }
  for (; depth > 0; --depth) code.push_back({Opcode::LoopEnd, 0});
  return code;
}

}  // namespace

Program random_program(int length, std::mt19937_64& rng, int alphabet) {
  if (length < 5) throw std::invalid_argument("random_program: length must be at least 5");
  for (;;) {
    // Preamble, then LOOP* body END with 3 symbols of loop overhead.
    const int body_room = length - 3;
    const int preamble = std::uniform_int_distribution<int>(0, std::min(4, body_room - 1))(rng);
    std::vector<Instruction> code = random_block(preamble, rng, alphabet);
    std::vector<Instruction> body = random_block(body_room - preamble, rng, alphabet);
    if (std::none_of(body.begin(), body.end(),
                     [](const Instruction& i) { return i.op == Opcode::Emit; })) {
      continue;
    }
    code.push_back({Opcode::Loop, refmachine::kLoopForever});
    code.insert(code.end(), body.begin(), body.end());
    code.push_back({Opcode::LoopEnd, 0});
    if (!Program::validate(code, alphabet).empty()) continue;
    return Program(std::move(code), alphabet);
  }
}

Task generate_task(const DifficultyBand& band, std::uint64_t seed, const GenerationOptions& options) {
  if (band.hi <= band.lo) throw std::invalid_argument("generate_task: empty band");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len_dist(options.min_program_len, options.max_program_len);
  for (int attempt = 0; attempt < options.attempts; ++attempt) {
    const Program p = random_program(len_dist(rng), rng, options.alphabet);
    // The generator's own cost bounds the task's Kt from above; skip programs
    // that are certainly too easy before paying for a search.
    const auto run = refmachine::run_program(p, kRunSteps, options.prefix.max_prefix + 1);
    if (!run.complete()) continue;
    const LevinCost bound{p.length(), run.steps_at[options.prefix.min_prefix]};
    if (bound.kt().value < band.lo) continue;
    PrefixRule rule = options.prefix;
    rule.max_kt = std::min(rule.max_kt, band.hi);
    auto task = task_from_program(p, options.budget, rule);
    if (task && band.contains(task->difficulty.value)) return *task;
  }
  throw BandUnreachable("no discriminative task with Kt in [" + std::to_string(band.lo) + ", " +
                        std::to_string(band.hi) + ") after " + std::to_string(options.attempts) +
                        " attempts");
}

}  // namespace uat::taskgen
