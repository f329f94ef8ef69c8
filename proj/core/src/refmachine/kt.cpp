#include "uat/refmachine/kt.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace uat::refmachine {

KtValue LevinCost::kt() const {
  return KtValue{static_cast<double>(length) + std::log2(static_cast<double>(steps))};
}

double ContinuationProfile::margin() const {
  if (!best) return 0.0;
  if (!runner_up) return margin_floor;
  return runner_up->result.value.value - best->result.value.value;
}

namespace {

using Weight = unsigned __int128;
constexpr Weight kUnbounded = ~Weight{0};

bool is_straight(Opcode op) {
  return op == Opcode::Swap || op == Opcode::Add || op == Opcode::Sub || op == Opcode::Set;
}

// Effect of a straight run of SWAP/ADD/SUB/SET on the register pair. Each
// output register is an input register plus an offset, or a constant.
class SegmentTable {
 public:
  enum Source : std::uint8_t { kReg, kAux, kConst };

  struct Effect {
    std::uint8_t reg_src = kReg, reg_off = 0, aux_src = kAux, aux_off = 0;
  };

  explicit SegmentTable(int modulus)
      : modulus_(modulus), width_(static_cast<std::size_t>(9 * modulus * modulus)) {
    min_steps_.assign(static_cast<std::size_t>(kMaxLen + 1) * width_, kNone);
    min_steps_[index(Effect{})] = 0;
    const auto table = instruction_table(modulus);
    for (int len = 0; len < kMaxLen; ++len) {
      for (std::size_t f = 0; f < width_; ++f) {
        const std::uint8_t steps = at(len, f);
        if (steps == kNone) continue;
        const Effect e = decode(f);
        for (const auto& ins : table) {
          if (!is_straight(ins.op)) continue;
          const int next_len = len + ins.encoded_length();
          if (next_len > kMaxLen) continue;
          auto& slot = min_steps_[static_cast<std::size_t>(next_len) * width_ + index(apply(e, ins))];
          slot = std::min<std::uint8_t>(slot, static_cast<std::uint8_t>(steps + 1));
        }
      }
    }
  }

  Effect apply(Effect e, const Instruction& ins) const {
    switch (ins.op) {
      case Opcode::Swap:
        std::swap(e.reg_src, e.aux_src);
        std::swap(e.reg_off, e.aux_off);
        break;
      case Opcode::Add:
        e.reg_off = static_cast<std::uint8_t>((e.reg_off + ins.arg) % modulus_);
        break;
      case Opcode::Sub:
        e.reg_off = static_cast<std::uint8_t>((e.reg_off + modulus_ - ins.arg % modulus_) % modulus_);
        break;
      case Opcode::Set:
        e.reg_src = kConst;
        e.reg_off = ins.arg;
        break;
      default:
        break;
    }
    return e;
  }

  // True when some run with the same effect is strictly cheaper: shorter with
  // no more steps, or equally long with fewer steps.
  bool dominated(const Effect& e, int len, int steps) const {
    if (len > kMaxLen) return false;
    const std::size_t f = index(e);
    for (int l = 0; l < len; ++l) {
      if (at(l, f) <= steps) return true;
    }
    return at(len, f) < steps;
  }

  static const SegmentTable& get(int modulus) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<SegmentTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[modulus];
    if (!slot) slot = std::make_unique<SegmentTable>(modulus);
    return *slot;
  }

 private:
  static constexpr int kMaxLen = 16;
  static constexpr std::uint8_t kNone = 0xff;

  std::uint8_t at(int len, std::size_t f) const {
    return min_steps_[static_cast<std::size_t>(len) * width_ + f];
  }

  std::size_t index(const Effect& e) const {
    const auto m = static_cast<std::size_t>(modulus_);
    return ((static_cast<std::size_t>(e.reg_src) * m + e.reg_off) * 3 + e.aux_src) * m + e.aux_off;
  }

  Effect decode(std::size_t f) const {
    const auto m = static_cast<std::size_t>(modulus_);
    Effect e;
    e.aux_off = static_cast<std::uint8_t>(f % m);
    f /= m;
    e.aux_src = static_cast<std::uint8_t>(f % 3);
    f /= 3;
    e.reg_off = static_cast<std::uint8_t>(f % m);
    e.reg_src = static_cast<std::uint8_t>(f / m);
    return e;
  }

  int modulus_;
  std::size_t width_;
  std::vector<std::uint8_t> min_steps_;
};

// Levin search over partial programs.
//
// A partial program is executed up to its frontier: loops only jump backwards,
// so the trace until the program counter reaches the first unwritten
// instruction is shared by every extension. A node is pruned when that shared
// trace already mismatches the target, already exceeds the cost bound, or
// already emits the whole target (every extension is then strictly longer).
//
// Independently of the trace, extensions that are strictly dominated by a
// cheaper program with the same output are skipped:
//   - a straight SWAP/ADD/SUB/SET run that has a cheaper equivalent run,
//   - SWAP or SETa as the very first instruction,
//   - empty loops, unbounded loops below top level, and unbounded loops
//     whose body never emits.
// None of these can remove a minimum-cost witness, so results are exact
// within the budget.
class LevinSearch {
 public:
  LevinSearch(const SymbolSequence& target, bool wildcard_last, const SearchBudget& budget,
              int alphabet, double margin_cap = std::numeric_limits<double>::infinity())
      : margin_cap_(margin_cap),
        target_(target.symbols()),
        need_(target.size() + (wildcard_last ? 1 : 0)),
        wildcard_(wildcard_last),
        budget_(budget),
        alphabet_(alphabet),
        table_(instruction_table(alphabet)),
        segments_(SegmentTable::get(alphabet)) {
    best_weight_.fill(kUnbounded);
  }

  // Levin phases: phase k admits programs with length + log2(steps) < k.
  // The first phase that resolves the answer is exact, because every program
  // it did not admit costs at least 2^k.
  void run() {
    const int last_phase = budget_.max_len + std::bit_width(budget_.max_steps) + 1;
    for (int k = std::bit_width(need_); k <= last_phase; ++k) {
      phase_limit_ = k == last_phase ? kUnbounded : Weight{1} << k;
      phase_ = k;
      seen_.clear();
      Exec root;
      extend(root, 0);
      if (resolved()) return;
      if (wildcard_ && capped()) return;
    }
  }

  bool resolved() const {
    if (!wildcard_) return found_exact();
    return top_two().second >= 0;
  }

  // Every program below 2^phase has been seen, so an unresolved runner-up
  // costs at least `phase` bits.
  double certified_gap() const {
    const int first = top_two().first;
    if (first < 0 || phase_limit_ == kUnbounded) return std::numeric_limits<double>::infinity();
    return phase_ - best_cost_[first].kt().value;
  }

  bool capped() const { return top_two().first >= 0 && certified_gap() >= margin_cap_; }

  bool found_exact() const { return exact_weight_ != kUnbounded; }
  KtResult exact() const { return result(exact_cost_, exact_program_); }

  ContinuationProfile profile() const {
    ContinuationProfile p;
    auto [first, second] = top_two();
    if (first >= 0) p.best = ContinuationProfile::Entry{static_cast<Symbol>(first),
                                                        result(best_cost_[first], best_program_[first])};
    if (second >= 0) {
      p.runner_up = ContinuationProfile::Entry{static_cast<Symbol>(second),
                                               result(best_cost_[second], best_program_[second])};
    } else if (first >= 0) {
      p.margin_floor = certified_gap();
    }
    return p;
  }

 private:
  struct Frame {
    std::uint16_t body = 0;
    std::int16_t remaining = 0;  // < 0: forever
  };
  static constexpr int kMaxDepth = 16;

  struct Exec {
    std::array<Frame, kMaxDepth> frames{};
    std::array<bool, kMaxDepth> body_emits{};
    int depth = 0;
    int reg = 0;
    int aux = 0;
    std::size_t emitted = 0;
    std::uint64_t steps = 0;
    std::size_t pc = 0;
    // Trailing straight run of the written code.
    SegmentTable::Effect run;
    int run_len = 0;
    int run_steps = 0;
  };

  enum class Outcome { Frontier, Reached, Dead };

  static KtResult result(const LevinCost& cost, const std::vector<Instruction>& code) {
    return KtResult{cost.kt(), cost, Program(code)};
  }

  std::pair<int, int> top_two() const {
    int first = -1;
    int second = -1;
    for (int s = 0; s < alphabet_; ++s) {
      if (best_weight_[s] == kUnbounded) continue;
      if (first < 0 || best_weight_[s] < best_weight_[first]) {
        second = first;
        first = s;
      } else if (second < 0 || best_weight_[s] < best_weight_[second]) {
        second = s;
      }
    }
    return {first, second};
  }

  Weight bound() const {
    if (!wildcard_) return std::min(phase_limit_, exact_weight_);
    auto [first, second] = top_two();
    return second < 0 ? phase_limit_ : std::min(phase_limit_, best_weight_[second]);
  }

  static Weight weight(std::uint64_t steps, int len) {
    return static_cast<Weight>(steps) << len;
  }

  // Runs until the program counter reaches `frontier`.
  Outcome advance(Exec& ex, std::size_t frontier, int min_len, Weight limit) {
    while (ex.pc < frontier) {
      const Instruction& ins = code_[ex.pc];
      ++ex.steps;
      if (ex.steps > budget_.max_steps || weight(ex.steps, min_len) >= limit) return Outcome::Dead;
      switch (ins.op) {
        case Opcode::Emit: {
          const auto sym = static_cast<Symbol>(ex.reg);
          const bool free = wildcard_ && ex.emitted + 1 == need_;
          if (!free && sym != target_[ex.emitted]) return Outcome::Dead;
          last_symbol_ = sym;
          ++ex.emitted;
          ++ex.pc;
          if (ex.emitted == need_) return Outcome::Reached;
          break;
        }
        case Opcode::Swap:
          std::swap(ex.reg, ex.aux);
          ++ex.pc;
          break;
        case Opcode::Add:
          ex.reg = (ex.reg + ins.arg) % alphabet_;
          ++ex.pc;
          break;
        case Opcode::Sub:
          ex.reg = (ex.reg - ins.arg % alphabet_ + alphabet_) % alphabet_;
          ++ex.pc;
          break;
        case Opcode::Set:
          ex.reg = ins.arg;
          ++ex.pc;
          break;
        case Opcode::Loop:
          ex.frames[ex.depth++] = Frame{static_cast<std::uint16_t>(ex.pc + 1),
                                        static_cast<std::int16_t>(ins.arg == kLoopForever ? -1 : ins.arg)};
          ++ex.pc;
          break;
        case Opcode::LoopEnd: {
          Frame& top = ex.frames[ex.depth - 1];
          if (top.remaining < 0 || --top.remaining > 0) {
            ex.pc = top.body;
          } else {
            --ex.depth;
            ++ex.pc;
          }
          break;
        }
      }
    }
    return Outcome::Frontier;
  }

  // Structural pruning independent of the trace. Also updates the trailing
  // straight run of `next`.
  bool dominated(const Exec& ex, Exec& next, const Instruction& ins) const {
    if (code_.empty()) {
      if (ins.op == Opcode::Swap) return true;
      if (ins.op == Opcode::Set && ins.arg == 0) return true;
    }
    if (is_straight(ins.op)) {
      next.run = segments_.apply(ex.run, ins);
      next.run_len = ex.run_len + ins.encoded_length();
      next.run_steps = ex.run_steps + 1;
      return segments_.dominated(next.run, next.run_len, next.run_steps);
    }
    next.run = SegmentTable::Effect{};
    next.run_len = 0;
    next.run_steps = 0;
    if (ins.op == Opcode::LoopEnd && !code_.empty() && code_.back().op == Opcode::Loop) return true;
    if (ins.op == Opcode::Loop && ins.arg == kLoopForever && ex.depth > 0) return true;
    return false;
  }

  // Outside every loop the remaining execution depends only on the register
  // pair and how much of the target has been matched, not on the code written
  // so far. A top-level node is therefore dominated by an earlier node (which
  // is lexicographically smaller) with the same state and no greater length
  // or step count. Returns false for dominated nodes.
  bool claim(const Exec& ex, int len) {
    const auto key = static_cast<std::uint32_t>(
        (ex.emitted * kMaxAlphabet + static_cast<std::size_t>(ex.aux)) * kMaxAlphabet +
        static_cast<std::size_t>(ex.reg));
    auto& front = seen_[key];
    for (const auto& [l, st] : front) {
      if (l <= len && st <= ex.steps) return false;
    }
    std::erase_if(front, [&](const auto& e) { return len <= e.first && ex.steps <= e.second; });
    front.emplace_back(len, ex.steps);
    return true;
  }

  // open_loops: loops still unterminated in the written code; the witness
  // closes them immediately, which is the cheapest completion.
  void record(const Exec& ex, int len, int open_loops) {
    const LevinCost cost{len + open_loops, ex.steps};
    const Weight w = cost.weight();
    std::vector<Instruction> code = code_;
    for (int d = 0; d < open_loops; ++d) code.push_back({Opcode::LoopEnd, 0});
    if (!wildcard_) {
      if (w < exact_weight_) {
        exact_weight_ = w;
        exact_cost_ = cost;
        exact_program_ = std::move(code);
      }
      return;
    }
    if (w < best_weight_[last_symbol_]) {
      best_weight_[last_symbol_] = w;
      best_cost_[last_symbol_] = cost;
      best_program_[last_symbol_] = std::move(code);
    }
  }

  void extend(const Exec& ex, int len) {
    for (const auto& ins : table_) {
      int depth_after = ex.depth;
      if (ins.op == Opcode::Loop) {
        if (ex.depth + 1 >= kMaxDepth) continue;
        ++depth_after;
      } else if (ins.op == Opcode::LoopEnd) {
        if (ex.depth == 0) continue;
        const Frame& top = ex.frames[ex.depth - 1];
        if (top.remaining < 0 && !ex.body_emits[ex.depth - 1]) continue;
        --depth_after;
      }
      const int new_len = len + ins.encoded_length();
      const int min_len = new_len + depth_after;
      if (min_len > budget_.max_len) continue;
      const Weight limit = bound();
      if (weight(ex.steps + (need_ - ex.emitted), min_len) >= limit) continue;

      Exec next = ex;
      if (dominated(ex, next, ins)) continue;
      if (ins.op == Opcode::Loop) next.body_emits[next.depth] = false;
      if (ins.op == Opcode::Emit) {
        for (int d = 0; d < next.depth; ++d) next.body_emits[d] = true;
      }
      if (ins.op == Opcode::LoopEnd && ex.depth >= 2 && ex.body_emits[ex.depth - 1]) {
        next.body_emits[ex.depth - 2] = true;
      }

      code_.push_back(ins);
      const Outcome outcome = advance(next, code_.size(), min_len, limit);
      if (outcome == Outcome::Reached) {
        record(next, new_len, depth_after);
      } else if (outcome == Outcome::Frontier && (next.depth > 0 || claim(next, new_len))) {
        extend(next, new_len);
      }
      code_.pop_back();
    }
  }

  double margin_cap_;
  int phase_ = 0;
  std::vector<Symbol> target_;
  std::size_t need_;
  bool wildcard_;
  SearchBudget budget_;
  int alphabet_;
  std::vector<Instruction> table_;
  const SegmentTable& segments_;
  std::vector<Instruction> code_;
  Symbol last_symbol_ = 0;
  Weight phase_limit_ = kUnbounded;
  std::unordered_map<std::uint32_t, std::vector<std::pair<int, std::uint64_t>>> seen_;

  Weight exact_weight_ = kUnbounded;
  LevinCost exact_cost_;
  std::vector<Instruction> exact_program_;

  std::array<Weight, kMaxAlphabet> best_weight_{};
  std::array<LevinCost, kMaxAlphabet> best_cost_{};
  std::array<std::vector<Instruction>, kMaxAlphabet> best_program_{};
};

}  // namespace

KtResult kt_complexity(const SymbolSequence& x, const SearchBudget& budget, int alphabet) {
  if (x.empty()) throw std::invalid_argument("kt_complexity: empty sequence");
  if (budget.max_len < 1 || budget.max_steps == 0) {
    throw std::invalid_argument("kt_complexity: budget must allow at least one program");
  }
  LevinSearch search(x, false, budget, alphabet);
  search.run();
  if (!search.found_exact()) {
    throw NotFoundWithinBudget("no program of length <= " + std::to_string(budget.max_len) +
                               " emits " + x.compact());
  }
  return search.exact();
}

ContinuationProfile continuation_profile(const SymbolSequence& prefix, const SearchBudget& budget,
                                         int alphabet, double margin_cap) {
  if (prefix.empty()) throw std::invalid_argument("continuation_profile: empty prefix");
  if (budget.max_len < 1 || budget.max_steps == 0) {
    throw std::invalid_argument("continuation_profile: budget must allow at least one program");
  }
  LevinSearch search(prefix, true, budget, alphabet, margin_cap);
  search.run();
  return search.profile();
}

}  // namespace uat::refmachine
