#include "uat/refmachine/enumerate.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace uat::refmachine {

namespace {

class Enumerator {
 public:
  Enumerator(int target_len, int alphabet, const std::function<bool(const Program&)>& visit)
      : target_(target_len), alphabet_(alphabet), table_(instruction_table(alphabet)), visit_(visit) {}

  bool run() { return extend(0, 0, false); }

 private:
  bool extend(int len, int depth, bool emits) {
    if (len == target_) {
      if (depth == 0 && emits) return visit_(Program(current_, alphabet_));
      return true;
    }
    for (const auto& ins : table_) {
      const int next_len = len + ins.encoded_length();
      int next_depth = depth;
      if (ins.op == Opcode::Loop) ++next_depth;
      if (ins.op == Opcode::LoopEnd) {
        if (depth == 0) continue;
        --next_depth;
      }
      // Each open loop still needs one END symbol.
      if (next_len + next_depth > target_) continue;
      current_.push_back(ins);
      const bool keep_going = extend(next_len, next_depth, emits || ins.op == Opcode::Emit);
      current_.pop_back();
      if (!keep_going) return false;
    }
    return true;
  }

  int target_;
  int alphabet_;
  std::vector<Instruction> table_;
  const std::function<bool(const Program&)>& visit_;
  std::vector<Instruction> current_;
};

}  // namespace

void enumerate_programs(int max_len, const std::function<bool(const Program&)>& visit,
                        int alphabet) {
  if (max_len < 1) throw std::invalid_argument("enumerate_programs: max_len must be >= 1");
  for (int len = 1; len <= max_len; ++len) {
    Enumerator e(len, alphabet, visit);
    if (!e.run()) return;
  }
}

std::vector<Program> enumerate_program_list(int max_len, int alphabet) {
  std::vector<Program> out;
  enumerate_programs(max_len, [&](const Program& p) {
    out.push_back(p);
    return true;
  }, alphabet);
  return out;
}

std::uint64_t count_programs(int length, int alphabet) {
  // ways(remaining, depth, emitted) over the instruction classes of the table.
  std::map<std::tuple<int, int, bool>, std::uint64_t> memo;
  const std::uint64_t two_symbol_plain = 2 * kMaxStep + static_cast<std::uint64_t>(alphabet);
  const std::uint64_t loop_heads = kMaxStep;  // LOOP*, LOOP2..LOOP4

  auto ways = [&](auto&& self, int remaining, int depth, bool emitted) -> std::uint64_t {
    if (remaining < 0 || depth > remaining) return 0;
    if (remaining == 0) return (depth == 0 && emitted) ? 1 : 0;
    auto key = std::make_tuple(remaining, depth, emitted);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::uint64_t total = 0;
    total += self(self, remaining - 1, depth, true);        // EMIT
    total += self(self, remaining - 1, depth, emitted);     // SWAP
    if (depth > 0) total += self(self, remaining - 1, depth - 1, emitted);  // END
    total += two_symbol_plain * self(self, remaining - 2, depth, emitted);  // ADD, SUB, SET
    total += loop_heads * self(self, remaining - 2, depth + 1, emitted);    // LOOP
    memo[key] = total;
    return total;
  };
  return ways(ways, length, 0, false);
}

}  // namespace uat::refmachine
