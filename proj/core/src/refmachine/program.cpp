#include "uat/refmachine/program.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace uat::refmachine {

char symbol_char(Symbol s) { return static_cast<char>('a' + s); }

Symbol symbol_from_char(char c, int alphabet) {
  if (c < 'a' || c >= 'a' + alphabet) {
    throw ParseError(std::string("symbol out of alphabet: '") + c + "'");
  }
  return static_cast<Symbol>(c - 'a');
}

SymbolSequence SymbolSequence::parse(std::string_view text, int alphabet) {
  std::vector<Symbol> out;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
    out.push_back(symbol_from_char(c, alphabet));
  }
  return SymbolSequence(std::move(out));
}

std::string SymbolSequence::str() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(symbol_char(symbols_[i]));
  }
  return out;
}

std::string SymbolSequence::compact() const {
  std::string out;
  for (Symbol s : symbols_) out.push_back(symbol_char(s));
  return out;
}

SymbolSequence SymbolSequence::prefix(std::size_t n) const {
  n = std::min(n, symbols_.size());
  return SymbolSequence(std::vector<Symbol>(symbols_.begin(), symbols_.begin() + n));
}

SymbolSequence SymbolSequence::appended(Symbol s) const {
  auto copy = symbols_;
  copy.push_back(s);
  return SymbolSequence(std::move(copy));
}

int Instruction::encoded_length() const {
  switch (op) {
    case Opcode::Emit:
    case Opcode::Swap:
    case Opcode::LoopEnd:
      return 1;
    default:
      return 2;
  }
}

int Instruction::arg_code() const {
  switch (op) {
    case Opcode::Add:
    case Opcode::Sub:
      return arg - 1;
    case Opcode::Loop:
      return arg == kLoopForever ? 0 : arg - 1;
    case Opcode::Set:
      return arg;
    default:
      return 0;
  }
}

std::string Instruction::text() const {
  switch (op) {
    case Opcode::Emit: return "EMIT";
    case Opcode::Swap: return "SWAP";
    case Opcode::LoopEnd: return "END";
    case Opcode::Add: return "ADD" + std::to_string(arg);
    case Opcode::Sub: return "SUB" + std::to_string(arg);
    case Opcode::Loop: return arg == kLoopForever ? std::string("LOOP*") : "LOOP" + std::to_string(arg);
    case Opcode::Set: return std::string("SET") + symbol_char(arg);
  }
  return "?";
}

std::vector<Instruction> instruction_table(int alphabet) {
  std::vector<Instruction> table;
  table.push_back({Opcode::Emit, 0});
  table.push_back({Opcode::Swap, 0});
  table.push_back({Opcode::LoopEnd, 0});
  for (int k = 1; k <= kMaxStep; ++k) table.push_back({Opcode::Add, static_cast<std::uint8_t>(k)});
  for (int k = 1; k <= kMaxStep; ++k) table.push_back({Opcode::Sub, static_cast<std::uint8_t>(k)});
  table.push_back({Opcode::Loop, kLoopForever});
  for (int n = 2; n <= kMaxStep; ++n) table.push_back({Opcode::Loop, static_cast<std::uint8_t>(n)});
  for (int s = 0; s < alphabet; ++s) table.push_back({Opcode::Set, static_cast<std::uint8_t>(s)});
  return table;
}

std::string Program::validate(std::span<const Instruction> instructions, int alphabet) {
  if (alphabet < 2 || alphabet > kMaxAlphabet) return "alphabet size out of range";
  int depth = 0;
  bool emits = false;
  for (const auto& ins : instructions) {
    switch (ins.op) {
      case Opcode::Emit: emits = true; break;
      case Opcode::Swap: break;
      case Opcode::LoopEnd:
        if (--depth < 0) return "END without matching LOOP";
        break;
      case Opcode::Add:
      case Opcode::Sub:
        if (ins.arg < 1 || ins.arg > kMaxStep) return "step argument out of range: " + ins.text();
        break;
      case Opcode::Loop:
        if (ins.arg != kLoopForever && (ins.arg < 2 || ins.arg > kMaxStep)) {
          return "loop count out of range: " + ins.text();
        }
        ++depth;
        break;
      case Opcode::Set:
        if (ins.arg >= alphabet) return "SET argument outside alphabet: " + ins.text();
        break;
    }
  }
  if (depth != 0) return "unterminated LOOP";
  if (!emits) return "program never emits";
  return {};
}

Program::Program(std::vector<Instruction> instructions, int alphabet)
    : instructions_(std::move(instructions)), alphabet_(alphabet) {
  if (auto err = validate(instructions_, alphabet_); !err.empty()) throw ParseError(err);
  for (const auto& ins : instructions_) length_ += ins.encoded_length();
}

Program Program::parse(std::string_view text, int alphabet) {
  std::vector<Instruction> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  auto number = [&](std::string_view digits) -> int {
    if (digits.size() != 1 || !std::isdigit(static_cast<unsigned char>(digits[0]))) {
      throw ParseError("bad instruction token: " + tok);
    }
    return digits[0] - '0';
  };
  while (in >> tok) {
    std::string_view t = tok;
    if (t == "EMIT") {
      out.push_back({Opcode::Emit, 0});
    } else if (t == "SWAP") {
      out.push_back({Opcode::Swap, 0});
    } else if (t == "END") {
      out.push_back({Opcode::LoopEnd, 0});
    } else if (t.starts_with("ADD")) {
      out.push_back({Opcode::Add, static_cast<std::uint8_t>(number(t.substr(3)))});
    } else if (t.starts_with("SUB")) {
      out.push_back({Opcode::Sub, static_cast<std::uint8_t>(number(t.substr(3)))});
    } else if (t == "LOOP*") {
      out.push_back({Opcode::Loop, kLoopForever});
    } else if (t.starts_with("LOOP")) {
      int n = number(t.substr(4));
      if (n == kLoopForever) throw ParseError("use LOOP* for an unbounded loop");
      out.push_back({Opcode::Loop, static_cast<std::uint8_t>(n)});
    } else if (t.starts_with("SET") && t.size() == 4) {
      out.push_back({Opcode::Set, symbol_from_char(t[3], alphabet)});
    } else {
      throw ParseError("bad instruction token: " + tok);
    }
  }
  return Program(std::move(out), alphabet);
}

std::string Program::text() const {
  std::string out;
  for (const auto& ins : instructions_) {
    if (!out.empty()) out.push_back(' ');
    out += ins.text();
  }
  return out;
}

std::vector<std::uint8_t> Program::encoding() const {
  std::vector<std::uint8_t> code;
  code.reserve(static_cast<std::size_t>(length_));
  for (const auto& ins : instructions_) {
    code.push_back(static_cast<std::uint8_t>(ins.op));
    if (ins.encoded_length() == 2) code.push_back(static_cast<std::uint8_t>(ins.arg_code()));
  }
  return code;
}

bool Program::encoding_less(const Program& a, const Program& b) {
  return std::lexicographical_compare(a.instructions_.begin(), a.instructions_.end(),
                                      b.instructions_.begin(), b.instructions_.end());
}

bool Program::enumeration_less(const Program& a, const Program& b) {
  if (a.length_ != b.length_) return a.length_ < b.length_;
  return encoding_less(a, b);
}

}  // namespace uat::refmachine
