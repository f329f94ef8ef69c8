#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uat::refmachine {

/// A symbol of the series alphabet. Symbol k prints as the k-th lowercase letter.
using Symbol = std::uint8_t;

inline constexpr int kMaxAlphabet = 26;
inline constexpr int kDefaultAlphabet = 26;

/// A finite sequence over the series alphabet.
class SymbolSequence {
 public:
  SymbolSequence() = default;
  explicit SymbolSequence(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  /// Parses "a d g j" or "adgj"; whitespace and commas are ignored.
  static SymbolSequence parse(std::string_view text, int alphabet = kDefaultAlphabet);

  /// Letters separated by single spaces, e.g. "a d g j".
  std::string str() const;
  /// Letters without separators, e.g. "adgj".
  std::string compact() const;

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const Symbol> view() const { return symbols_; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  void push_back(Symbol s) { symbols_.push_back(s); }
  SymbolSequence prefix(std::size_t n) const;
  SymbolSequence appended(Symbol s) const;

  auto operator<=>(const SymbolSequence&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

char symbol_char(Symbol s);
Symbol symbol_from_char(char c, int alphabet = kDefaultAlphabet);

/// Instruction opcodes. The declaration order is the code-symbol order used for
/// the lexicographic tie-break between programs.
enum class Opcode : std::uint8_t { Emit, Swap, LoopEnd, Add, Sub, Loop, Set };

inline constexpr int kOpcodeCount = 7;
inline constexpr int kMaxStep = 4;         // ADD/SUB argument range is 1..4
inline constexpr int kLoopForever = 0;     // LOOP argument 0 means "repeat forever"

/// One reference-machine instruction.
///
/// Encodings (in code symbols):
///   EMIT, SWAP, END           1 symbol
///   ADD k, SUB k (k in 1..4)  2 symbols
///   LOOP n (n in {*,2,3,4})   2 symbols
///   SET k (k in the alphabet) 2 symbols
struct Instruction {
  Opcode op = Opcode::Emit;
  std::uint8_t arg = 0;

  int encoded_length() const;
  /// Index of the argument symbol within the opcode's argument range.
  int arg_code() const;
  std::string text() const;

  auto operator<=>(const Instruction& other) const {
    if (auto c = op <=> other.op; c != 0) return c;
    return arg_code() <=> other.arg_code();
  }
  bool operator==(const Instruction&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sequence-emitting program. Construction validates loop balance, argument
/// ranges, and that at least one EMIT exists.
class Program {
 public:
  Program() = default;
  explicit Program(std::vector<Instruction> instructions, int alphabet = kDefaultAlphabet);

  /// Whitespace-separated tokens: EMIT SWAP END ADD<k> SUB<k> LOOP<n> LOOP* SET<letter>.
  static Program parse(std::string_view text, int alphabet = kDefaultAlphabet);

  std::string text() const;
  /// Length in code symbols.
  int length() const { return length_; }
  int alphabet() const { return alphabet_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  /// Flat code-symbol encoding; lexicographic order on it is the tie-break order.
  std::vector<std::uint8_t> encoding() const;

  /// Length-then-lexicographic order used by enumeration.
  static bool enumeration_less(const Program& a, const Program& b);
  /// Pure lexicographic order on encodings (a proper prefix sorts first).
  static bool encoding_less(const Program& a, const Program& b);

  bool operator==(const Program& other) const { return instructions_ == other.instructions_; }

  /// Checks structural validity without constructing; returns an empty string when valid.
  static std::string validate(std::span<const Instruction> instructions, int alphabet);

 private:
  std::vector<Instruction> instructions_;
  int length_ = 0;
  int alphabet_ = kDefaultAlphabet;
};

/// The closed instruction table for a given alphabet, in code-symbol order.
std::vector<Instruction> instruction_table(int alphabet = kDefaultAlphabet);

}  // namespace uat::refmachine
