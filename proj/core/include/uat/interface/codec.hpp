#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uat/refmachine/program.hpp"

namespace uat::interface {

using refmachine::Symbol;
using refmachine::SymbolSequence;

/// A presentation bijection phi between symbol sequences and percept payloads.
///
/// Every registered codec renders one whitespace-separated token per symbol,
/// so a payload's information content can be audited token by token.
class Codec {
 public:
  virtual ~Codec() = default;
  virtual std::string id() const = 0;
  virtual int alphabet() const = 0;
  virtual std::string render(const SymbolSequence& x) const = 0;
  /// Inverse of render; throws refmachine::ParseError on payloads outside the range.
  virtual SymbolSequence parse(std::string_view payload) const = 0;
};

class UnknownCodec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// raw     letters:            "a d g j"
/// grid    row/column cells:   "r0c0 r0c3 r1c0 r1c3" (rows of ceil(sqrt|S|) cells)
/// radix   fixed-width binary: "00000 00011 00110 01001"
/// mirror  reversed order, reflected letters: "q t w z"
std::unique_ptr<Codec> make_codec(const std::string& id, int alphabet = refmachine::kDefaultAlphabet);
std::vector<std::string> codec_ids();
bool codec_registered(const std::string& id);

struct FairnessReport {
  std::string codec;
  std::size_t samples = 0;
  std::size_t roundtrip_failures = 0;
  std::size_t collisions = 0;
  std::size_t leaks = 0;
  std::vector<std::string> violations;

  bool ok() const { return roundtrip_failures == 0 && collisions == 0 && leaks == 0; }
};

/// Checks parse(render(x)) == x and injectivity over the sample. When
/// `answers` is given (one per sample element), also probes for leaks: a
/// payload may only contain one glyph per symbol, each symbol's own
/// single-token rendering, so any surplus token, such as the answer's glyph,
/// is reported.
FairnessReport fairness_check(const Codec& codec, const std::vector<SymbolSequence>& sample,
                              const std::vector<std::optional<Symbol>>& answers = {});

/// Seeded uniform sequences with lengths in [min_len, max_len].
std::vector<SymbolSequence> random_sequences(std::size_t n, std::uint64_t seed, int alphabet,
                                             std::size_t min_len = 1, std::size_t max_len = 16);

}  // namespace uat::interface
