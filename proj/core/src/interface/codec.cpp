#include "uat/interface/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

namespace uat::interface {

using refmachine::ParseError;

namespace {

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Codecs that map each symbol to one token, independent of position.
class TokenCodec : public Codec {
 public:
  explicit TokenCodec(int alphabet) : alphabet_(alphabet) {
    if (alphabet < 2 || alphabet > refmachine::kMaxAlphabet) {
      throw std::invalid_argument("codec alphabet out of range: " + std::to_string(alphabet));
    }
  }

  int alphabet() const override { return alphabet_; }

  std::string render(const SymbolSequence& x) const override {
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Symbol s = x[reversed() ? x.size() - 1 - i : i];
      if (s >= alphabet_) throw std::invalid_argument("render: symbol outside alphabet");
      if (i) out.push_back(' ');
      out += glyph(s);
    }
    return out;
  }

  SymbolSequence parse(std::string_view payload) const override {
    std::vector<Symbol> out;
    for (auto tok : tokens(payload)) {
      auto it = lookup().find(std::string(tok));
      if (it == lookup().end()) {
        throw ParseError(id() + ": unknown token '" + std::string(tok) + "'");
      }
      out.push_back(it->second);
    }
    if (reversed()) std::reverse(out.begin(), out.end());
    return SymbolSequence(std::move(out));
  }

 protected:
  virtual std::string glyph(Symbol s) const = 0;
  virtual bool reversed() const { return false; }

 private:
  const std::map<std::string, Symbol>& lookup() const {
    std::call_once(once_, [this] {
      for (int s = 0; s < alphabet_; ++s) {
        lookup_.emplace(glyph(static_cast<Symbol>(s)), static_cast<Symbol>(s));
      }
    });
    return lookup_;
  }

  int alphabet_;
  mutable std::once_flag once_;
  mutable std::map<std::string, Symbol> lookup_;
};

class RawCodec final : public TokenCodec {
 public:
  using TokenCodec::TokenCodec;
  std::string id() const override { return "raw"; }

 protected:
  std::string glyph(Symbol s) const override { return std::string(1, refmachine::symbol_char(s)); }
};

class GridCodec final : public TokenCodec {
 public:
  explicit GridCodec(int alphabet)
      : TokenCodec(alphabet), width_(static_cast<int>(std::ceil(std::sqrt(alphabet)))) {}
  std::string id() const override { return "grid"; }

 protected:
  std::string glyph(Symbol s) const override {
    return "r" + std::to_string(s / width_) + "c" + std::to_string(s % width_);
  }

 private:
  int width_;
};

class RadixCodec final : public TokenCodec {
 public:
  explicit RadixCodec(int alphabet)
      : TokenCodec(alphabet), digits_(std::bit_width(static_cast<unsigned>(alphabet - 1))) {}
  std::string id() const override { return "radix"; }

 protected:
  std::string glyph(Symbol s) const override {
    std::string out(static_cast<std::size_t>(digits_), '0');
    for (int i = 0; i < digits_; ++i) {
      if (s >> i & 1) out[static_cast<std::size_t>(digits_ - 1 - i)] = '1';
    }
    return out;
  }

 private:
  int digits_;
};

class MirrorCodec final : public TokenCodec {
 public:
  using TokenCodec::TokenCodec;
  std::string id() const override { return "mirror"; }

 protected:
  std::string glyph(Symbol s) const override {
    return std::string(1, refmachine::symbol_char(static_cast<Symbol>(alphabet() - 1 - s)));
  }
  bool reversed() const override { return true; }
};

const std::vector<std::string>& registry() {
  static const std::vector<std::string> ids{"raw", "grid", "radix", "mirror"};
  return ids;
}

}  // namespace

std::unique_ptr<Codec> make_codec(const std::string& id, int alphabet) {
  if (id == "raw") return std::make_unique<RawCodec>(alphabet);
  if (id == "grid") return std::make_unique<GridCodec>(alphabet);
  if (id == "radix") return std::make_unique<RadixCodec>(alphabet);
  if (id == "mirror") return std::make_unique<MirrorCodec>(alphabet);
  throw UnknownCodec("unknown codec: " + id);
}

std::vector<std::string> codec_ids() { return registry(); }

bool codec_registered(const std::string& id) {
  const auto& ids = registry();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

FairnessReport fairness_check(const Codec& codec, const std::vector<SymbolSequence>& sample,
                              const std::vector<std::optional<Symbol>>& answers) {
  if (sample.empty()) throw std::invalid_argument("fairness_check: empty sample");
  if (!answers.empty() && answers.size() != sample.size()) {
    throw std::invalid_argument("fairness_check: one answer slot per sample element");
  }
  FairnessReport rep;
  rep.codec = codec.id();
  rep.samples = sample.size();
  std::map<std::string, std::size_t> seen;

  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& x = sample[i];
    const std::string payload = codec.render(x);
    try {
      if (codec.parse(payload) != x) {
        ++rep.roundtrip_failures;
        rep.violations.push_back("roundtrip: " + x.compact());
      }
    } catch (const ParseError& e) {
      ++rep.roundtrip_failures;
      rep.violations.push_back("roundtrip: " + x.compact() + " (" + e.what() + ")");
    }
    auto [it, fresh] = seen.emplace(payload, i);
    if (!fresh && sample[it->second] != x) {
      ++rep.collisions;
      rep.violations.push_back("collision: " + sample[it->second].compact() + " and " + x.compact() +
                               " both render as '" + payload + "'");
    }

    if (answers.empty()) continue;
    // The payload may contain exactly one glyph per symbol, each glyph being
    // that symbol's own single-token rendering.
    std::multiset<std::string> expected;
    std::vector<std::string> surplus;
    for (Symbol s : x.symbols()) {
      const std::string single = codec.render(SymbolSequence({s}));
      const auto glyph = tokens(single);
      if (!glyph.empty()) expected.emplace(glyph.front());
      for (std::size_t k = 1; k < glyph.size(); ++k) surplus.emplace_back(glyph[k]);
    }
    for (auto tok : tokens(payload)) {
      auto e = expected.find(std::string(tok));
      if (e == expected.end()) {
        surplus.emplace_back(tok);
      } else {
        expected.erase(e);
      }
    }
    if (!surplus.empty()) {
      ++rep.leaks;
      std::string msg = "leak: '" + payload + "' carries tokens beyond " + x.compact();
      if (answers[i]) {
        const std::string answer_glyph = codec.render(SymbolSequence({*answers[i]}));
        if (std::find(surplus.begin(), surplus.end(), answer_glyph) != surplus.end()) {
          msg += " including the answer glyph '" + answer_glyph + "'";
        }
      }
      rep.violations.push_back(msg);
    }
  }
  return rep;
}

std::vector<SymbolSequence> random_sequences(std::size_t n, std::uint64_t seed, int alphabet,
                                             std::size_t min_len, std::size_t max_len) {
  if (min_len < 1 || max_len < min_len) throw std::invalid_argument("random_sequences: bad lengths");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  std::vector<SymbolSequence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Symbol> s(len(rng));
    for (auto& v : s) v = static_cast<Symbol>(sym(rng));
    out.emplace_back(std::move(s));
  }
  return out;
}

}  // namespace uat::interface
