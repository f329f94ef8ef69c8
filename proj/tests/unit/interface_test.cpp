#include <doctest.h>

#include <set>
#include <sstream>

#include "support.hpp"
#include "uat/interface/percept.hpp"

using namespace uat;
using namespace uat::interface;

namespace {

// Renders faithfully, then appends the symbol after the last one as a hint.
class HintingCodec : public Codec {
 public:
  std::string id() const override { return "hint"; }
  int alphabet() const override { return 26; }
  std::string render(const SymbolSequence& x) const override {
    auto s = raw_->render(x);
    if (!x.empty()) s += " " + std::string(1, refmachine::symbol_char((x[x.size() - 1] + 1) % 26));
    return s;
  }
  SymbolSequence parse(std::string_view payload) const override {
    const auto cut = payload.rfind(' ');
    return raw_->parse(cut == std::string_view::npos ? payload : payload.substr(0, cut));
  }

 private:
  std::unique_ptr<Codec> raw_ = make_codec("raw");
};

}  // namespace

TEST_CASE("registered codecs are bijections on 10^4 random sequences") {
  const auto sample = random_sequences(10000, 2024, 26);
  REQUIRE(sample.size() == 10000);
  for (const auto& id : codec_ids()) {
    const auto codec = make_codec(id);
    const auto r = fairness_check(*codec, sample, std::vector<std::optional<Symbol>>(sample.size()));
    CAPTURE(id);
    CHECK(r.samples == 10000);
    CHECK(r.roundtrip_failures == 0);
    CHECK(r.collisions == 0);
    CHECK(r.leaks == 0);
  }
}

TEST_CASE("codec examples") {
  const auto x = SymbolSequence::parse("adgj");
  CHECK(make_codec("raw")->render(x) == "a d g j");
  CHECK(make_codec("grid")->render(x) == "r0c0 r0c3 r1c0 r1c3");
  CHECK(make_codec("radix")->render(x) == "00000 00011 00110 01001");
  CHECK(make_codec("mirror")->render(x) == "q t w z");
}

TEST_CASE("codecs reject payloads outside their range") {
  for (const auto& id : codec_ids()) {
    CAPTURE(id);
    CHECK_THROWS(make_codec(id)->parse("%%"));
  }
  CHECK_THROWS_AS(make_codec("morse"), UnknownCodec);
  CHECK_FALSE(codec_registered("morse"));
}

TEST_CASE("a codec that hints at the answer is caught") {
  const HintingCodec leaky;
  const auto sample = random_sequences(200, 5, 26, 2, 6);
  const auto r = fairness_check(leaky, sample, std::vector<std::optional<Symbol>>(sample.size()));
  CHECK(r.roundtrip_failures == 0);
  CHECK(r.collisions == 0);
  CHECK(r.leaks > 0);
  CHECK_FALSE(r.ok());
}

TEST_CASE("random sequences are seeded") {
  CHECK(random_sequences(50, 9, 26) == random_sequences(50, 9, 26));
  CHECK_FALSE(random_sequences(50, 9, 26) == random_sequences(50, 10, 26));
  for (const auto& x : random_sequences(200, 3, 5, 2, 4)) {
    CHECK(x.size() >= 2);
    CHECK(x.size() <= 4);
  }
}

TEST_CASE("configuration labels and time scaling") {
  Configuration c{0, {2, 4}, {26, "grid", 1}};
  CHECK(c.label() == "e2w4/grid/c1");
  CHECK(c.time.slowed(2) == TimeConfig{8, 16});
  CHECK(c.time.episode_ticks() == 6);
}

TEST_CASE("configuration spaces") {
  const auto space = test::eight_configs();
  REQUIRE(space.size() == 8);
  CHECK(space.time_level_count() == 2);
  CHECK(space.level(0) == std::vector<int>{0, 1, 2, 3});
  CHECK(space.time_level(6) == 1);
  CHECK(space.at(6).label() == "e2w2/raw/c2");

  const auto c2 = space.restrict_to_channel(2);
  REQUIRE(c2.size() == 2);
  CHECK(c2.at(1).label() == "e2w2/raw/c2");
  CHECK(c2.at(1).id == 1);
  CHECK(space.find(c2.at(1)) == 6);

  using Configs = std::vector<Configuration>;
  CHECK_THROWS_AS(ConfigurationSpace(Configs{{0, {0, 1}, {}}}), InvalidConfiguration);
  CHECK_THROWS_AS(ConfigurationSpace(Configs{{0, {1, 1}, {26, "raw", 4}}}), InvalidConfiguration);
  CHECK_THROWS_AS(ConfigurationSpace(Configs{{0, {1, 1}, {26, "nope", 0}}}), UnknownCodec);
}

TEST_CASE("signals") {
  CHECK(signal_payload(2) == "!2");
  CHECK(parse_signal("!2") == 2);
  CHECK_FALSE(parse_signal("a b"));
  CHECK_FALSE(parse_signal(kMask));
}

TEST_CASE("percept streams") {
  const auto& task = test::easy_class().task(0);
  const Configuration cfg{0, {2, 3}, {26, "mirror", 1}};
  auto stream = present(task, cfg, 4, 10);
  const auto codec = make_codec("mirror");
  CHECK(stream.duration() == 5);
  CHECK(stream.working_start() == 12);
  CHECK(stream.rendered() == codec->render(task.prefix));

  std::vector<Frame> frames;
  while (!stream.done()) frames.push_back(stream.next());
  REQUIRE(frames.size() == 5);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    REQUIRE(f.size() == 4);
    CHECK(f[1].tick == 10 + i);
    for (int c : {0, 2, 3}) CHECK(f[static_cast<std::size_t>(c)].null());
    CHECK(f[1].payload == (i < 2 ? stream.rendered() : std::string(kMask)));
  }
  CHECK_FALSE(stream.in_working_window(11));
  CHECK(stream.in_working_window(12));
  CHECK_FALSE(stream.in_working_window(15));
  CHECK_THROWS_AS(present(task, {0, {1, 1}, {26, "raw", 7}}, 4), UnknownChannel);
}

TEST_CASE("no percept ever carries the answer") {
  const auto& cls = test::bank().tasks;
  for (const auto& id : codec_ids()) {
    const auto codec = make_codec(id);
    for (const auto& t : cls.tasks()) {
      auto stream = present(t, {0, {1, 1}, {26, id, 0}}, 1);
      while (!stream.done()) {
        for (const auto& p : stream.next()) {
          if (p.null() || p.payload == kMask) continue;
          // The payload decodes to the prefix and nothing more.
          CHECK(codec->parse(p.payload) == t.prefix);
          CHECK_FALSE(codec->parse(p.payload) == t.full());
        }
      }
    }
  }
}
