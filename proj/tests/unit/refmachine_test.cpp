#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "uat/refmachine/enumerate.hpp"
#include "uat/refmachine/kt.hpp"
#include "uat/refmachine/machine.hpp"

using namespace uat::refmachine;

namespace {

struct Best {
  unsigned __int128 weight;
  Program witness;
};

// Every output prefix (up to n_emit symbols) of every program up to max_len,
// with its cheapest producer. Ties go to the smaller encoding.
std::map<std::string, Best> brute_force(int max_len, std::size_t n_emit, std::uint64_t max_steps, int alphabet) {
  std::map<std::string, Best> best;
  enumerate_programs(
      max_len,
      [&](const Program& p) {
        const auto r = run_program(p, max_steps, n_emit);
        std::string s;
        for (std::size_t k = 0; k < r.output.size(); ++k) {
          s.push_back(symbol_char(r.output[k]));
          const auto w = static_cast<unsigned __int128>(r.steps_at[k]) << p.length();
          auto it = best.find(s);
          if (it == best.end()) {
            best.emplace(s, Best{w, p});
          } else if (w < it->second.weight || (w == it->second.weight && Program::encoding_less(p, it->second.witness))) {
            it->second = {w, p};
          }
        }
        return true;
      },
      alphabet);
  return best;
}

}  // namespace

TEST_CASE("program text round-trips and encodes with the documented lengths") {
  const auto p = Program::parse("SETc LOOP* EMIT ADD3 SWAP END");
  CHECK(p.text() == "SETc LOOP* EMIT ADD3 SWAP END");
  CHECK(p.length() == 2 + 2 + 1 + 2 + 1 + 1);
  CHECK(p.encoding().size() == static_cast<std::size_t>(p.length()));
  CHECK(Program::parse(p.text()) == p);
}

TEST_CASE("malformed programs are rejected") {
  CHECK_THROWS_AS(Program::parse("LOOP* EMIT"), ParseError);
  CHECK_THROWS_AS(Program::parse("EMIT END"), ParseError);
  CHECK_THROWS_AS(Program::parse("ADD5 EMIT"), ParseError);
  CHECK_THROWS_AS(Program::parse("SWAP ADD1"), ParseError);
  CHECK_THROWS_AS(Program::parse("FOO"), ParseError);
}

TEST_CASE("machine semantics") {
  SUBCASE("arithmetic wraps around the alphabet") {
    const auto r = run_program(Program::parse("SUB1 EMIT ADD2 EMIT"), 100, 5);
    CHECK(r.output.compact() == "zb");
    CHECK(r.status == RunStatus::Halted);
  }
  SUBCASE("every instruction costs a step, loop markers included") {
    const auto r = run_program(Program::parse("LOOP* EMIT ADD3 END"), 1000, 4);
    CHECK(r.output.compact() == "adgj");
    CHECK(r.steps_at == std::vector<std::uint64_t>{2, 5, 8, 11});
  }
  SUBCASE("finite loops repeat their body") {
    const auto r = run_program(Program::parse("LOOP3 EMIT ADD1 END EMIT"), 1000, 10);
    CHECK(r.output.compact() == "abcd");
  }
  SUBCASE("swap exchanges the registers") {
    const auto r = run_program(Program::parse("SETe SWAP EMIT SWAP EMIT"), 100, 5);
    CHECK(r.output.compact() == "ae");
  }
  SUBCASE("a silent forever loop runs out of steps") {
    const auto r = run_program(Program::parse("EMIT LOOP* ADD1 END"), 50, 2);
    CHECK(r.status == RunStatus::StepBudgetExhausted);
    CHECK(r.steps == 50);
  }
}

TEST_CASE("counting recurrence matches enumeration") {
  for (int alphabet : {3, 26}) {
    std::map<int, std::uint64_t> seen;
    enumerate_programs(6, [&](const Program& p) {
      ++seen[p.length()];
      return true;
    }, alphabet);
    for (int len = 1; len <= 6; ++len) {
      CAPTURE(alphabet);
      CAPTURE(len);
      CHECK(count_programs(len, alphabet) == seen[len]);
    }
  }
}

TEST_CASE("enumeration order is length first, then lexicographic") {
  const auto all = enumerate_program_list(5, 4);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(Program::enumeration_less(all[i - 1], all[i]));
}

TEST_CASE("Kt search agrees with brute force on short programs") {
  for (int alphabet : {4, 26}) {
    const auto oracle = brute_force(5, 6, 4096, alphabet);
    int mismatches = 0;
    for (const auto& [s, b] : oracle) {
      const auto r = kt_complexity(SymbolSequence::parse(s, alphabet), {5, 4096}, alphabet);
      if (r.cost.weight() != b.weight || !(r.witness == b.witness)) ++mismatches;
    }
    CAPTURE(alphabet);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("Kt witness reproduces the sequence at the reported cost") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 30; ++i) {
    std::vector<Symbol> v(1 + rng() % 3);
    for (auto& s : v) s = static_cast<Symbol>(rng() % 26);
    const SymbolSequence x(v);
    const auto r = kt_complexity(x, {12, 4096});
    const auto run = run_program(r.witness, 4096, x.size());
    REQUIRE(run.output == x);
    CHECK(run.steps_at.back() == r.cost.steps);
    CHECK(r.witness.length() == r.cost.length);
    CHECK(r.value.value == doctest::Approx(r.cost.length + std::log2(static_cast<double>(r.cost.steps))));
  }
}

TEST_CASE("Kt never decreases as the sequence grows") {
  const auto x = SymbolSequence::parse("aazcyexg");
  double prev = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const double kt = kt_complexity(x.prefix(n), {12, 4096}).value.value;
    CHECK(kt >= prev);
    prev = kt;
  }
}

TEST_CASE("continuation profile of an arithmetic series") {
  const auto p = continuation_profile(SymbolSequence::parse("adgj"), {12, 4096});
  REQUIRE(p.best);
  REQUIRE(p.runner_up);
  CHECK(symbol_char(p.best->symbol) == 'm');
  CHECK(p.best->result.value.value == doctest::Approx(6 + std::log2(14.0)));
  CHECK(symbol_char(p.runner_up->symbol) == 'j');
  CHECK(p.margin() > 1.0);
}

TEST_CASE("a capped profile certifies a margin no larger than the true one") {
  for (const char* s : {"adgj", "abab", "aaaa", "azby", "acegi"}) {
    const auto x = SymbolSequence::parse(s);
    const auto full = continuation_profile(x, {12, 4096});
    const auto capped = continuation_profile(x, {12, 4096}, 26, 1.0);
    CAPTURE(s);
    REQUIRE(full.best);
    REQUIRE(capped.best);
    CHECK(capped.best->symbol == full.best->symbol);
    CHECK(capped.best->result.cost == full.best->result.cost);
    CHECK(capped.margin() <= full.margin() + 1e-9);
    if (!capped.runner_up) CHECK(capped.margin() >= 1.0);
  }
}

TEST_CASE("search budget errors") {
  CHECK_THROWS_AS(kt_complexity(SymbolSequence::parse("qwertyuiop"), {4, 64}), NotFoundWithinBudget);
  CHECK_THROWS(kt_complexity(SymbolSequence(), {4, 64}));
}
