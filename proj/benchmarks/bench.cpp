#include <benchmark/benchmark.h>

#include "uat/agents/agent.hpp"
#include "uat/controller/controller.hpp"
#include "uat/refmachine/kt.hpp"
#include "uat/taskgen/task_class.hpp"

using namespace uat;

namespace {

const taskgen::Bank& bank() {
  static const taskgen::Bank b = taskgen::load_bank(std::string(UAT_DATA_DIR) + "/bank.tsv");
  return b;
}

void BM_KtComplexity(benchmark::State& state) {
  static const char* seqs[] = {"adgj", "aazcye", "abcabc", "aazcyexg"};
  const auto x = refmachine::SymbolSequence::parse(seqs[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(refmachine::kt_complexity(x, {12, 4096}));
  state.SetLabel(x.compact());
}
BENCHMARK(BM_KtComplexity)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_ContinuationProfile(benchmark::State& state) {
  const auto x = refmachine::SymbolSequence::parse("adgj");
  const double cap = state.range(0) ? 1.0 : std::numeric_limits<double>::infinity();
  for (auto _ : state) benchmark::DoNotOptimize(refmachine::continuation_profile(x, {12, 4096}, 26, cap));
  state.SetLabel(state.range(0) ? "margin cap 1" : "uncapped");
}
BENCHMARK(BM_ContinuationProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Episodes per second once every prediction is cached.
void BM_EpisodeLoop(benchmark::State& state) {
  const auto space = interface::ConfigurationSpace::grid({{1, 1}, {2, 2}}, {{26, "raw", 0}, {26, "raw", 1}});
  agents::EnumerativeInductor agent("raw", 26);
  controller::run_anytime_test(agent, bank().tasks, space, 2000, 1);
  std::size_t episodes = 0;
  for (auto _ : state) episodes += controller::run_anytime_test(agent, bank().tasks, space, 2000, 1).history.size();
  state.SetItemsProcessed(static_cast<std::int64_t>(episodes));
}
BENCHMARK(BM_EpisodeLoop)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
