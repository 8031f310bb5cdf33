#include <benchmark/benchmark.h>

#include <filesystem>

#include "mj/repair/corpus.hpp"
#include "mj/repair/explorer.hpp"
#include "mj/repair/parallel.hpp"

using namespace mj::repair;

namespace {

const std::vector<LoadedCase>& cases() {
  static const std::vector<LoadedCase> loaded = [] {
    std::vector<LoadedCase> out;
    for (const CorpusCase& c : load_corpus(std::filesystem::path(MJ_SOURCE_DIR) / "fixtures" / "corpus"))
      out.push_back(load_case(c));
    return out;
  }();
  return loaded;
}

void BM_Corpus(benchmark::State& state, Mode mode, ExecPolicy policy) {
  RepairConfig cfg;
  cfg.policy = policy;
  std::int64_t decisions = 0;
  for (auto _ : state) {
    for (const LoadedCase& c : cases()) {
      ExplorationReport r = run_case(c, mode, cfg);
      decisions += r.tentative;
      benchmark::DoNotOptimize(r.valid);
    }
  }
  state.counters["threads"] = max_threads();
  state.counters["decisions/s"] = benchmark::Counter(static_cast<double>(decisions), benchmark::Counter::kIsRate);
}

void BM_Replay(benchmark::State& state, ExecPolicy policy) {
  const LoadedCase& c = cases().front();
  const Metaprogram mp = transform(c.program);
  RepairConfig cfg;
  cfg.policy = policy;
  const DecisionSet ds = detect_and_collect(mp, c.test, cfg);
  for (auto _ : state) {
    std::vector<int> verdicts(ds.decisions.size());
    for_each_index(ds.decisions.size(), policy, [&](std::size_t i) {
      verdicts[i] = replay(mp, c.test, ds.decisions[i], cfg).outcome.passed();
    });
    benchmark::DoNotOptimize(verdicts.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Corpus, template_serial, Mode::Template, ExecPolicy::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Corpus, template_openmp, Mode::Template, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Corpus, meta_serial, Mode::Meta, ExecPolicy::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Corpus, meta_openmp, Mode::Meta, ExecPolicy::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Replay, serial, ExecPolicy::Serial)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Replay, openmp, ExecPolicy::Parallel)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
