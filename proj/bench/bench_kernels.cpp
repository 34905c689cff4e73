// Serial reference vs OpenMP kernels: training (1 vs N Hogwild workers) and knn.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "mge/embeddings.hpp"
#include "mge/trainer.hpp"
#include "toy_corpus.hpp"

using namespace mge;
using namespace mge::testing;

namespace {

struct TrainFixture {
  ToyCorpus toy = make_toy_corpus(2000, 200, 3);
  std::vector<EncodedUnit> units;
  Vocabulary vocab;
  std::vector<ResolvedPart> parts;

  TrainFixture() {
    std::vector<StreamSource> streams{memory_stream("par", toy.parallel)};
    vocab = build_vocabulary(streams, 1);
    for (const auto& u : toy.parallel) units.push_back(encode_unit(u, vocab));
    parts.push_back({parse_spec("(TA)2"), units});
  }
};

const TrainFixture& train_fixture() {
  static const TrainFixture f;
  return f;
}

void BM_Train(benchmark::State& state) {
  const auto& f = train_fixture();
  TrainConfig cfg;
  cfg.dim = 64;
  cfg.epochs = 1;
  cfg.seed = 1;
  cfg.workers = static_cast<int>(state.range(0));
  TrainStats stats;
  for (auto _ : state) benchmark::DoNotOptimize(train(f.parts, f.vocab, cfg, &stats));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(stats.pairs_trained));
  state.counters["pairs"] = static_cast<double>(stats.pairs_trained);
}

EmbeddingStore random_store(std::size_t n, std::size_t dim) {
  EmbeddingModel m = init_model<float>(n, dim, 7);
  std::vector<VocabEntry> entries;
  for (std::size_t i = 0; i < n; ++i) entries.push_back({TaggedWord("t" + std::to_string(i), LanguageCode("en")), 1});
  return EmbeddingStore::from_model(m, Vocabulary(std::move(entries), n));
}

template <bool Parallel>
void BM_Knn(benchmark::State& state) {
  static const EmbeddingStore store = random_store(100000, 100);
  const auto query = vector_of(store, store.word(42));
  const KnnQuery q{10, std::nullopt, {42}};
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? knn(store, query, q) : knn_serial(store, query, q));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(store.size()));
}

}  // namespace

BENCHMARK(BM_Train)
    ->Apply([](benchmark::internal::Benchmark* b) {
      b->Arg(1);
      if (omp_get_max_threads() > 1) b->Arg(omp_get_max_threads());
    })
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Knn<false>)->Name("BM_KnnSerial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Knn<true>)->Name("BM_KnnOpenMP")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
