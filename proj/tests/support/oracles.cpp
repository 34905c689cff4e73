#include "oracles.hpp"

#include <algorithm>

namespace mge::testing {

std::vector<NeighborPair> window_pairs(const std::vector<WordId>& ids, int k) {
  std::vector<NeighborPair> out;
  const int n = static_cast<int>(ids.size());
  for (int i = 0; i < n; ++i) {
    if (ids[static_cast<std::size_t>(i)] == kNoWord) continue;
    for (int j = std::max(0, i - k); j <= std::min(n - 1, i + k); ++j)
      if (j != i && ids[static_cast<std::size_t>(j)] != kNoWord)
        out.push_back({ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]});
  }
  return out;
}

std::vector<NeighborPair> dependency_pairs(const std::vector<WordId>& ids, const std::vector<DepArc>& deps) {
  std::vector<NeighborPair> out;
  const int n = static_cast<int>(ids.size());
  for (int i = 0; i < n; ++i) {
    if (ids[static_cast<std::size_t>(i)] == kNoWord) continue;
    std::vector<int> ctx;
    for (const auto& arc : deps) {
      if (arc.head == i) ctx.push_back(arc.dep);
      if (arc.dep == i) ctx.push_back(arc.head);
    }
    std::sort(ctx.begin(), ctx.end());
    ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
    for (int j : ctx)
      if (ids[static_cast<std::size_t>(j)] != kNoWord)
        out.push_back({ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]});
  }
  return out;
}

UnitGraph random_multigraph(Rng& rng, int max_nodes, int max_edges) {
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_nodes)));
  std::vector<GraphNode> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back({Side::src, i, static_cast<WordId>(i)});
  std::vector<GraphEdge> edges;
  if (n > 1) {
    const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edges) + 1));
    for (int e = 0; e < m; ++e) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      edges.push_back({a, b, static_cast<Label>(rng.below(3))});
    }
  }
  return UnitGraph(std::move(nodes), std::move(edges));
}

EmbeddingModel train_skipgram_direct(const std::vector<EncodedUnit>& sentences, const Vocabulary& vocab, int window,
                                     const TrainConfig& config) {
  EmbeddingModel model = init_model(vocab, static_cast<std::size_t>(config.dim), config.seed, config.context_vectors);
  const NegativeSamplingTable table(vocab, config.sampling_exponent);
  Rng rng(config.seed);

  std::uint64_t per_epoch = 0;
  for (const auto& s : sentences) per_epoch += window_pairs(s.src, window).size();
  const double total = static_cast<double>(per_epoch) * config.epochs;
  const double lr0 = config.lr0, lr_min = config.effective_lr_min();

  std::uint64_t done = 0;
  std::vector<WordId> forbidden, negatives;
  std::vector<float> scratch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& s : sentences) {
      const int n = static_cast<int>(s.src.size());
      for (int i = 0; i < n; ++i) {
        const WordId center = s.src[static_cast<std::size_t>(i)];
        if (center == kNoWord) continue;
        std::vector<int> ctx;
        for (int j = std::max(0, i - window); j <= std::min(n - 1, i + window); ++j)
          if (j != i && s.src[static_cast<std::size_t>(j)] != kNoWord) ctx.push_back(j);
        forbidden.clear();
        for (int j : ctx) forbidden.push_back(s.src[static_cast<std::size_t>(j)]);
        std::sort(forbidden.begin(), forbidden.end());
        forbidden.erase(std::unique(forbidden.begin(), forbidden.end()), forbidden.end());
        for (int j : ctx) {
          const double lr = std::max(lr_min, lr0 - (lr0 - lr_min) * static_cast<double>(done) / total);
          sample_negatives(table, rng, config.neg_count, forbidden, negatives);
          sgd_step<float>(model, center, s.src[static_cast<std::size_t>(j)], negatives, static_cast<float>(lr),
                          scratch);
          ++done;
        }
      }
    }
  }
  return model;
}

}  // namespace mge::testing
