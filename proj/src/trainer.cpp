#include "mge/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>

namespace mge {

void TrainConfig::validate() const {
  auto fail = [](const char* key, const std::string& why) { throw ConfigError(std::string(key) + ": " + why); };
  if (dim < 1) fail("dim", "must be >= 1");
  if (neg_count < 1) fail("neg_count", "must be >= 1");
  if (epochs < 0) fail("epochs", "must be >= 0");
  if (!(lr0 > 0.0)) fail("lr0", "must be positive");
  if (!(effective_lr_min() > 0.0)) fail("lr_min", "must be positive");
  if (!(effective_lr_min() < lr0)) fail("lr_min", "must be smaller than lr0");
  if (workers < 1) fail("workers", "must be >= 1");
  if (subsample_threshold && !(*subsample_threshold > 0.0)) fail("subsample", "must be positive");
  if (!(sampling_exponent > 0.0)) fail("sampling_exponent", "must be positive");
}

std::vector<ScheduledUnit> interleave_schedule(std::span<const std::size_t> part_sizes) {
  // The k-th unit of part p sits at (k + 1/2) / n_p; merge all parts by that key.
  std::vector<ScheduledUnit> out;
  std::size_t total = 0;
  for (auto n : part_sizes) total += n;
  out.reserve(total);
  std::vector<std::size_t> next(part_sizes.size(), 0);
  for (std::size_t step = 0; step < total; ++step) {
    std::size_t best = part_sizes.size();
    for (std::size_t p = 0; p < part_sizes.size(); ++p) {
      if (next[p] >= part_sizes[p]) continue;
      if (best == part_sizes.size()) {
        best = p;
        continue;
      }
      // (2k_p + 1) / n_p < (2k_b + 1) / n_b
      const unsigned __int128 lhs = static_cast<unsigned __int128>(2 * next[p] + 1) * part_sizes[best];
      const unsigned __int128 rhs = static_cast<unsigned __int128>(2 * next[best] + 1) * part_sizes[p];
      if (lhs < rhs) best = p;
    }
    out.push_back({static_cast<std::uint32_t>(best), static_cast<std::uint32_t>(next[best]++)});
  }
  return out;
}

std::uint64_t count_pairs(std::span<const ResolvedPart> parts) {
  std::uint64_t total = 0;
  NeighborhoodSearcher searcher;
  std::vector<int> scratch;
  for (const auto& part : parts) {
    const LabelSet labels = part.spec.active_labels();
    for (const auto& unit : part.units) {
      const UnitGraph graph = build_unit_graph(unit, labels);
      for_each_neighborhood(graph, part.spec, searcher, scratch,
                            [&](int, std::span<const int> contexts) { total += contexts.size(); });
    }
  }
  return total;
}

namespace {

/// Per-worker state; everything a worker touches except the shared model.
struct Worker {
  explicit Worker(std::uint64_t seed) : rng(seed) {}
  Rng rng;
  NeighborhoodSearcher searcher;
  std::vector<int> contexts;
  std::vector<WordId> forbidden;
  std::vector<WordId> negatives;
  std::vector<float> scratch;
  EncodedUnit masked;
  std::uint64_t pending = 0;  // pairs not yet published to the shared counter
};

class Run {
 public:
  Run(std::span<const ResolvedPart> parts, const Vocabulary& vocab, const TrainConfig& config,
      std::uint64_t pairs_per_epoch)
      : parts_(parts),
        vocab_(vocab),
        config_(config),
        table_(vocab, config.sampling_exponent),
        lr0_(config.lr0),
        lr_min_(config.effective_lr_min()),
        total_pairs_(pairs_per_epoch * static_cast<std::uint64_t>(config.epochs)) {
    if (config.subsample_threshold) {
      const double t = *config.subsample_threshold * static_cast<double>(vocab.total_tokens());
      keep_prob_.resize(vocab.size());
      for (std::size_t i = 0; i < vocab.size(); ++i) {
        const double c = static_cast<double>(vocab.count(static_cast<WordId>(i)));
        keep_prob_[i] = (std::sqrt(c / t) + 1.0) * t / c;
      }
    }
  }

  double lr_at(std::uint64_t done) const {
    const double frac = total_pairs_ == 0 ? 1.0 : static_cast<double>(done) / static_cast<double>(total_pairs_);
    return std::max(lr_min_, lr0_ - (lr0_ - lr_min_) * frac);
  }

  /// Trains on every pair of one unit.
  void process(EmbeddingModel& model, Worker& worker, const ScheduledUnit& item) {
    const ResolvedPart& part = parts_[item.part];
    const EncodedUnit* unit = &part.units[item.unit];
    if (!keep_prob_.empty()) {
      worker.masked = *unit;
      for (auto* side : {&worker.masked.src, &worker.masked.tgt})
        for (auto& id : *side)
          if (id != kNoWord && keep_prob_[static_cast<std::size_t>(id)] < worker.rng.uniform()) id = kNoWord;
      unit = &worker.masked;
    }
    const UnitGraph graph = build_unit_graph(*unit, part.spec.active_labels());
    const auto& nodes = graph.nodes();
    for_each_neighborhood(graph, part.spec, worker.searcher, worker.contexts, [&](int w, std::span<const int> ctx) {
      worker.forbidden.clear();
      for (int c : ctx) worker.forbidden.push_back(nodes[static_cast<std::size_t>(c)].word);
      std::sort(worker.forbidden.begin(), worker.forbidden.end());
      worker.forbidden.erase(std::unique(worker.forbidden.begin(), worker.forbidden.end()), worker.forbidden.end());
      const WordId center = nodes[static_cast<std::size_t>(w)].word;
      for (int c : ctx) {
        const float lr = static_cast<float>(lr_at(published() + worker.pending));
        sample_negatives(table_, worker.rng, config_.neg_count, worker.forbidden, worker.negatives);
        sgd_step<float>(model, center, nodes[static_cast<std::size_t>(c)].word, worker.negatives, lr, worker.scratch);
        if (++worker.pending >= kPublishEvery) publish(worker);
      }
    });
  }

  void publish(Worker& worker) {
    done_.fetch_add(worker.pending, std::memory_order_relaxed);
    worker.pending = 0;
  }
  std::uint64_t published() const { return done_.load(std::memory_order_relaxed); }

  void report(int epoch) const {
    if (config_.progress_interval_s <= 0) return;
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - start_).count();
    if (elapsed - last_report_ < config_.progress_interval_s) return;
    last_report_ = elapsed;
    const double done = static_cast<double>(published());
    std::cerr << "epoch " << epoch + 1 << "/" << config_.epochs << "  lr " << std::setprecision(6)
              << lr_at(published()) << "  pairs/sec " << std::fixed << std::setprecision(0)
              << (elapsed > 0 ? done / elapsed : 0.0) << "  progress " << std::setprecision(1)
              << (total_pairs_ ? 100.0 * done / static_cast<double>(total_pairs_) : 100.0) << "%\n"
              << std::defaultfloat;
  }

  static constexpr std::uint64_t kPublishEvery = 256;

  std::span<const ResolvedPart> parts_;
  const Vocabulary& vocab_;
  const TrainConfig& config_;
  NegativeSamplingTable table_;
  std::vector<double> keep_prob_;
  double lr0_, lr_min_;
  std::uint64_t total_pairs_;
  std::atomic<std::uint64_t> done_{0};
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  mutable double last_report_ = 0.0;
};

}  // namespace

EmbeddingModel train(std::span<const ResolvedPart> parts, const Vocabulary& vocab, const TrainConfig& config,
                     TrainStats* stats) {
  config.validate();
  if (vocab.empty()) throw ConfigError("cannot train on an empty vocabulary");
  const auto t0 = std::chrono::steady_clock::now();
  EmbeddingModel model = init_model(vocab, static_cast<std::size_t>(config.dim), config.seed, config.context_vectors);

  std::vector<std::size_t> sizes;
  std::size_t units = 0;
  for (const auto& p : parts) {
    sizes.push_back(p.units.size());
    units += p.units.size();
  }
  const std::uint64_t pairs_per_epoch = count_pairs(parts);
  if (stats) {
    *stats = {};
    stats->pairs_per_epoch = pairs_per_epoch;
    stats->units_per_epoch = units;
    stats->final_lr = config.lr0;
  }
  if (config.epochs == 0) return model;
  if (pairs_per_epoch == 0)
    throw DataError("the model specs produce no training pairs on these corpora (check labels against stream kinds)");

  const std::vector<ScheduledUnit> schedule = interleave_schedule(sizes);
  Run run(parts, vocab, config, pairs_per_epoch);

  if (config.workers == 1) {
    Worker worker(config.seed);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t i = 0; i < schedule.size(); ++i) {
        run.process(model, worker, schedule[i]);
        if ((i & 1023) == 0) run.report(epoch);
      }
      run.publish(worker);
    }
  } else {
    std::vector<Worker> workers;
    for (int t = 0; t < config.workers; ++t) workers.emplace_back(config.seed ^ static_cast<std::uint64_t>(t));
    const std::size_t n = schedule.size();
    const int nw = config.workers;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      // Each worker owns a contiguous shard; rows of `model` are updated without locks.
#pragma omp parallel num_threads(nw)
      {
        const int t = omp_get_thread_num();
        const int team = omp_get_num_threads();
        // A smaller team than requested still covers every shard.
        for (int shard = t; shard < nw; shard += team) {
          Worker& worker = workers[static_cast<std::size_t>(shard)];
          const std::size_t begin = n * static_cast<std::size_t>(shard) / static_cast<std::size_t>(nw);
          const std::size_t end = n * static_cast<std::size_t>(shard + 1) / static_cast<std::size_t>(nw);
          for (std::size_t i = begin; i < end; ++i) {
            run.process(model, worker, schedule[i]);
            if (shard == 0 && (i & 1023) == 0) run.report(epoch);
          }
          run.publish(worker);
        }
      }
    }
  }

  if (stats) {
    stats->pairs_trained = run.published();
    stats->final_lr = run.lr_at(run.published());
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return model;
}

EmbeddingModel train(const CompositeSpec& composite, std::span<const StreamSource> streams, const Vocabulary& vocab,
                     const TrainConfig& config, TrainStats* stats) {
  if (composite.parts.empty()) throw ConfigError("model: composite spec has no parts");
  std::map<std::string, const StreamSource*> by_id;
  for (const auto& s : streams) by_id[s.id] = &s;
  std::map<std::string, std::vector<EncodedUnit>> encoded;
  for (const auto& part : composite.parts) {
    auto it = by_id.find(part.stream_id);
    if (it == by_id.end()) throw ConfigError("model: stream '" + part.stream_id + "' is not declared");
    if (encoded.count(part.stream_id)) continue;
    auto reader = it->second->open();
    auto& out = encoded[part.stream_id];
    while (auto unit = reader->next()) out.push_back(encode_unit(*unit, vocab));
  }
  std::vector<ResolvedPart> parts;
  for (const auto& part : composite.parts) parts.push_back({part.spec, encoded.at(part.stream_id)});
  return train(parts, vocab, config, stats);
}

}  // namespace mge
