#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mge/corpus.hpp"
#include "mge/graphspec.hpp"
#include "mge/model.hpp"
#include "mge/neighborhood.hpp"
#include "mge/sampler.hpp"
#include "mge/vocabulary.hpp"

namespace mge {

struct TrainConfig {
  int dim = 100;
  int neg_count = 5;
  int epochs = 5;
  double lr0 = 0.025;
  std::optional<double> lr_min;  // defaults to 1e-4 * lr0
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<double> subsample_threshold;
  double sampling_exponent = kDefaultSamplingExponent;
  double progress_interval_s = 0.0;  // 0 disables progress lines
  // separate: SkipGram-style output table, the input row is the saved embedding.
  // shared: one vector per word serves as both v_w and v_c.
  ContextVectors context_vectors = ContextVectors::separate;

  double effective_lr_min() const { return lr_min.value_or(1e-4 * lr0); }
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct TrainStats {
  std::uint64_t pairs_per_epoch = 0;
  std::uint64_t pairs_trained = 0;
  std::size_t units_per_epoch = 0;
  double final_lr = 0.0;
  double seconds = 0.0;
};

/// A part of a composite model bound to its already-encoded corpus.
struct ResolvedPart {
  ModelSpec spec;
  std::span<const EncodedUnit> units;
};

/// Unit visiting order for one epoch: parts interleaved in proportion to their sizes.
struct ScheduledUnit {
  std::uint32_t part;
  std::uint32_t unit;
};
std::vector<ScheduledUnit> interleave_schedule(std::span<const std::size_t> part_sizes);

std::uint64_t count_pairs(std::span<const ResolvedPart> parts);

/// Optimizes the negative-sampling objective over the neighborhoods of every part.
/// workers == 1 is deterministic; workers > 1 runs unsynchronized OpenMP workers over
/// disjoint shards of each epoch and is not reproducible.
EmbeddingModel train(std::span<const ResolvedPart> parts, const Vocabulary& vocab, const TrainConfig& config,
                     TrainStats* stats = nullptr);

/// Resolves stream ids, encodes every referenced stream once, and trains.
/// Throws ConfigError for an undeclared stream id.
EmbeddingModel train(const CompositeSpec& composite, std::span<const StreamSource> streams, const Vocabulary& vocab,
                     const TrainConfig& config, TrainStats* stats = nullptr);

}  // namespace mge
