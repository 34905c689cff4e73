#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mge/corpus.hpp"
#include "mge/embeddings.hpp"
#include "mge/trainer.hpp"

namespace mge {

/// A training run: stream declarations, composite model, hyperparameters, output.
///
/// File syntax is `key = value` lines; `[stream ID]` starts a stream section; `#` starts a
/// comment. Relative paths resolve against the config file's directory.
struct RunConfig {
  std::vector<StreamSource> streams;
  std::string model;
  TrainConfig train;
  bool seed_set = false;
  std::uint64_t min_count = 5;
  int distance_cap = kDefaultDistanceCap;
  std::filesystem::path output;
  VectorFormat format = VectorFormat::binary;

  const StreamSource* stream(const std::string& id) const;
};

/// Overrides are top-level `key=value` pairs applied after the file (they win).
/// Throws ConfigError naming the offending key.
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Checks the model string, stream references, input paths and mandatory keys.
CompositeSpec validate_run_config(const RunConfig& config);

}  // namespace mge
