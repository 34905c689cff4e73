#include "mge/config.hpp"

#include <charconv>
#include <deque>
#include <fstream>
#include <set>

namespace mge {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  return out;
}

void apply_top(RunConfig& cfg, const std::string& key, const std::string& value, const std::filesystem::path& base) {
  auto& t = cfg.train;
  if (key == "model") {
    cfg.model = value;
  } else if (key == "seed") {
    t.seed = parse_number<std::uint64_t>(key, value);
    cfg.seed_set = true;
  } else if (key == "dim") {
    t.dim = parse_number<int>(key, value);
  } else if (key == "neg_count") {
    t.neg_count = parse_number<int>(key, value);
  } else if (key == "epochs") {
    t.epochs = parse_number<int>(key, value);
  } else if (key == "lr0") {
    t.lr0 = parse_number<double>(key, value);
  } else if (key == "lr_min") {
    t.lr_min = parse_number<double>(key, value);
  } else if (key == "workers") {
    t.workers = parse_number<int>(key, value);
  } else if (key == "subsample") {
    t.subsample_threshold = parse_number<double>(key, value);
  } else if (key == "sampling_exponent") {
    t.sampling_exponent = parse_number<double>(key, value);
  } else if (key == "progress_interval") {
    t.progress_interval_s = parse_number<double>(key, value);
  } else if (key == "context_vectors") {
    if (value == "shared")
      t.context_vectors = ContextVectors::shared;
    else if (value == "separate")
      t.context_vectors = ContextVectors::separate;
    else
      throw ConfigError("context_vectors: expected 'shared' or 'separate', got '" + value + "'");
  } else if (key == "min_count") {
    cfg.min_count = parse_number<std::uint64_t>(key, value);
  } else if (key == "distance_cap") {
    cfg.distance_cap = parse_number<int>(key, value);
  } else if (key == "output") {
    cfg.output = base / value;
  } else if (key == "format") {
    if (value == "binary")
      cfg.format = VectorFormat::binary;
    else if (value == "text")
      cfg.format = VectorFormat::text;
    else
      throw ConfigError("format: expected 'text' or 'binary', got '" + value + "'");
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void apply_stream(StreamSource& s, const std::string& key, const std::string& value, const std::filesystem::path& base,
                  bool& kind_set) {
  const std::string where = "stream '" + s.id + "' " + key;
  try {
    if (key == "kind") {
      kind_set = true;
      if (value == "mono")
        s.kind = StreamKind::mono;
      else if (value == "dependency")
        s.kind = StreamKind::dependency;
      else if (value == "parallel")
        s.kind = StreamKind::parallel;
      else
        throw ConfigError("expected mono, dependency or parallel");
    } else if (key == "path") {
      s.path = base / value;
    } else if (key == "lang" || key == "src_lang") {
      s.lang = LanguageCode(value);
    } else if (key == "tgt_lang") {
      s.tgt_lang = LanguageCode(value);
    } else if (key == "src") {
      s.parallel.src = base / value;
    } else if (key == "tgt") {
      s.parallel.tgt = base / value;
    } else if (key == "align") {
      s.parallel.align = base / value;
    } else if (key == "src_deps") {
      s.parallel.src_deps = base / value;
    } else if (key == "tgt_deps") {
      s.parallel.tgt_deps = base / value;
    } else {
      throw ConfigError("unknown key");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

const StreamSource* RunConfig::stream(const std::string& id) const {
  for (const auto& s : streams)
    if (s.id == id) return &s;
  return nullptr;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  const std::filesystem::path base = path.parent_path();
  RunConfig cfg;
  std::deque<bool> kind_set;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      std::string inner = trim(std::string_view(line).substr(1, line.size() - 2));
      if (inner.rfind("stream", 0) != 0) throw ConfigError(where + "unknown section '" + inner + "'");
      StreamSource s;
      s.id = trim(std::string_view(inner).substr(6));
      if (s.id.empty()) throw ConfigError(where + "stream section needs an id");
      if (cfg.stream(s.id)) throw ConfigError(where + "stream '" + s.id + "' declared twice");
      cfg.streams.push_back(std::move(s));
      kind_set.push_back(false);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    try {
      if (cfg.streams.empty())
        apply_top(cfg, key, value, base);
      else
        apply_stream(cfg.streams.back(), key, value, base, kind_set.back());
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  for (std::size_t i = 0; i < cfg.streams.size(); ++i)
    if (!kind_set[i]) throw ConfigError("stream '" + cfg.streams[i].id + "': missing key 'kind'");
  for (const auto& [key, value] : overrides) apply_top(cfg, key, value, std::filesystem::current_path());
  return cfg;
}

CompositeSpec validate_run_config(const RunConfig& cfg) {
  if (cfg.model.empty()) throw ConfigError("missing key 'model'");
  if (!cfg.seed_set) throw ConfigError("missing key 'seed' (training requires an explicit seed)");
  if (cfg.output.empty()) throw ConfigError("missing key 'output'");
  if (cfg.min_count < 1) throw ConfigError("min_count: must be >= 1");
  cfg.train.validate();
  CompositeSpec composite;
  try {
    composite = parse_composite(cfg.model, cfg.distance_cap);
  } catch (const SpecParseError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  for (const auto& part : composite.parts)
    if (!cfg.stream(part.stream_id))
      throw ConfigError("model: stream id '" + part.stream_id + "' is not declared");
  auto need = [](const StreamSource& s, const char* key, const std::filesystem::path& p) {
    if (p.empty()) throw ConfigError("stream '" + s.id + "': missing key '" + key + "'");
    if (!std::filesystem::exists(p))
      throw ConfigError("stream '" + s.id + "' " + key + ": file '" + p.string() + "' does not exist");
  };
  for (const auto& s : cfg.streams) {
    if (s.lang.empty()) throw ConfigError("stream '" + s.id + "': missing key 'lang'");
    if (s.kind == StreamKind::parallel) {
      if (s.tgt_lang.empty()) throw ConfigError("stream '" + s.id + "': missing key 'tgt_lang'");
      need(s, "src", s.parallel.src);
      need(s, "tgt", s.parallel.tgt);
      need(s, "align", s.parallel.align);
      if (s.parallel.src_deps) need(s, "src_deps", *s.parallel.src_deps);
      if (s.parallel.tgt_deps) need(s, "tgt_deps", *s.parallel.tgt_deps);
    } else {
      need(s, "path", s.path);
    }
  }
  return composite;
}

}  // namespace mge
