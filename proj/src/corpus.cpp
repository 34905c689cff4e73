#include "mge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>

namespace mge {
namespace {

bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == '\v' || ch == '\f'; }

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

Sentence tokenize(std::string_view line, const LanguageCode& lang) {
  Sentence s;
  for (auto tok : split_whitespace(line)) s.tokens.emplace_back(std::string(tok), lang);
  return s;
}

/// Parses `a-b` pairs. Malformed tokens are dropped and counted.
std::vector<std::pair<int, int>> parse_pairs(std::string_view line, std::size_t& warnings) {
  std::vector<std::pair<int, int>> out;
  for (auto tok : split_whitespace(line)) {
    auto dash = tok.find('-');
    std::optional<int> a, b;
    if (dash != std::string_view::npos) {
      a = parse_int(tok.substr(0, dash));
      b = parse_int(tok.substr(dash + 1));
    }
    if (!a || !b) {
      ++warnings;
      continue;
    }
    out.emplace_back(*a, *b);
  }
  return out;
}

std::vector<DepArc> sidecar_arcs(std::string_view line, std::size_t n_tokens, std::size_t& warnings) {
  std::vector<DepArc> arcs;
  std::vector<bool> has_head(n_tokens, false);
  for (auto [h, d] : parse_pairs(line, warnings)) {
    if (h < 0 || d < 0 || static_cast<std::size_t>(h) >= n_tokens || static_cast<std::size_t>(d) >= n_tokens ||
        h == d || has_head[static_cast<std::size_t>(d)]) {
      ++warnings;
      continue;
    }
    has_head[static_cast<std::size_t>(d)] = true;
    arcs.push_back({h, d});
  }
  return arcs;
}

class MonolingualReader final : public UnitReader {
 public:
  MonolingualReader(const std::filesystem::path& path, LanguageCode lang)
      : in_(open_input(path)), lang_(std::move(lang)) {}

  std::optional<TrainingUnit> next() override {
    std::string line;
    while (std::getline(in_, line)) {
      ++stats_.lines_read;
      chomp(line);
      if (!valid_utf8(line)) {
        ++stats_.warnings;
        continue;
      }
      TrainingUnit unit;
      unit.src = tokenize(line, lang_);
      if (unit.src.tokens.empty()) continue;
      ++stats_.units_emitted;
      return unit;
    }
    if (in_.bad()) throw DataError("I/O failure while reading monolingual corpus");
    return std::nullopt;
  }

 private:
  std::ifstream in_;
  LanguageCode lang_;
};

class DependencyReader final : public UnitReader {
 public:
  DependencyReader(const std::filesystem::path& path, LanguageCode lang)
      : in_(open_input(path)), lang_(std::move(lang)) {}

  std::optional<TrainingUnit> next() override {
    std::vector<std::string> block;
    std::string line;
    bool eof = false;
    while (!eof) {
      block.clear();
      while (true) {
        if (!std::getline(in_, line)) {
          eof = true;
          break;
        }
        ++stats_.lines_read;
        chomp(line);
        if (line.empty() || std::all_of(line.begin(), line.end(), is_space)) {
          if (block.empty()) continue;
          break;
        }
        if (line.front() == '#') continue;
        block.push_back(line);
      }
      if (in_.bad()) throw DataError("I/O failure while reading dependency corpus");
      if (block.empty()) continue;
      if (auto unit = parse_block(block)) {
        ++stats_.units_emitted;
        return unit;
      }
      ++stats_.warnings;
    }
    return std::nullopt;
  }

 private:
  std::optional<TrainingUnit> parse_block(const std::vector<std::string>& block) const {
    TrainingUnit unit;
    std::vector<int> heads;
    for (const auto& raw : block) {
      if (!valid_utf8(raw)) return std::nullopt;
      std::vector<std::string_view> fields;
      std::string_view rest(raw);
      if (rest.find('\t') != std::string_view::npos) {
        std::size_t start = 0;
        while (true) {
          auto tab = rest.find('\t', start);
          fields.push_back(rest.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
          if (tab == std::string_view::npos) break;
          start = tab + 1;
        }
      } else {
        fields = split_whitespace(rest);
      }
      if (fields.size() < 7) return std::nullopt;
      auto id = parse_int(fields[0]);
      auto head = parse_int(fields[6]);
      if (!id || !head || *id != static_cast<int>(unit.src.tokens.size()) + 1) return std::nullopt;
      if (fields[1].empty() || std::any_of(fields[1].begin(), fields[1].end(), is_space)) return std::nullopt;
      unit.src.tokens.emplace_back(std::string(fields[1]), lang_);
      heads.push_back(*head);
    }
    const int n = static_cast<int>(heads.size());
    for (int i = 0; i < n; ++i) {
      const int h = heads[static_cast<std::size_t>(i)];
      if (h < 0 || h > n || h == i + 1) return std::nullopt;
      if (h > 0) unit.src.deps.push_back({h - 1, i});
    }
    return unit;
  }

  std::ifstream in_;
  LanguageCode lang_;
};

class ParallelReader final : public UnitReader {
 public:
  ParallelReader(const ParallelPaths& paths, LanguageCode src_lang, LanguageCode tgt_lang)
      : src_(open_input(paths.src)),
        tgt_(open_input(paths.tgt)),
        align_(open_input(paths.align)),
        src_lang_(std::move(src_lang)),
        tgt_lang_(std::move(tgt_lang)) {
    if (paths.src_deps) src_deps_.emplace(open_input(*paths.src_deps));
    if (paths.tgt_deps) tgt_deps_.emplace(open_input(*paths.tgt_deps));
  }

  std::optional<TrainingUnit> next() override {
    std::string s, t, a, sd, td;
    while (true) {
      const bool got_s = static_cast<bool>(std::getline(src_, s));
      const bool got_t = static_cast<bool>(std::getline(tgt_, t));
      const bool got_a = static_cast<bool>(std::getline(align_, a));
      bool got_sd = got_s, got_td = got_s;
      if (src_deps_) got_sd = static_cast<bool>(std::getline(*src_deps_, sd));
      if (tgt_deps_) got_td = static_cast<bool>(std::getline(*tgt_deps_, td));
      if (!got_s && !got_t && !got_a && (!src_deps_ || !got_sd) && (!tgt_deps_ || !got_td)) return std::nullopt;
      if (got_s != got_t || got_s != got_a || got_s != got_sd || got_s != got_td)
        throw DataError("parallel corpus files have different line counts (mismatch after line " +
                        std::to_string(stats_.lines_read) + ")");
      ++stats_.lines_read;
      for (auto* l : {&s, &t, &a, &sd, &td}) chomp(*l);
      if (!valid_utf8(s) || !valid_utf8(t) || !valid_utf8(a) || !valid_utf8(sd) || !valid_utf8(td)) {
        ++stats_.warnings;
        continue;
      }
      TrainingUnit unit;
      unit.src = tokenize(s, src_lang_);
      Sentence tgt = tokenize(t, tgt_lang_);
      if (unit.src.tokens.empty() || tgt.tokens.empty()) {
        ++stats_.warnings;
        continue;
      }
      const int ns = static_cast<int>(unit.src.size());
      const int nt = static_cast<int>(tgt.size());
      for (auto [i, j] : parse_pairs(a, stats_.warnings)) {
        if (i < 0 || j < 0 || i >= ns || j >= nt) {
          ++stats_.warnings;
          continue;
        }
        unit.alignments.push_back({i, j});
      }
      std::sort(unit.alignments.begin(), unit.alignments.end());
      unit.alignments.erase(std::unique(unit.alignments.begin(), unit.alignments.end()), unit.alignments.end());
      if (src_deps_) unit.src.deps = sidecar_arcs(sd, unit.src.size(), stats_.warnings);
      if (tgt_deps_) tgt.deps = sidecar_arcs(td, tgt.size(), stats_.warnings);
      unit.tgt = std::move(tgt);
      ++stats_.units_emitted;
      return unit;
    }
  }

 private:
  std::ifstream src_, tgt_, align_;
  std::optional<std::ifstream> src_deps_, tgt_deps_;
  LanguageCode src_lang_, tgt_lang_;
};

class MemoryReader final : public UnitReader {
 public:
  explicit MemoryReader(std::shared_ptr<const std::vector<TrainingUnit>> units) : units_(std::move(units)) {}

  std::optional<TrainingUnit> next() override {
    while (pos_ < units_->size()) {
      const TrainingUnit& unit = (*units_)[pos_++];
      ++stats_.lines_read;
      if (!validate_unit(unit).empty()) {
        ++stats_.warnings;
        continue;
      }
      ++stats_.units_emitted;
      return unit;
    }
    return std::nullopt;
  }

 private:
  std::shared_ptr<const std::vector<TrainingUnit>> units_;
  std::size_t pos_ = 0;
};

std::string validate_sentence(const Sentence& s, const char* side) {
  const int n = static_cast<int>(s.size());
  std::vector<bool> has_head(s.size(), false);
  for (const auto& arc : s.deps) {
    if (arc.head < 0 || arc.dep < 0 || arc.head >= n || arc.dep >= n)
      return std::string(side) + " dependency arc out of range";
    if (arc.head == arc.dep) return std::string(side) + " dependency arc is a self-loop";
    if (has_head[static_cast<std::size_t>(arc.dep)]) return std::string(side) + " token has two heads";
    has_head[static_cast<std::size_t>(arc.dep)] = true;
  }
  return {};
}

}  // namespace

std::string validate_unit(const TrainingUnit& unit) {
  if (auto err = validate_sentence(unit.src, "source"); !err.empty()) return err;
  if (!unit.tgt) return unit.alignments.empty() ? std::string{} : "alignments without a target sentence";
  if (auto err = validate_sentence(*unit.tgt, "target"); !err.empty()) return err;
  const int ns = static_cast<int>(unit.src.size());
  const int nt = static_cast<int>(unit.tgt->size());
  for (const auto& link : unit.alignments)
    if (link.src < 0 || link.tgt < 0 || link.src >= ns || link.tgt >= nt) return "alignment link out of range";
  return {};
}

std::unique_ptr<UnitReader> read_monolingual(const std::filesystem::path& path, const LanguageCode& lang) {
  return std::make_unique<MonolingualReader>(path, lang);
}

std::unique_ptr<UnitReader> read_dependency(const std::filesystem::path& path, const LanguageCode& lang) {
  return std::make_unique<DependencyReader>(path, lang);
}

std::unique_ptr<UnitReader> read_parallel(const ParallelPaths& paths, const LanguageCode& src_lang,
                                          const LanguageCode& tgt_lang) {
  return std::make_unique<ParallelReader>(paths, src_lang, tgt_lang);
}

std::unique_ptr<UnitReader> read_memory(std::shared_ptr<const std::vector<TrainingUnit>> units) {
  return std::make_unique<MemoryReader>(std::move(units));
}

std::vector<TrainingUnit> read_all(UnitReader& reader) {
  std::vector<TrainingUnit> out;
  while (auto unit = reader.next()) out.push_back(std::move(*unit));
  return out;
}

std::unique_ptr<UnitReader> StreamSource::open() const {
  if (memory) return read_memory(memory);
  switch (kind) {
    case StreamKind::mono:
      return read_monolingual(path, lang);
    case StreamKind::dependency:
      return read_dependency(path, lang);
    case StreamKind::parallel:
      return read_parallel(parallel, lang, tgt_lang);
  }
  throw ConfigError("unknown stream kind");
}

StreamSource memory_stream(std::string id, std::vector<TrainingUnit> units) {
  StreamSource s;
  s.id = std::move(id);
  s.memory = std::make_shared<const std::vector<TrainingUnit>>(std::move(units));
  return s;
}

bool valid_utf8(std::string_view text) noexcept {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if ((cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) return false;
    i += len;
  }
  return true;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace mge
