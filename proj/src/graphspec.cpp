#include "mge/graphspec.hpp"

#include <algorithm>

namespace mge {

char label_char(Label l) noexcept {
  switch (l) {
    case Label::T:
      return 'T';
    case Label::A:
      return 'A';
    case Label::D:
      return 'D';
  }
  return '?';
}

ModelSpec::ModelSpec(std::vector<LabelClass> classes) : classes_(std::move(classes)) {
  LabelSet seen;
  for (const auto& c : classes_) {
    if (c.members.empty()) throw std::invalid_argument("empty label class");
    if (c.distance < 0) throw std::invalid_argument("negative distance");
    if (seen.intersects(c.members)) throw std::invalid_argument("label classes overlap");
    seen = seen | c.members;
    for (Label l : kAllLabels)
      if (c.members.contains(l)) distances_[static_cast<std::size_t>(l)] = c.distance;
  }
}

int ModelSpec::max_distance() const noexcept { return *std::max_element(distances_.begin(), distances_.end()); }

LabelSet ModelSpec::active_labels() const noexcept {
  LabelSet out;
  for (Label l : kAllLabels)
    if (distance_of(l) > 0) out.insert(l);
  return out;
}

std::string ModelSpec::render() const {
  auto first_label = [](const LabelClass& c) {
    for (Label l : kAllLabels)
      if (c.members.contains(l)) return static_cast<int>(l);
    return 3;
  };
  std::vector<LabelClass> sorted = classes_;
  std::sort(sorted.begin(), sorted.end(),
            [&](const LabelClass& a, const LabelClass& b) { return first_label(a) < first_label(b); });
  std::string out;
  for (const auto& c : sorted) {
    if (c.distance == 0) continue;
    const bool group = c.members.size() > 1;
    if (group) out += '(';
    for (Label l : kAllLabels)
      if (c.members.contains(l)) out += label_char(l);
    if (group) out += ')';
    out += std::to_string(c.distance);
  }
  return out;
}

int distance_of(const ModelSpec& spec, Label l) noexcept { return spec.distance_of(l); }

namespace {

bool label_from_char(char ch, Label& out) {
  switch (ch) {
    case 'T':
      out = Label::T;
      return true;
    case 'A':
      out = Label::A;
      return true;
    case 'D':
      out = Label::D;
      return true;
    default:
      return false;
  }
}

// Parses text[begin, end) with positions reported relative to `offset`.
ModelSpec parse_spec_at(std::string_view text, std::size_t offset, int cap) {
  if (text.empty()) throw SpecParseError("empty model spec", offset);
  std::vector<LabelClass> classes;
  LabelSet seen;
  std::size_t i = 0;
  auto take_label = [&](LabelSet& into) {
    Label l;
    if (i >= text.size()) throw SpecParseError("expected label T, A or D", offset + i);
    if (!label_from_char(text[i], l))
      throw SpecParseError(std::string("unknown label '") + text[i] + "'", offset + i);
    if (seen.contains(l) || into.contains(l))
      throw SpecParseError(std::string("label '") + text[i] + "' repeated", offset + i);
    into.insert(l);
    ++i;
  };
  while (i < text.size()) {
    LabelClass cls;
    if (text[i] == '(') {
      const std::size_t open = i++;
      while (i < text.size() && text[i] != ')') take_label(cls.members);
      if (i >= text.size()) throw SpecParseError("unclosed '('", offset + open);
      if (cls.members.size() < 2) throw SpecParseError("a group needs 2 or 3 labels", offset + open);
      ++i;
    } else {
      take_label(cls.members);
    }
    const std::size_t digits = i;
    long value = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      value = value * 10 + (text[i] - '0');
      if (value > 1'000'000) break;
      ++i;
    }
    if (i == digits) throw SpecParseError("expected a distance", offset + i);
    if (value == 0) throw SpecParseError("distance 0 must be omitted, not written", offset + digits);
    if (value > cap)
      throw SpecParseError("distance " + std::to_string(value) + " exceeds cap " + std::to_string(cap),
                           offset + digits);
    cls.distance = static_cast<int>(value);
    seen = seen | cls.members;
    classes.push_back(cls);
  }
  return ModelSpec(std::move(classes));
}

}  // namespace

ModelSpec parse_spec(std::string_view text, int distance_cap) { return parse_spec_at(text, 0, distance_cap); }

std::string CompositeSpec::render() const {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '+';
    out += p.spec.render() + "[" + p.stream_id + "]";
  }
  return out;
}

CompositeSpec parse_composite(std::string_view text, int distance_cap) {
  if (text.empty()) throw SpecParseError("empty composite model", 0);
  CompositeSpec out;
  std::size_t start = 0;
  while (true) {
    std::size_t plus = text.find('+', start);
    std::string_view part = text.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
    const auto open = part.find('[');
    if (open == std::string_view::npos) throw SpecParseError("missing '[stream]' after model", start + part.size());
    if (part.back() != ']') throw SpecParseError("expected ']' at end of part", start + part.size());
    std::string_view id = part.substr(open + 1, part.size() - open - 2);
    if (id.empty()) throw SpecParseError("empty stream id", start + open + 1);
    for (std::size_t k = 0; k < id.size(); ++k) {
      const char ch = id[k];
      const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                      ch == '_' || ch == '-' || ch == '.';
      if (!ok) throw SpecParseError(std::string("invalid character '") + ch + "' in stream id", start + open + 1 + k);
    }
    out.parts.push_back({parse_spec_at(part.substr(0, open), start, distance_cap), std::string(id)});
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return out;
}

}  // namespace mge
