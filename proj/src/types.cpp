#include "mge/types.hpp"

namespace mge {

bool LanguageCode::valid(std::string_view code) noexcept {
  if (code.size() < 2 || code.size() > 3) return false;
  for (char ch : code)
    if (ch < 'a' || ch > 'z') return false;
  return true;
}

LanguageCode::LanguageCode(std::string_view code) : code_(code) {
  if (!valid(code)) throw ConfigError("invalid language code '" + std::string(code) + "'");
}

TaggedWord::TaggedWord(std::string s, LanguageCode l) : surface(std::move(s)), lang(std::move(l)) {
  if (surface.empty()) throw DataError("empty word surface");
  for (char ch : surface)
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r')
      throw DataError("word surface contains whitespace: '" + surface + "'");
}

std::string TaggedWord::key() const { return surface + "_" + lang.str(); }

TaggedWord TaggedWord::parse(std::string_view key) {
  auto pos = key.rfind('_');
  if (pos == std::string_view::npos || pos == 0 || !LanguageCode::valid(key.substr(pos + 1)))
    throw DataError("word '" + std::string(key) + "' is not language-tagged (expected surface_lang)");
  return TaggedWord(std::string(key.substr(0, pos)), LanguageCode(key.substr(pos + 1)));
}

}  // namespace mge
