#include "lexer.hpp"

#include <algorithm>
#include <cctype>

namespace qramverify::detail {

std::vector<Token> tokenize(std::string_view src, const std::vector<std::string>& symbols,
                            const std::map<std::string, Token>& aliases) {
  std::vector<std::string> ordered = symbols;
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      const unsigned char c = static_cast<unsigned char>(src[i]);
      if (c == '\n') {
        ++line;
        col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const SourcePos start{line, col};
      const std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw SyntaxError(start.line, start.col, "end of comment");
      advance(end + 2 - i);
      continue;
    }
    const SourcePos pos{line, col};
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Token::Kind::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      out.push_back({Token::Kind::Number, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& [spelling, tok] : aliases) {
      if (src.substr(i, spelling.size()) == spelling) {
        Token t = tok;
        t.pos = pos;
        out.push_back(t);
        advance(spelling.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const auto& s : ordered) {
      if (src.substr(i, s.size()) == s) {
        out.push_back({Token::Kind::Symbol, s, pos});
        advance(s.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    std::size_t len = 1;
    if (c >= 0xC0) {
      while (i + len < src.size() && (static_cast<unsigned char>(src[i + len]) & 0xC0) == 0x80) ++len;
    }
    throw SyntaxError(pos.line, pos.col, "a token, found '" + std::string(src.substr(i, len)) + "'");
  }
  out.push_back({Token::Kind::End, "", {line, col}});
  return out;
}

}  // namespace qramverify::detail
