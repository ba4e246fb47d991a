#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qramverify/errors.hpp"
#include "qramverify/silq_ast.hpp"

namespace qramverify::detail {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  SourcePos pos;
};

/// Tokenizer shared by the two front ends. Symbols are matched longest
/// first; `aliases` rewrites multi-byte spellings (e.g. "¬") to a canonical
/// symbol or identifier. `//` and `/* */` comments are skipped.
std::vector<Token> tokenize(std::string_view source, const std::vector<std::string>& symbols,
                            const std::map<std::string, Token>& aliases);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Symbol && peek(ahead).text == s;
  }
  bool is_ident(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Ident && peek(ahead).text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    next();
    return true;
  }
  bool accept_ident(std::string_view s) {
    if (!is_ident(s)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().pos.line, peek().pos.col, expected + ", found " + describe(peek()));
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
  }
  void expect_ident(std::string_view s) {
    if (!accept_ident(s)) fail("'" + std::string(s) + "'");
  }
  std::string identifier(const std::string& what = "identifier") {
    if (peek().kind != Token::Kind::Ident) fail(what);
    return next().text;
  }
  std::string number(const std::string& what = "number") {
    if (peek().kind != Token::Kind::Number) fail(what);
    return next().text;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::End: return "end of input";
      case Token::Kind::Number: return "number " + t.text;
      default: return "'" + t.text + "'";
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace qramverify::detail
