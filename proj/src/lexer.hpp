#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "lamsynth/source.hpp"

namespace lamsynth::detail {

struct Token {
  enum class Kind { Ident, Int, LParen, RParen, Comma, Colon, End };
  Kind kind = Kind::End;
  std::string_view text;
  long long number = 0;
  std::size_t pos = 0;
};

inline std::string describe(const Token& t) {
  if (t.kind == Token::Kind::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

  bool accept(Token::Kind k) {
    if (cur_.kind != k) return false;
    advance();
    return true;
  }

  Token expect(Token::Kind k, std::string_view what) {
    if (cur_.kind != k) fail("expected " + std::string(what) + ", found " + describe(cur_));
    return next();
  }

  bool at_keyword(std::string_view kw) const { return cur_.kind == Token::Kind::Ident && cur_.text == kw; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(cur_.pos, msg); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& msg) const { throw ParseError(pos, msg); }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_ = Token{};
    cur_.pos = pos_;
    if (pos_ >= src_.size()) return;
    const char c = src_[pos_];
    auto single = [&](Token::Kind k) {
      cur_.kind = k;
      cur_.text = src_.substr(pos_, 1);
      ++pos_;
    };
    switch (c) {
      case '(':
        return single(Token::Kind::LParen);
      case ')':
        return single(Token::Kind::RParen);
      case ',':
        return single(Token::Kind::Comma);
      case ':':
        return single(Token::Kind::Colon);
      default:
        break;
    }
    const std::size_t start = pos_;
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      cur_.text = src_.substr(start, pos_ - start);
      if (cur_.text == "-" || cur_.text.size() > 12) throw ParseError(start, "malformed integer");
      cur_.kind = Token::Kind::Int;
      cur_.number = std::stoll(std::string(cur_.text));
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      cur_.kind = Token::Kind::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token cur_;
};

}  // namespace lamsynth::detail
