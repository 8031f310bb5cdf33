#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mj/source.hpp"

namespace mj {

enum class TokenKind {
  Ident,
  IntLit,
  StrLit,
  // keywords
  KwClass,
  KwExtends,
  KwStatic,
  KwTest,
  KwInt,
  KwBool,
  KwStr,
  KwVoid,
  KwIf,
  KwElse,
  KwWhile,
  KwReturn,
  KwTry,
  KwCatch,
  KwAssert,
  KwSuper,
  KwNew,
  KwNull,
  KwThis,
  KwTrue,
  KwFalse,
  // punctuation
  LBrace,
  RBrace,
  LParen,
  RParen,
  Semi,
  Comma,
  Dot,
  Assign,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Bang,
  AndAnd,
  OrOr,
  Eof,
};

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string text;  // identifier name, decoded string literal, or lexeme
  std::int64_t int_value = 0;
  SourceSpan span;
};

/// Human-readable token description used in "expected" sets.
std::string token_kind_name(TokenKind kind);

/// Splits UTF-8 source into tokens; the last token is always Eof.
/// Throws SyntaxError on malformed input.
std::vector<Token> tokenize(std::string_view source, const std::string& file);

}  // namespace mj
