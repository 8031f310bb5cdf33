#include "mj/lexer.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <unordered_map>

namespace mj {

std::string format_diagnostic(const Diagnostic& d) {
  const char* sev = d.severity == Severity::Error     ? "error"
                    : d.severity == Severity::Warning ? "warning"
                                                      : "note";
  return d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + sev +
         ": " + d.message;
}

SyntaxError::SyntaxError(Diagnostic diag, std::vector<std::string> expected)
    : std::runtime_error(format_diagnostic(diag)),
      diag_(std::move(diag)),
      expected_(std::move(expected)) {}

std::string token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::StrLit: return "string literal";
    case TokenKind::KwClass: return "'class'";
    case TokenKind::KwExtends: return "'extends'";
    case TokenKind::KwStatic: return "'static'";
    case TokenKind::KwTest: return "'test'";
    case TokenKind::KwInt: return "'int'";
    case TokenKind::KwBool: return "'bool'";
    case TokenKind::KwStr: return "'str'";
    case TokenKind::KwVoid: return "'void'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwWhile: return "'while'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::KwTry: return "'try'";
    case TokenKind::KwCatch: return "'catch'";
    case TokenKind::KwAssert: return "'assert'";
    case TokenKind::KwSuper: return "'super'";
    case TokenKind::KwNew: return "'new'";
    case TokenKind::KwNull: return "'null'";
    case TokenKind::KwThis: return "'this'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Semi: return "';'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Assign: return "'='";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::NotEq: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Ge: return "'>='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::Bang: return "'!'";
    case TokenKind::AndAnd: return "'&&'";
    case TokenKind::OrOr: return "'||'";
    case TokenKind::Eof: return "end of file";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, TokenKind>& keywords() {
  static const std::unordered_map<std::string_view, TokenKind> table = {
      {"class", TokenKind::KwClass},   {"extends", TokenKind::KwExtends},
      {"static", TokenKind::KwStatic}, {"test", TokenKind::KwTest},
      {"int", TokenKind::KwInt},       {"bool", TokenKind::KwBool},
      {"str", TokenKind::KwStr},       {"void", TokenKind::KwVoid},
      {"if", TokenKind::KwIf},         {"else", TokenKind::KwElse},
      {"while", TokenKind::KwWhile},   {"return", TokenKind::KwReturn},
      {"try", TokenKind::KwTry},       {"catch", TokenKind::KwCatch},
      {"assert", TokenKind::KwAssert}, {"super", TokenKind::KwSuper},
      {"new", TokenKind::KwNew},       {"null", TokenKind::KwNull},
      {"this", TokenKind::KwThis},     {"true", TokenKind::KwTrue},
      {"false", TokenKind::KwFalse},
  };
  return table;
}

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token tok = next();
      const bool done = tok.kind == TokenKind::Eof;
      out.push_back(std::move(tok));
      if (done) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  const std::string& file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(int line, int col, const std::string& msg) {
    throw SyntaxError(Diagnostic{file_, line, col, Severity::Error, msg}, {});
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        const int l = line_, cl = col_;
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (at_end()) fail(l, cl, "unterminated block comment");
          advance();
        }
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t begin, int line, int col, std::string text = {}) {
    Token t;
    t.kind = kind;
    t.text = text.empty() ? std::string(src_.substr(begin, pos_ - begin)) : std::move(text);
    t.span = SourceSpan{line, col, begin, pos_};
    return t;
  }

  Token next() {
    const std::size_t begin = pos_;
    const int line = line_, col = col_;
    if (at_end()) return make(TokenKind::Eof, begin, line, col, "<eof>");

    char c = advance();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      auto word = src_.substr(begin, pos_ - begin);
      auto it = keywords().find(word);
      return make(it == keywords().end() ? TokenKind::Ident : it->second, begin, line, col);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      Token t = make(TokenKind::IntLit, begin, line, col);
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
      if (ec != std::errc()) fail(line, col, "integer literal out of range");
      return t;
    }
    if (c == '"') {
      std::string value;
      for (;;) {
        if (at_end() || peek() == '\n') fail(line, col, "unterminated string literal");
        char d = advance();
        if (d == '"') break;
        if (d == '\\') {
          char e = at_end() ? '\0' : advance();
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            default: fail(line_, col_ - 1, "unknown escape sequence");
          }
        } else {
          value += d;
        }
      }
      Token t = make(TokenKind::StrLit, begin, line, col);
      t.text = std::move(value);
      return t;
    }
    auto two = [&](char second, TokenKind yes, TokenKind no) {
      if (peek() == second) {
        advance();
        return make(yes, begin, line, col);
      }
      return make(no, begin, line, col);
    };
    switch (c) {
      case '{': return make(TokenKind::LBrace, begin, line, col);
      case '}': return make(TokenKind::RBrace, begin, line, col);
      case '(': return make(TokenKind::LParen, begin, line, col);
      case ')': return make(TokenKind::RParen, begin, line, col);
      case ';': return make(TokenKind::Semi, begin, line, col);
      case ',': return make(TokenKind::Comma, begin, line, col);
      case '.': return make(TokenKind::Dot, begin, line, col);
      case '+': return make(TokenKind::Plus, begin, line, col);
      case '-': return make(TokenKind::Minus, begin, line, col);
      case '*': return make(TokenKind::Star, begin, line, col);
      case '/': return make(TokenKind::Slash, begin, line, col);
      case '%': return make(TokenKind::Percent, begin, line, col);
      case '=': return two('=', TokenKind::EqEq, TokenKind::Assign);
      case '!': return two('=', TokenKind::NotEq, TokenKind::Bang);
      case '<': return two('=', TokenKind::Le, TokenKind::Lt);
      case '>': return two('=', TokenKind::Ge, TokenKind::Gt);
      case '&':
        if (peek() == '&') {
          advance();
          return make(TokenKind::AndAnd, begin, line, col);
        }
        break;
      case '|':
        if (peek() == '|') {
          advance();
          return make(TokenKind::OrOr, begin, line, col);
        }
        break;
      default: break;
    }
    fail(line, col, std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file) {
  return Lexer(source, file).run();
}

}  // namespace mj
