#include "mj/parser.hpp"

#include <initializer_list>

#include "mj/lexer.hpp"

namespace mj {
namespace {

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  return SourceSpan{a.line, a.column, a.begin, b.end};
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::string& file)
      : toks_(std::move(tokens)), file_(file) {}

  Program program() {
    Program p;
    p.file = file_;
    while (!at(TokenKind::Eof)) {
      if (!at(TokenKind::KwClass)) fail({TokenKind::KwClass, TokenKind::Eof});
      p.classes.push_back(class_decl());
    }
    return p;
  }

  Stmt single_statement() {
    Stmt s = statement();
    if (!at(TokenKind::Eof)) fail({TokenKind::Eof});
    return s;
  }

 private:
  std::vector<Token> toks_;
  const std::string& file_;
  std::size_t pos_ = 0;
  SourceSpan last_span_;

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return cur().kind == k; }

  Token take() {
    Token t = toks_[pos_];
    if (t.kind != TokenKind::Eof) ++pos_;
    last_span_ = t.span;
    return t;
  }

  bool accept(TokenKind k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  [[noreturn]] void fail(std::initializer_list<TokenKind> expected) {
    std::vector<std::string> names;
    std::string msg = "expected ";
    for (auto k : expected) {
      if (!names.empty()) msg += " or ";
      names.push_back(token_kind_name(k));
      msg += names.back();
    }
    msg += ", found " + (cur().kind == TokenKind::Eof ? std::string("end of file")
                                                       : "'" + cur().text + "'");
    throw SyntaxError(
        Diagnostic{file_, cur().span.line, cur().span.column, Severity::Error, msg},
        std::move(names));
  }

  [[noreturn]] void fail_msg(const std::string& msg, const SourceSpan& at_span) {
    throw SyntaxError(Diagnostic{file_, at_span.line, at_span.column, Severity::Error, msg}, {});
  }

  Token expect(TokenKind k) {
    if (!at(k)) fail({k});
    return take();
  }

  static bool is_type_start(TokenKind k) {
    return k == TokenKind::KwInt || k == TokenKind::KwBool || k == TokenKind::KwStr ||
           k == TokenKind::KwVoid || k == TokenKind::Ident;
  }

  StaticType type() {
    switch (cur().kind) {
      case TokenKind::KwInt: take(); return StaticType::integer();
      case TokenKind::KwBool: take(); return StaticType::boolean();
      case TokenKind::KwStr: take(); return StaticType::string();
      case TokenKind::KwVoid: take(); return StaticType::void_type();
      case TokenKind::Ident: return StaticType::of_class(take().text);
      default:
        fail({TokenKind::KwInt, TokenKind::KwBool, TokenKind::KwStr, TokenKind::KwVoid,
              TokenKind::Ident});
    }
  }

  ClassDecl class_decl() {
    ClassDecl c;
    const SourceSpan start = expect(TokenKind::KwClass).span;
    c.name = expect(TokenKind::Ident).text;
    if (accept(TokenKind::KwExtends)) c.super_name = expect(TokenKind::Ident).text;
    expect(TokenKind::LBrace);
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::Eof)) fail({TokenKind::RBrace});
      member(c);
    }
    take();
    c.span = join(start, last_span_);
    return c;
  }

  std::vector<Param> params() {
    std::vector<Param> ps;
    expect(TokenKind::LParen);
    if (accept(TokenKind::RParen)) return ps;
    for (;;) {
      if (!is_type_start(cur().kind))
        fail({TokenKind::KwInt, TokenKind::KwBool, TokenKind::KwStr, TokenKind::Ident,
              TokenKind::RParen});
      Param p;
      p.span = cur().span;
      p.type = type();
      p.name = expect(TokenKind::Ident).text;
      p.span = join(p.span, last_span_);
      ps.push_back(std::move(p));
      if (accept(TokenKind::RParen)) break;
      if (!at(TokenKind::Comma)) fail({TokenKind::Comma, TokenKind::RParen});
      take();
    }
    return ps;
  }

  void member(ClassDecl& c) {
    const SourceSpan start = cur().span;
    // constructor: ClassName '('
    if (at(TokenKind::Ident) && cur().text == c.name && ahead(1).kind == TokenKind::LParen) {
      take();
      CtorDecl ctor;
      ctor.params = params();
      ctor.body = block();
      ctor.span = join(start, last_span_);
      c.ctors.push_back(std::move(ctor));
      return;
    }
    const bool is_test = accept(TokenKind::KwTest);
    const bool is_static = accept(TokenKind::KwStatic);
    if (!is_type_start(cur().kind))
      fail({TokenKind::KwStatic, TokenKind::KwTest, TokenKind::KwInt, TokenKind::KwBool,
            TokenKind::KwStr, TokenKind::KwVoid, TokenKind::Ident, TokenKind::RBrace});
    StaticType t = type();
    std::string name = expect(TokenKind::Ident).text;
    if (at(TokenKind::LParen)) {
      MethodDecl m;
      m.is_test = is_test;
      m.is_static = is_static;
      m.return_type = std::move(t);
      m.name = std::move(name);
      m.params = params();
      m.body = block();
      m.span = join(start, last_span_);
      c.methods.push_back(std::move(m));
      return;
    }
    if (is_test) fail_msg("'test' applies to methods only", start);
    FieldDecl f;
    f.is_static = is_static;
    f.type = std::move(t);
    f.name = std::move(name);
    if (accept(TokenKind::Assign)) f.init = expr();
    if (!at(TokenKind::Semi)) fail({TokenKind::Assign, TokenKind::Semi, TokenKind::LParen});
    take();
    f.span = join(start, last_span_);
    c.fields.push_back(std::move(f));
  }

  Block block() {
    Block b;
    expect(TokenKind::LBrace);
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::Eof)) fail({TokenKind::RBrace});
      b.stmts.push_back(statement());
    }
    take();
    return b;
  }

  bool looks_like_var_decl() const {
    switch (cur().kind) {
      case TokenKind::KwInt:
      case TokenKind::KwBool:
      case TokenKind::KwStr: return true;
      case TokenKind::Ident: return ahead(1).kind == TokenKind::Ident;
      default: return false;
    }
  }

  Stmt statement() {
    const SourceSpan start = cur().span;
    auto finish = [&](Stmt::Node node) { return make_stmt(std::move(node), join(start, last_span_)); };

    switch (cur().kind) {
      case TokenKind::LBrace: {
        Block b = block();
        return finish(std::move(b));
      }
      case TokenKind::KwIf: {
        take();
        expect(TokenKind::LParen);
        IfStmt s{expr(), {}, std::nullopt};
        expect(TokenKind::RParen);
        s.then_block = block();
        if (accept(TokenKind::KwElse)) s.else_block = block();
        return finish(std::move(s));
      }
      case TokenKind::KwWhile: {
        take();
        expect(TokenKind::LParen);
        WhileStmt s{expr(), {}};
        expect(TokenKind::RParen);
        s.body = block();
        return finish(std::move(s));
      }
      case TokenKind::KwReturn: {
        take();
        ReturnStmt s;
        if (!at(TokenKind::Semi)) s.value = expr();
        expect(TokenKind::Semi);
        return finish(std::move(s));
      }
      case TokenKind::KwTry: {
        take();
        TryStmt s;
        s.body = block();
        expect(TokenKind::KwCatch);
        expect(TokenKind::LParen);
        Token kind = expect(TokenKind::Ident);
        if (kind.text == "NPE") {
          s.kind = CatchKind::NPE;
        } else if (kind.text == "Any") {
          s.kind = CatchKind::Any;
        } else {
          fail_msg("catch clause must name NPE or Any", kind.span);
        }
        s.var = expect(TokenKind::Ident).text;
        expect(TokenKind::RParen);
        s.handler = block();
        return finish(std::move(s));
      }
      case TokenKind::KwAssert: {
        take();
        expect(TokenKind::LParen);
        AssertStmt s{expr()};
        expect(TokenKind::RParen);
        expect(TokenKind::Semi);
        return finish(std::move(s));
      }
      case TokenKind::KwSuper: {
        take();
        SuperCallStmt s{args()};
        expect(TokenKind::Semi);
        return finish(std::move(s));
      }
      default: break;
    }

    if (looks_like_var_decl()) {
      VarDecl d;
      d.type = type();
      d.name = expect(TokenKind::Ident).text;
      if (accept(TokenKind::Assign)) d.init = expr();
      if (!at(TokenKind::Semi)) fail({TokenKind::Assign, TokenKind::Semi});
      take();
      return finish(std::move(d));
    }

    if (!starts_expr(cur().kind))
      fail({TokenKind::LBrace, TokenKind::KwIf, TokenKind::KwWhile, TokenKind::KwReturn,
            TokenKind::KwTry, TokenKind::KwAssert, TokenKind::KwInt, TokenKind::Ident,
            TokenKind::RBrace});
    Expr e = expr();
    if (accept(TokenKind::Assign)) {
      AssignStmt s{std::move(e), expr()};
      expect(TokenKind::Semi);
      return finish(std::move(s));
    }
    if (!at(TokenKind::Semi)) fail({TokenKind::Assign, TokenKind::Semi});
    take();
    return finish(ExprStmt{std::move(e)});
  }

  static bool starts_expr(TokenKind k) {
    switch (k) {
      case TokenKind::Ident:
      case TokenKind::IntLit:
      case TokenKind::StrLit:
      case TokenKind::KwTrue:
      case TokenKind::KwFalse:
      case TokenKind::KwNull:
      case TokenKind::KwThis:
      case TokenKind::KwNew:
      case TokenKind::LParen:
      case TokenKind::Bang:
      case TokenKind::Minus: return true;
      default: return false;
    }
  }

  std::vector<Expr> args() {
    std::vector<Expr> out;
    expect(TokenKind::LParen);
    if (accept(TokenKind::RParen)) return out;
    for (;;) {
      out.push_back(expr());
      if (accept(TokenKind::RParen)) break;
      if (!at(TokenKind::Comma)) fail({TokenKind::Comma, TokenKind::RParen});
      take();
    }
    return out;
  }

  Expr expr() { return binary(0); }

  struct OpInfo {
    int prec;
    BinaryOp op;
  };

  static std::optional<OpInfo> binary_op(TokenKind k) {
    switch (k) {
      case TokenKind::OrOr: return OpInfo{1, BinaryOp::Or};
      case TokenKind::AndAnd: return OpInfo{2, BinaryOp::And};
      case TokenKind::EqEq: return OpInfo{3, BinaryOp::Eq};
      case TokenKind::NotEq: return OpInfo{3, BinaryOp::Ne};
      case TokenKind::Lt: return OpInfo{4, BinaryOp::Lt};
      case TokenKind::Le: return OpInfo{4, BinaryOp::Le};
      case TokenKind::Gt: return OpInfo{4, BinaryOp::Gt};
      case TokenKind::Ge: return OpInfo{4, BinaryOp::Ge};
      case TokenKind::Plus: return OpInfo{5, BinaryOp::Add};
      case TokenKind::Minus: return OpInfo{5, BinaryOp::Sub};
      case TokenKind::Star: return OpInfo{6, BinaryOp::Mul};
      case TokenKind::Slash: return OpInfo{6, BinaryOp::Div};
      case TokenKind::Percent: return OpInfo{6, BinaryOp::Mod};
      default: return std::nullopt;
    }
  }

  // Precedence climbing; all binary operators are left-associative.
  Expr binary(int min_prec) {
    Expr lhs = unary();
    for (;;) {
      auto info = binary_op(cur().kind);
      if (!info || info->prec <= min_prec) break;
      take();
      Expr rhs = binary(info->prec);
      SourceSpan span = join(lhs.span, rhs.span);
      lhs = make_expr(BinaryExpr{info->op, std::move(lhs), std::move(rhs)}, span);
    }
    return lhs;
  }

  bool looks_like_cast() const {
    if (!(at(TokenKind::LParen) && ahead(1).kind == TokenKind::Ident &&
          ahead(2).kind == TokenKind::RParen))
      return false;
    switch (ahead(3).kind) {
      case TokenKind::Ident:
      case TokenKind::IntLit:
      case TokenKind::StrLit:
      case TokenKind::KwTrue:
      case TokenKind::KwFalse:
      case TokenKind::KwNull:
      case TokenKind::KwThis:
      case TokenKind::KwNew:
      case TokenKind::LParen:
      case TokenKind::Bang: return true;
      default: return false;
    }
  }

  Expr unary() {
    const SourceSpan start = cur().span;
    if (accept(TokenKind::Bang)) {
      Expr operand = unary();
      SourceSpan span = join(start, operand.span);
      return make_expr(UnaryExpr{UnaryOp::Not, std::move(operand)}, span);
    }
    if (accept(TokenKind::Minus)) {
      Expr operand = unary();
      SourceSpan span = join(start, operand.span);
      return make_expr(UnaryExpr{UnaryOp::Neg, std::move(operand)}, span);
    }
    if (looks_like_cast()) {
      take();
      std::string name = take().text;
      take();
      Expr operand = unary();
      SourceSpan span = join(start, operand.span);
      return make_expr(CastExpr{std::move(name), std::move(operand)}, span);
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (accept(TokenKind::Dot)) {
      Token name = expect(TokenKind::Ident);
      if (at(TokenKind::LParen)) {
        MethodCall call;
        call.method = name.text;
        call.args = args();
        SourceSpan span = join(e.span, last_span_);
        call.receiver = ExprBox(std::move(e));
        e = make_expr(std::move(call), span);
      } else {
        SourceSpan span = join(e.span, name.span);
        e = make_expr(FieldAccess{std::move(e), name.text}, span);
      }
    }
    return e;
  }

  Expr primary() {
    const Token& t = cur();
    const SourceSpan start = t.span;
    switch (t.kind) {
      case TokenKind::IntLit: {
        auto v = take().int_value;
        return make_expr(IntLit{v}, start);
      }
      case TokenKind::StrLit: return make_expr(StrLit{take().text}, start);
      case TokenKind::KwTrue: take(); return make_expr(BoolLit{true}, start);
      case TokenKind::KwFalse: take(); return make_expr(BoolLit{false}, start);
      case TokenKind::KwNull: take(); return make_expr(NullLit{}, start);
      case TokenKind::KwThis: take(); return make_expr(ThisExpr{}, start);
      case TokenKind::KwNew: {
        take();
        NewExpr n;
        n.class_name = expect(TokenKind::Ident).text;
        n.args = args();
        return make_expr(std::move(n), join(start, last_span_));
      }
      case TokenKind::Ident: {
        std::string name = take().text;
        if (at(TokenKind::LParen)) {
          MethodCall call;
          call.method = std::move(name);
          call.args = args();
          return make_expr(std::move(call), join(start, last_span_));
        }
        NameExpr n;
        n.name = std::move(name);
        return make_expr(std::move(n), start);
      }
      case TokenKind::LParen: {
        take();
        Expr inner = expr();
        expect(TokenKind::RParen);
        inner.span = join(start, last_span_);
        return inner;
      }
      default:
        fail({TokenKind::Ident, TokenKind::IntLit, TokenKind::StrLit, TokenKind::KwNull,
              TokenKind::KwThis, TokenKind::KwNew, TokenKind::LParen});
    }
  }
};

}  // namespace

Expr make_expr(Expr::Node node, SourceSpan span) {
  Expr e;
  e.node = std::move(node);
  e.span = span;
  return e;
}

Stmt make_stmt(Stmt::Node node, SourceSpan span) {
  Stmt s;
  s.node = std::move(node);
  s.span = span;
  return s;
}

Program parse(std::string_view source, const std::string& file) {
  return Parser(tokenize(source, file), file).program();
}

Stmt parse_statement(std::string_view source, const std::string& file) {
  return Parser(tokenize(source, file), file).single_statement();
}

}  // namespace mj
