#include "mj/printer.hpp"

#include <sstream>

namespace mj {
namespace {

constexpr int kPrecPostfix = 10;
constexpr int kPrecUnary = 8;

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
  }
  return 0;
}

const char* binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

int expr_prec(const Expr& e) {
  if (auto* b = std::get_if<BinaryExpr>(&e.node)) return binary_prec(b->op);
  if (e.is<UnaryExpr>() || e.is<CastExpr>()) return kPrecUnary;
  return kPrecPostfix;
}

void print_expr_into(std::string& out, const Expr& e);

void print_child(std::string& out, const Expr& e, int min_prec) {
  if (expr_prec(e) < min_prec) {
    out += '(';
    print_expr_into(out, e);
    out += ')';
  } else {
    print_expr_into(out, e);
  }
}

void print_args(std::string& out, const std::vector<Expr>& args) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_expr_into(out, args[i]);
  }
  out += ')';
}

void print_expr_into(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, StrLit>) {
          out += quote(n.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, ThisExpr>) {
          out += "this";
        } else if constexpr (std::is_same_v<T, NameExpr>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          print_child(out, *n.object, kPrecPostfix);
          out += '.';
          out += n.field;
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver) {
            print_child(out, **n.receiver, kPrecPostfix);
            out += '.';
          }
          out += n.method;
          print_args(out, n.args);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          out += "new ";
          out += n.class_name;
          print_args(out, n.args);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          const int p = binary_prec(n.op);
          print_child(out, *n.lhs, p);
          out += ' ';
          out += binary_symbol(n.op);
          out += ' ';
          print_child(out, *n.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          out += n.op == UnaryOp::Not ? "!" : "-";
          // "- -x" must not print as "--x"; MJ has no decrement but keep it readable.
          if (n.op == UnaryOp::Neg && n.operand->template is<UnaryExpr>()) {
            out += '(';
            print_expr_into(out, *n.operand);
            out += ')';
          } else {
            print_child(out, *n.operand, kPrecUnary);
          }
        } else if constexpr (std::is_same_v<T, CastExpr>) {
          out += '(';
          out += n.class_name;
          out += ") ";
          print_child(out, *n.operand, kPrecPostfix);
        } else if constexpr (std::is_same_v<T, CheckForNullExpr>) {
          out += "checkForNull(";
          print_expr_into(out, *n.inner);
          out += ", " + n.expected.to_string() + ", " + std::to_string(n.site_id) + ")";
        } else if constexpr (std::is_same_v<T, PoolVarExpr>) {
          out += n.event == PoolEvent::InitVar ? "initVar(" : "modifyVar(";
          print_expr_into(out, *n.inner);
          out += ", " + quote(n.name) + ")";
        }
      },
      e.node);
}

class StmtPrinter {
 public:
  explicit StmtPrinter(std::string_view base) : base_(base) {}

  std::string run(const Stmt& s, int depth) {
    stmt(s, depth);
    return std::move(out_);
  }

  std::string run_block_body(const Block& b, int depth) {
    for (std::size_t i = 0; i < b.stmts.size(); ++i) {
      line_start(depth);
      stmt(b.stmts[i], depth);
      out_ += '\n';
    }
    return std::move(out_);
  }

 private:
  std::string_view base_;
  std::string out_;

  void line_start(int depth) {
    out_ += base_;
    out_.append(static_cast<std::size_t>(depth * kIndentWidth), ' ');
  }

  // Prints "{\n ... \n<indent>}" with the opening brace on the current line.
  void block(const Block& b, int depth) {
    out_ += "{\n";
    for (const Stmt& s : b.stmts) {
      line_start(depth + 1);
      stmt(s, depth + 1);
      out_ += '\n';
    }
    line_start(depth);
    out_ += '}';
  }

  void stmt(const Stmt& s, int depth) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Block>) {
            block(n, depth);
          } else if constexpr (std::is_same_v<T, VarDecl>) {
            out_ += n.type.to_string() + " " + n.name;
            if (n.init) {
              out_ += " = ";
              print_expr_into(out_, *n.init);
            }
            out_ += ';';
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            print_expr_into(out_, n.target);
            out_ += " = ";
            print_expr_into(out_, n.value);
            out_ += ';';
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            print_expr_into(out_, n.expr);
            out_ += ';';
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            out_ += "if (";
            print_expr_into(out_, n.cond);
            out_ += ") ";
            block(n.then_block, depth);
            if (n.else_block) {
              out_ += " else ";
              block(*n.else_block, depth);
            }
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            out_ += "while (";
            print_expr_into(out_, n.cond);
            out_ += ") ";
            block(n.body, depth);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            out_ += "return";
            if (n.value) {
              out_ += ' ';
              print_expr_into(out_, *n.value);
            }
            out_ += ';';
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            out_ += "try ";
            block(n.body, depth);
            out_ += n.kind == CatchKind::NPE ? " catch (NPE " : " catch (Any ";
            out_ += n.var + ") ";
            block(n.handler, depth);
          } else if constexpr (std::is_same_v<T, AssertStmt>) {
            out_ += "assert(";
            print_expr_into(out_, n.cond);
            out_ += ");";
          } else if constexpr (std::is_same_v<T, SuperCallStmt>) {
            out_ += "super";
            print_args(out_, n.args);
            out_ += ';';
          } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
            out_ += "if (skipLine(siteIds=[";
            for (std::size_t i = 0; i < n.sites.size(); ++i) {
              if (i) out_ += ", ";
              out_ += std::to_string(n.sites[i].site_id);
            }
            out_ += ']';
            for (const GuardSite& g : n.sites) {
              if (!g.receiver) continue;
              out_ += ", ";
              print_expr_into(out_, *g.receiver);
            }
            out_ += ")) {\n";
            line_start(depth + 1);
            stmt(*n.inner, depth + 1);
            out_ += '\n';
            line_start(depth);
            out_ += '}';
          } else if constexpr (std::is_same_v<T, PoolCollectStmt>) {
            if (n.seeds.empty()) {
              out_ += "collectFrame();";
              return;
            }
            for (std::size_t i = 0; i < n.seeds.size(); ++i) {
              if (i) {
                out_ += '\n';
                line_start(depth);
              }
              const PoolSeed& seed = n.seeds[i];
              const char* fn = seed.ref.kind == VarKind::Param   ? "collectParam"
                               : seed.ref.kind == VarKind::Field ? "collectField"
                                                                 : "collectStatic";
              out_ += std::string(fn) + "(" + seed.ref.name + ", " + quote(seed.ref.name) + ");";
            }
          } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
            out_ += "try ";
            block(n.body, depth);
            out_ += " catch (ForceReturn f) {\n";
            line_start(depth + 1);
            out_ += "return f.value();\n";
            line_start(depth);
            out_ += '}';
          }
        },
        s.node);
  }
};

std::string params_text(const std::vector<Param>& ps) {
  std::string out = "(";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += ps[i].type.to_string() + " " + ps[i].name;
  }
  return out + ")";
}

std::string indent_of(int levels) {
  return std::string(static_cast<std::size_t>(levels * kIndentWidth), ' ');
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::string out;
  print_expr_into(out, expr);
  return out;
}

std::string print_stmt(const Stmt& stmt, std::string_view base_indent) {
  return StmtPrinter(base_indent).run(stmt, 0);
}

std::string print_class(const ClassDecl& cls, int indent) {
  const std::string pad = indent_of(indent);
  const std::string inner = indent_of(indent + 1);
  std::string out = pad + "class " + cls.name;
  if (cls.super_name) out += " extends " + *cls.super_name;
  out += " {\n";
  bool need_gap = false;
  for (const FieldDecl& f : cls.fields) {
    out += inner;
    if (f.is_static) out += "static ";
    out += f.type.to_string() + " " + f.name;
    if (f.init) out += " = " + print_expr(*f.init);
    out += ";\n";
    need_gap = true;
  }
  auto body = [&](const Block& b) {
    out += "{\n";
    out += StmtPrinter(inner).run_block_body(b, 1);
    out += inner + "}\n";
  };
  for (const CtorDecl& c : cls.ctors) {
    if (need_gap) out += '\n';
    out += inner + cls.name + params_text(c.params) + " ";
    body(c.body);
    need_gap = true;
  }
  for (const MethodDecl& m : cls.methods) {
    if (need_gap) out += '\n';
    out += inner;
    if (m.is_test) out += "test ";
    if (m.is_static) out += "static ";
    out += m.return_type.to_string() + " " + m.name + params_text(m.params) + " ";
    body(m.body);
    need_gap = true;
  }
  out += pad + "}\n";
  return out;
}

std::string print_program(const Program& program) {
  std::string out;
  for (std::size_t i = 0; i < program.classes.size(); ++i) {
    if (i) out += '\n';
    out += print_class(program.classes[i]);
  }
  return out;
}

}  // namespace mj
