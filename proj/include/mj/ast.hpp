#pragma once

// Abstract syntax of MJ programs.
//
// The tree is value-semantic: copying a Program deep-copies every node, so a
// rewrite is "copy, edit, re-typecheck". Fields under "annotations" are filled
// by the type checker and are meaningless on a freshly parsed tree.
//
// The metaprogram transformation adds intrinsic nodes (CheckForNullExpr,
// PoolVarExpr, SkipGuardStmt, PoolCollectStmt, ForceReturnScope). They never
// come out of the parser.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mj/source.hpp"
#include "mj/types.hpp"

namespace mj {

/// Owning pointer with deep-copy semantics.
template <class T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }
  explicit operator bool() const { return static_cast<bool>(ptr_); }

 private:
  std::unique_ptr<T> ptr_;
};

// ---------------------------------------------------------------------------
// Variable references

enum class VarKind : std::uint8_t { Local, Param, Field, Static };

/// Resolved declaration of a variable. `index` is the frame slot for locals
/// and parameters, the object layout slot for instance fields, and the global
/// static slot for static fields. `owner` is the declaring class index for
/// fields and statics, and the enclosing class for locals and parameters.
struct VarRef {
  VarKind kind = VarKind::Local;
  std::string name;
  int owner = -1;
  int index = -1;

  friend bool operator==(const VarRef& a, const VarRef& b) {
    return a.kind == b.kind && a.owner == b.owner && a.index == b.index && a.name == b.name;
  }
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
struct Stmt;
using ExprBox = Box<Expr>;

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp : std::uint8_t { Not, Neg };

struct IntLit {
  std::int64_t value = 0;
};
struct BoolLit {
  bool value = false;
};
struct StrLit {
  std::string value;
};
struct NullLit {};
struct ThisExpr {};

struct NameExpr {
  std::string name;
  // annotations
  bool is_class_ref = false;  // the name denotes a class used as a qualifier
  int class_index = -1;
  VarRef ref;
};

struct FieldAccess {
  ExprBox object;
  std::string field;
  // annotations
  bool is_static = false;
  int owner = -1;  // declaring class
  int slot = -1;   // layout slot or static slot
  int site_id = -1;
};

enum class CallKind : std::uint8_t { Virtual, Static, ImplicitThis };

struct MethodCall {
  std::optional<ExprBox> receiver;
  std::string method;
  std::vector<Expr> args;
  // annotations
  CallKind kind = CallKind::Virtual;
  int target_class = -1;
  int target_method = -1;
  int site_id = -1;
};

struct NewExpr {
  std::string class_name;
  std::vector<Expr> args;
  // annotations
  int class_index = -1;
  int ctor_index = -1;  // -1 selects the implicit zero-argument constructor
};

struct BinaryExpr {
  BinaryOp op = BinaryOp::Add;
  ExprBox lhs;
  ExprBox rhs;
};

struct UnaryExpr {
  UnaryOp op = UnaryOp::Not;
  ExprBox operand;
};

struct CastExpr {
  std::string class_name;
  ExprBox operand;
  // annotations
  int class_index = -1;
};

/// Intrinsic: `checkForNull(inner, expected, site)`. Wraps the receiver of a
/// dereference in a metaprogram.
struct CheckForNullExpr {
  ExprBox inner;
  int site_id = -1;
  StaticType expected;
};

enum class PoolEvent : std::uint8_t { InitVar, ModifyVar };

/// Intrinsic: `initVar(inner, "name")` / `modifyVar(inner, "name")`.
struct PoolVarExpr {
  PoolEvent event = PoolEvent::InitVar;
  std::string name;
  ExprBox inner;
  // annotations
  VarRef ref;
  StaticType declared;
};

struct Expr {
  using Node = std::variant<IntLit, BoolLit, StrLit, NullLit, ThisExpr, NameExpr, FieldAccess,
                            MethodCall, NewExpr, BinaryExpr, UnaryExpr, CastExpr,
                            CheckForNullExpr, PoolVarExpr>;

  Node node;
  SourceSpan span;
  // annotation
  StaticType type;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(node);
  }
  template <class T>
  T& as() {
    return std::get<T>(node);
  }
};

// ---------------------------------------------------------------------------
// Statements

struct Block {
  std::vector<Stmt> stmts;
};

struct VarDecl {
  StaticType type;
  std::string name;
  std::optional<Expr> init;
  // annotation
  int slot = -1;
};

struct AssignStmt {
  Expr target;
  Expr value;
};

struct ExprStmt {
  Expr expr;
};

struct IfStmt {
  Expr cond;
  Block then_block;
  std::optional<Block> else_block;
};

struct WhileStmt {
  Expr cond;
  Block body;
};

struct ReturnStmt {
  std::optional<Expr> value;
};

enum class CatchKind : std::uint8_t { NPE, Any };

struct TryStmt {
  Block body;
  CatchKind kind = CatchKind::NPE;
  std::string var;
  Block handler;
  // annotation
  int var_slot = -1;
};

struct AssertStmt {
  Expr cond;
};

struct SuperCallStmt {
  std::vector<Expr> args;
  // annotation
  int ctor_index = -1;
};

/// One receiver observed by a skipLine guard. `receiver` holds a copy of the
/// receiver expression when it can be evaluated ahead of the statement
/// without side effects (a variable reference); compound receivers are
/// observed at their dereference instead.
struct GuardSite {
  int site_id = -1;
  std::optional<Expr> receiver;
};

/// Intrinsic: `if (skipLine(sites...)) { inner }`.
struct SkipGuardStmt {
  std::vector<GuardSite> sites;
  Box<Stmt> inner;
};

struct PoolSeed {
  VarRef ref;
  StaticType type;
};

/// Intrinsic: method-entry `collectParam(...)` / `collectField(...)` events.
struct PoolCollectStmt {
  std::vector<PoolSeed> seeds;
};

/// Intrinsic: `try { body } catch (ForceReturn f) { ... }` around a method body.
struct ForceReturnScope {
  Block body;
};

struct Stmt {
  using Node = std::variant<Block, VarDecl, AssignStmt, ExprStmt, IfStmt, WhileStmt, ReturnStmt,
                            TryStmt, AssertStmt, SuperCallStmt, SkipGuardStmt, PoolCollectStmt,
                            ForceReturnScope>;

  Node node;
  SourceSpan span;
  // annotation: dense pre-order statement number
  int stmt_id = -1;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(node);
  }
  template <class T>
  T& as() {
    return std::get<T>(node);
  }
};

// ---------------------------------------------------------------------------
// Declarations

struct Param {
  StaticType type;
  std::string name;
  SourceSpan span;
};

struct FieldDecl {
  bool is_static = false;
  StaticType type;
  std::string name;
  std::optional<Expr> init;
  SourceSpan span;
  // annotation: layout slot (instance) or global static slot
  int slot = -1;
};

struct CtorDecl {
  std::vector<Param> params;
  Block body;
  SourceSpan span;
  // annotations
  int num_slots = 0;
  bool explicit_super = false;
};

struct MethodDecl {
  bool is_test = false;
  bool is_static = false;
  StaticType return_type;
  std::string name;
  std::vector<Param> params;
  Block body;
  SourceSpan span;
  // annotation
  int num_slots = 0;

  /// Test methods run without a receiver.
  bool static_context() const { return is_static || is_test; }
};

struct ClassDecl {
  std::string name;
  std::optional<std::string> super_name;
  std::vector<FieldDecl> fields;
  std::vector<CtorDecl> ctors;
  std::vector<MethodDecl> methods;
  SourceSpan span;
};

struct Program {
  std::string file;
  std::vector<ClassDecl> classes;
};

/// Canonical S-expression rendering of a tree, excluding spans and type
/// annotations. Two trees are structurally equal iff their dumps are equal.
std::string dump_structure(const Program& program);
std::string dump_structure(const Stmt& stmt);
std::string dump_structure(const Expr& expr);

inline bool structurally_equal(const Program& a, const Program& b) {
  return dump_structure(a) == dump_structure(b);
}

Expr make_expr(Expr::Node node, SourceSpan span = {});
Stmt make_stmt(Stmt::Node node, SourceSpan span = {});

}  // namespace mj
