#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mj/ast.hpp"

namespace mj {

// ---------------------------------------------------------------------------
// Class table

struct FieldInfo {
  std::string name;
  StaticType type;
  bool is_static = false;
  int owner = -1;       // declaring class
  int decl_index = -1;  // index into ClassDecl::fields
  int slot = -1;        // layout slot (instance) or global static slot
};

struct MethodInfo {
  std::string name;
  int owner = -1;
  int decl_index = -1;  // index into ClassDecl::methods
  bool is_static = false;
  bool is_test = false;
  StaticType return_type;
  std::vector<StaticType> params;
  int vtable_slot = -1;  // -1 for static and test methods
};

struct CtorInfo {
  int owner = -1;
  int decl_index = -1;  // -1 for the implicit zero-argument constructor
  std::vector<StaticType> params;
};

/// Reference to a method declaration: (class, index into its methods).
struct MethodRef {
  int cls = -1;
  int method = -1;
  friend bool operator==(const MethodRef&, const MethodRef&) = default;
};

struct ClassInfo {
  std::string name;
  int index = -1;
  int super = -1;  // -1 only for Object
  int decl = -1;   // index into Program::classes, -1 for Object
  int depth = 0;   // number of proper superclasses

  std::vector<FieldInfo> own_fields;   // declaration order, static and instance
  std::vector<FieldInfo> layout;       // all instance fields, inherited first
  std::vector<MethodInfo> methods;     // own methods in declaration order
  std::vector<CtorInfo> ctors;         // own constructors; one implicit entry if none declared
  std::vector<MethodRef> vtable;       // slot -> implementation
  std::unordered_map<std::string, MethodRef> method_lookup;  // own and inherited

  /// Constructor with the given arity, or -1.
  int ctor_with_arity(std::size_t n) const;
};

struct ProgramInfo {
  std::vector<ClassInfo> classes;  // user classes by declaration index, then Object
  std::vector<FieldInfo> statics;  // by global static slot

  int object_class() const { return static_cast<int>(classes.size()) - 1; }
  int find_class(std::string_view name) const;
  bool is_subclass(int sub, int super) const;
  /// Subtyping over static types: identical types, class subclassing, and
  /// the null type below every class type.
  bool is_subtype(const StaticType& sub, const StaticType& super) const;
  const MethodInfo& method(MethodRef ref) const { return classes[ref.cls].methods[ref.method]; }
  /// Instance field by name along the superclass chain, or nullptr.
  const FieldInfo* find_instance_field(int cls, std::string_view name) const;
  /// Static field by name along the superclass chain, or nullptr.
  const FieldInfo* find_static_field(int cls, std::string_view name) const;
  const MethodRef* find_method(int cls, std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Dereference sites

enum class SiteKind : std::uint8_t { MethodCallReceiver, FieldRead, FieldWrite };
enum class StmtKind : std::uint8_t { ExprStmt, Assign, VarDecl, Return, Condition };
enum class MemberKind : std::uint8_t { Method, Ctor };

/// Method or constructor body containing a site.
struct MemberKey {
  int cls = -1;
  MemberKind kind = MemberKind::Method;
  int index = -1;
  friend bool operator==(const MemberKey&, const MemberKey&) = default;
};

struct Binding {
  VarRef ref;
  StaticType type;
};

struct DerefSite {
  int id = -1;
  SourceSpan span;            // the dereference expression
  Expr receiver;              // typed copy of the receiver expression
  StaticType receiver_type;
  SiteKind kind = SiteKind::FieldRead;
  std::string member;         // field or method name
  MemberKey enclosing;
  StaticType return_type;     // of the enclosing method; void for constructors
  bool static_context = false;
  StmtKind stmt_kind = StmtKind::ExprStmt;
  int stmt_id = -1;
  SourceSpan stmt_span;
  std::optional<VarRef> receiver_var;  // receiver is a plain variable name
  bool assignable = false;             // receiver is a local or parameter
  bool pure = false;                   // receiver reads a variable without side effects
  /// Locals innermost scope first (declaration order within a scope), then
  /// parameters in order.
  std::vector<Binding> locals_in_scope;
};

// ---------------------------------------------------------------------------
// Checking

/// A type-checked program. Owns its syntax tree; annotations in the tree
/// index into `info`.
struct TypedProgram {
  Program program;
  ProgramInfo info;
  std::vector<DerefSite> sites;  // by site id
  int num_stmts = 0;

  TypedProgram() = default;
  TypedProgram(const TypedProgram&) = delete;
  TypedProgram& operator=(const TypedProgram&) = delete;

  const ClassDecl& class_decl(int cls) const { return program.classes[info.classes[cls].decl]; }
  const MethodDecl& method_decl(MethodRef ref) const {
    return program.classes[ref.cls].methods[ref.method];
  }
  /// Test method by `name` or `Class.name`; nullopt if absent or ambiguous.
  std::optional<MethodRef> find_test(std::string_view name) const;
  std::vector<MethodRef> tests() const;
};

using TypedProgramPtr = std::shared_ptr<const TypedProgram>;

struct CheckResult {
  TypedProgramPtr program;  // null when diagnostics contain errors
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program != nullptr; }
};

CheckResult typecheck(Program program);

class CompileError : public std::runtime_error {
 public:
  explicit CompileError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

/// Parses and checks; throws SyntaxError or CompileError.
TypedProgramPtr compile(std::string_view source, const std::string& file = "<input>");

/// Finds statement `stmt_id` in a checked tree.
const Stmt* find_stmt(const Program& program, int stmt_id);
Stmt* find_stmt(Program& program, int stmt_id);

}  // namespace mj
