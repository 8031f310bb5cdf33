#include "mj/typecheck.hpp"

#include <algorithm>
#include <numeric>

#include "mj/parser.hpp"

namespace mj {

int ClassInfo::ctor_with_arity(std::size_t n) const {
  for (std::size_t i = 0; i < ctors.size(); ++i)
    if (ctors[i].params.size() == n) return static_cast<int>(i);
  return -1;
}

int ProgramInfo::find_class(std::string_view name) const {
  for (const ClassInfo& c : classes)
    if (c.name == name) return c.index;
  return -1;
}

bool ProgramInfo::is_subclass(int sub, int super) const {
  for (int c = sub; c >= 0; c = classes[c].super)
    if (c == super) return true;
  return false;
}

bool ProgramInfo::is_subtype(const StaticType& sub, const StaticType& super) const {
  if (sub == super) return true;
  if (!super.is_class()) return false;
  if (sub.kind == StaticType::Kind::Null) return true;
  if (!sub.is_class()) return false;
  const int a = find_class(sub.class_name);
  const int b = find_class(super.class_name);
  return a >= 0 && b >= 0 && is_subclass(a, b);
}

const FieldInfo* ProgramInfo::find_instance_field(int cls, std::string_view name) const {
  for (const FieldInfo& f : classes[cls].layout)
    if (f.name == name) return &f;
  return nullptr;
}

const FieldInfo* ProgramInfo::find_static_field(int cls, std::string_view name) const {
  for (int c = cls; c >= 0; c = classes[c].super)
    for (const FieldInfo& f : classes[c].own_fields)
      if (f.is_static && f.name == name) return &f;
  return nullptr;
}

const MethodRef* ProgramInfo::find_method(int cls, std::string_view name) const {
  auto it = classes[cls].method_lookup.find(std::string(name));
  return it == classes[cls].method_lookup.end() ? nullptr : &it->second;
}

std::optional<MethodRef> TypedProgram::find_test(std::string_view name) const {
  std::optional<MethodRef> found;
  int matches = 0;
  for (const MethodRef& t : tests()) {
    const std::string& m = method_decl(t).name;
    const std::string qualified = program.classes[t.cls].name + "." + m;
    if (name == m || name == qualified) {
      found = t;
      ++matches;
    }
  }
  if (matches != 1) return std::nullopt;
  return found;
}

std::vector<MethodRef> TypedProgram::tests() const {
  std::vector<MethodRef> out;
  for (std::size_t c = 0; c < program.classes.size(); ++c)
    for (std::size_t m = 0; m < program.classes[c].methods.size(); ++m)
      if (program.classes[c].methods[m].is_test)
        out.push_back(MethodRef{static_cast<int>(c), static_cast<int>(m)});
  return out;
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const Diagnostic& d : diags) {
    if (!out.empty()) out += '\n';
    out += format_diagnostic(d);
  }
  return out;
}

}  // namespace

CompileError::CompileError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

namespace {

class Checker {
 public:
  Checker(TypedProgram& out) : tp_(out), prog_(out.program), info_(out.info) {}

  std::vector<Diagnostic> run() {
    if (!build_classes()) return std::move(diags_);
    build_members();
    if (!diags_.empty()) return std::move(diags_);
    check_bodies();
    tp_.num_stmts = next_stmt_;
    return std::move(diags_);
  }

 private:
  TypedProgram& tp_;
  Program& prog_;
  ProgramInfo& info_;
  std::vector<Diagnostic> diags_;
  int next_site_ = 0;
  int next_stmt_ = 0;

  // body context
  int cls_ = -1;
  MemberKey member_;
  bool static_ctx_ = false;
  bool in_body_ = false;
  bool deref_banned_ = false;
  const char* deref_ban_reason_ = "";
  StaticType ret_type_;
  std::vector<std::vector<Binding>> scopes_;  // scopes_[0] holds parameters
  int next_slot_ = 0;
  bool in_ctor_ = false;
  const Stmt* first_ctor_stmt_ = nullptr;

  StmtKind stmt_kind_ = StmtKind::ExprStmt;
  int stmt_id_ = -1;
  SourceSpan stmt_span_;

  void error(const SourceSpan& at, std::string msg) {
    diags_.push_back(Diagnostic{prog_.file, at.line, at.column, Severity::Error, std::move(msg)});
  }

  // -------------------------------------------------------------------------
  // class table

  bool build_classes() {
    const int n = static_cast<int>(prog_.classes.size());
    info_.classes.resize(n + 1);
    for (int i = 0; i < n; ++i) {
      const ClassDecl& d = prog_.classes[i];
      ClassInfo& c = info_.classes[i];
      c.name = d.name;
      c.index = i;
      c.decl = i;
      if (d.name == "Object") error(d.span, "class name 'Object' is reserved");
      for (int j = 0; j < i; ++j)
        if (prog_.classes[j].name == d.name) error(d.span, "duplicate class '" + d.name + "'");
    }
    ClassInfo& obj = info_.classes[n];
    obj.name = "Object";
    obj.index = n;
    obj.ctors.push_back(CtorInfo{n, -1, {}});
    if (!diags_.empty()) return false;

    for (int i = 0; i < n; ++i) {
      const ClassDecl& d = prog_.classes[i];
      if (!d.super_name) {
        info_.classes[i].super = n;
        continue;
      }
      const int s = info_.find_class(*d.super_name);
      if (s < 0) {
        error(d.span, "unknown superclass '" + *d.super_name + "'");
      } else {
        info_.classes[i].super = s;
      }
    }
    if (!diags_.empty()) return false;

    for (int i = 0; i < n; ++i) {
      int depth = 0;
      for (int c = info_.classes[i].super; c >= 0; c = info_.classes[c].super) {
        if (c == i || depth > n) {
          error(prog_.classes[i].span, "cyclic inheritance involving '" + prog_.classes[i].name + "'");
          return false;
        }
        ++depth;
      }
      info_.classes[i].depth = depth;
    }
    return true;
  }

  bool valid_type(const StaticType& t, const SourceSpan& at, bool allow_void) {
    if (t.is_void()) {
      if (!allow_void) error(at, "'void' is not a value type");
      return allow_void;
    }
    if (t.is_class() && info_.find_class(t.class_name) < 0) {
      error(at, "unknown type '" + t.class_name + "'");
      return false;
    }
    return true;
  }

  std::vector<int> by_depth() const {
    std::vector<int> order(prog_.classes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return info_.classes[a].depth < info_.classes[b].depth;
    });
    return order;
  }

  void build_members() {
    const int n = static_cast<int>(prog_.classes.size());
    // statics take global slots in declaration order
    for (int i = 0; i < n; ++i) {
      ClassDecl& d = prog_.classes[i];
      for (std::size_t f = 0; f < d.fields.size(); ++f) {
        FieldDecl& fd = d.fields[f];
        valid_type(fd.type, fd.span, false);
        for (std::size_t g = 0; g < f; ++g)
          if (d.fields[g].name == fd.name) error(fd.span, "duplicate field '" + fd.name + "'");
        FieldInfo fi{fd.name, fd.type, fd.is_static, i, static_cast<int>(f), -1};
        if (fd.is_static) {
          fi.slot = static_cast<int>(info_.statics.size());
          info_.statics.push_back(fi);
        }
        fd.slot = fi.slot;
        info_.classes[i].own_fields.push_back(fi);
      }
    }

    for (int i : by_depth()) {
      ClassDecl& d = prog_.classes[i];
      ClassInfo& c = info_.classes[i];
      const ClassInfo& sup = info_.classes[c.super];
      c.layout = sup.layout;
      c.vtable = sup.vtable;
      c.method_lookup = sup.method_lookup;

      for (FieldInfo& fi : c.own_fields) {
        FieldDecl& fd = d.fields[fi.decl_index];
        if (info_.find_instance_field(c.super, fi.name) || info_.find_static_field(c.super, fi.name))
          error(fd.span, "field '" + fi.name + "' hides an inherited field");
        if (fi.is_static) continue;
        fi.slot = static_cast<int>(c.layout.size());
        fd.slot = fi.slot;
        c.layout.push_back(fi);
      }

      for (std::size_t m = 0; m < d.methods.size(); ++m) {
        MethodDecl& md = d.methods[m];
        MethodInfo mi;
        mi.name = md.name;
        mi.owner = i;
        mi.decl_index = static_cast<int>(m);
        mi.is_static = md.static_context();
        mi.is_test = md.is_test;
        mi.return_type = md.return_type;
        valid_type(md.return_type, md.span, true);
        for (const Param& p : md.params) {
          valid_type(p.type, p.span, false);
          mi.params.push_back(p.type);
        }
        for (std::size_t k = 0; k < m; ++k)
          if (d.methods[k].name == md.name) error(md.span, "duplicate method '" + md.name + "'");
        if (md.is_test) {
          if (!md.params.empty()) error(md.span, "test method '" + md.name + "' takes no parameters");
          if (!md.return_type.is_void()) error(md.span, "test method '" + md.name + "' must return void");
        }
        for (std::size_t p = 0; p < md.params.size(); ++p)
          for (std::size_t q = 0; q < p; ++q)
            if (md.params[p].name == md.params[q].name)
              error(md.params[p].span, "duplicate parameter '" + md.params[p].name + "'");

        auto inherited = sup.method_lookup.find(md.name);
        if (inherited != sup.method_lookup.end()) {
          const MethodInfo& base = info_.method(inherited->second);
          if (base.is_static || mi.is_static) {
            error(md.span, "method '" + md.name + "' conflicts with an inherited static method");
          } else if (base.params != mi.params || base.return_type != mi.return_type) {
            error(md.span, "method '" + md.name + "' overrides with a different signature");
          } else {
            mi.vtable_slot = base.vtable_slot;
          }
        } else if (!mi.is_static) {
          mi.vtable_slot = static_cast<int>(c.vtable.size());
          c.vtable.emplace_back();
        }
        const MethodRef ref{i, static_cast<int>(m)};
        if (mi.vtable_slot >= 0) c.vtable[mi.vtable_slot] = ref;
        c.method_lookup[md.name] = ref;
        c.methods.push_back(std::move(mi));
      }

      for (std::size_t k = 0; k < d.ctors.size(); ++k) {
        CtorDecl& cd = d.ctors[k];
        CtorInfo ci{i, static_cast<int>(k), {}};
        for (const Param& p : cd.params) {
          valid_type(p.type, p.span, false);
          ci.params.push_back(p.type);
        }
        for (std::size_t j = 0; j < k; ++j)
          if (d.ctors[j].params.size() == cd.params.size())
            error(cd.span, "constructors of '" + d.name + "' must differ in arity");
        for (std::size_t p = 0; p < cd.params.size(); ++p)
          for (std::size_t q = 0; q < p; ++q)
            if (cd.params[p].name == cd.params[q].name)
              error(cd.params[p].span, "duplicate parameter '" + cd.params[p].name + "'");
        c.ctors.push_back(std::move(ci));
      }
      if (d.ctors.empty()) c.ctors.push_back(CtorInfo{i, -1, {}});
    }
  }

  // -------------------------------------------------------------------------
  // bodies

  void check_bodies() {
    for (int i = 0; i < static_cast<int>(prog_.classes.size()); ++i) {
      ClassDecl& d = prog_.classes[i];
      cls_ = i;
      for (FieldDecl& f : d.fields) {
        if (!f.init) continue;
        begin_body(f.is_static, StaticType::void_type());
        in_body_ = false;
        deref_banned_ = true;
        deref_ban_reason_ = "field initializers";
        const StaticType t = check_expr(*f.init);
        require_assignable(t, f.type, f.init->span, "field initializer");
        deref_banned_ = false;
      }
      for (std::size_t k = 0; k < d.ctors.size(); ++k) {
        CtorDecl& cd = d.ctors[k];
        begin_body(false, StaticType::void_type());
        member_ = MemberKey{i, MemberKind::Ctor, static_cast<int>(k)};
        bind_params(cd.params);
        in_ctor_ = true;
        first_ctor_stmt_ = first_effective(cd.body);
        cd.explicit_super = first_ctor_stmt_ && first_ctor_stmt_->is<SuperCallStmt>();
        if (!cd.explicit_super) {
          const ClassInfo& sup = info_.classes[info_.classes[i].super];
          if (sup.ctor_with_arity(0) < 0)
            error(cd.span, "superclass '" + sup.name + "' has no zero-argument constructor");
        }
        check_block(cd.body);
        cd.num_slots = next_slot_;
        in_ctor_ = false;
        first_ctor_stmt_ = nullptr;
      }
      if (d.ctors.empty()) {
        const ClassInfo& sup = info_.classes[info_.classes[i].super];
        if (sup.ctor_with_arity(0) < 0)
          error(d.span, "class '" + d.name + "' needs a constructor: superclass '" + sup.name +
                            "' has no zero-argument constructor");
      }
      for (std::size_t m = 0; m < d.methods.size(); ++m) {
        MethodDecl& md = d.methods[m];
        begin_body(md.static_context(), md.return_type);
        member_ = MemberKey{i, MemberKind::Method, static_cast<int>(m)};
        bind_params(md.params);
        check_block(md.body);
        md.num_slots = next_slot_;
      }
    }
  }

  void begin_body(bool is_static, StaticType ret) {
    static_ctx_ = is_static;
    ret_type_ = std::move(ret);
    scopes_.assign(1, {});
    next_slot_ = 0;
    in_body_ = true;
    member_ = MemberKey{};
  }

  void bind_params(const std::vector<Param>& params) {
    for (const Param& p : params) {
      scopes_[0].push_back(Binding{VarRef{VarKind::Param, p.name, cls_, next_slot_}, p.type});
      ++next_slot_;
    }
  }

  static const Stmt* first_effective(const Block& b) {
    for (const Stmt& s : b.stmts) {
      if (s.is<PoolCollectStmt>()) continue;
      if (auto* f = std::get_if<ForceReturnScope>(&s.node)) return first_effective(f->body);
      return &s;
    }
    return nullptr;
  }

  const Binding* lookup_local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      for (const Binding& b : *it)
        if (b.ref.name == name) return &b;
    return nullptr;
  }

  void declare_local(const std::string& name, const StaticType& type, const SourceSpan& at, int& slot) {
    if (lookup_local(name)) error(at, "'" + name + "' is already defined in this scope");
    slot = next_slot_++;
    scopes_.back().push_back(Binding{VarRef{VarKind::Local, name, cls_, slot}, type});
  }

  std::vector<Binding> snapshot_scope() const {
    std::vector<Binding> out;
    for (std::size_t s = scopes_.size(); s-- > 1;)
      for (const Binding& b : scopes_[s]) out.push_back(b);
    for (const Binding& b : scopes_[0]) out.push_back(b);
    return out;
  }

  void require_assignable(const StaticType& from, const StaticType& to, const SourceSpan& at,
                          const char* what) {
    if (from.is_error() || to.is_error()) return;
    if (!info_.is_subtype(from, to))
      error(at, std::string("incompatible types in ") + what + ": " + from.to_string() +
                    " is not assignable to " + to.to_string());
  }

  // -------------------------------------------------------------------------
  // statements

  void check_block(Block& b) {
    scopes_.emplace_back();
    for (Stmt& s : b.stmts) check_stmt(s);
    scopes_.pop_back();
  }

  struct StmtCtx {
    Checker& c;
    StmtKind kind;
    int id;
    SourceSpan span;
    StmtCtx(Checker& ch, StmtKind k, const Stmt& s) : c(ch), kind(ch.stmt_kind_), id(ch.stmt_id_), span(ch.stmt_span_) {
      c.stmt_kind_ = k;
      c.stmt_id_ = s.stmt_id;
      c.stmt_span_ = s.span;
    }
    ~StmtCtx() {
      c.stmt_kind_ = kind;
      c.stmt_id_ = id;
      c.stmt_span_ = span;
    }
  };

  void check_condition(Expr& e) {
    const StaticType t = check_expr(e);
    if (!t.is_error() && t != StaticType::boolean())
      error(e.span, "condition must be bool, found " + t.to_string());
  }

  void check_stmt(Stmt& s) {
    s.stmt_id = next_stmt_++;
    if (s.is<SuperCallStmt>() && (!in_ctor_ || &s != first_ctor_stmt_))
      error(s.span, "super(...) must be the first statement of a constructor");

    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Block>) {
            check_block(n);
          } else if constexpr (std::is_same_v<T, VarDecl>) {
            StmtCtx ctx(*this, StmtKind::VarDecl, s);
            const bool type_ok = valid_type(n.type, s.span, false);
            if (n.init) {
              const StaticType t = check_expr(*n.init);
              if (type_ok) require_assignable(t, n.type, n.init->span, "initialization");
            }
            declare_local(n.name, n.type, s.span, n.slot);
            if (n.init) {
              if (auto* pv = std::get_if<PoolVarExpr>(&n.init->node)) {
                pv->ref = scopes_.back().back().ref;
                pv->declared = n.type;
              }
            }
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            StmtCtx ctx(*this, StmtKind::Assign, s);
            const StaticType target = check_target(n.target);
            const StaticType value = check_expr(n.value);
            require_assignable(value, target, n.value.span, "assignment");
            if (auto* pv = std::get_if<PoolVarExpr>(&n.value.node)) {
              if (auto* name = std::get_if<NameExpr>(&n.target.node)) pv->ref = name->ref;
              pv->declared = target;
            }
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            StmtCtx ctx(*this, StmtKind::ExprStmt, s);
            if (!n.expr.template is<MethodCall>() && !n.expr.template is<NewExpr>())
              error(s.span, "expression statement must be a method call or object creation");
            check_expr(n.expr);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            {
              StmtCtx ctx(*this, StmtKind::Condition, s);
              check_condition(n.cond);
            }
            check_block(n.then_block);
            if (n.else_block) check_block(*n.else_block);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            {
              StmtCtx ctx(*this, StmtKind::Condition, s);
              check_condition(n.cond);
            }
            check_block(n.body);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            StmtCtx ctx(*this, StmtKind::Return, s);
            if (n.value) {
              const StaticType t = check_expr(*n.value);
              if (ret_type_.is_void()) {
                error(s.span, "cannot return a value from a void method or constructor");
              } else {
                require_assignable(t, ret_type_, n.value->span, "return");
              }
            } else if (!ret_type_.is_void()) {
              error(s.span, "missing return value");
            }
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            check_block(n.body);
            scopes_.emplace_back();
            declare_local(n.var, StaticType::string(), s.span, n.var_slot);
            check_block(n.handler);
            scopes_.pop_back();
          } else if constexpr (std::is_same_v<T, AssertStmt>) {
            StmtCtx ctx(*this, StmtKind::Condition, s);
            check_condition(n.cond);
          } else if constexpr (std::is_same_v<T, SuperCallStmt>) {
            const bool saved = deref_banned_;
            const char* saved_reason = deref_ban_reason_;
            deref_banned_ = true;
            deref_ban_reason_ = "super(...) arguments";
            std::vector<StaticType> arg_types;
            for (Expr& a : n.args) arg_types.push_back(check_expr(a));
            deref_banned_ = saved;
            deref_ban_reason_ = saved_reason;
            const ClassInfo& sup = info_.classes[info_.classes[cls_].super];
            const int k = sup.ctor_with_arity(n.args.size());
            if (k < 0) {
              error(s.span, "superclass '" + sup.name + "' has no constructor taking " +
                                std::to_string(n.args.size()) + " argument(s)");
            } else {
              n.ctor_index = sup.ctors[k].decl_index;
              for (std::size_t i = 0; i < n.args.size(); ++i)
                require_assignable(arg_types[i], sup.ctors[k].params[i], n.args[i].span, "argument");
            }
          } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
            for (GuardSite& g : n.sites)
              if (g.receiver) check_expr(*g.receiver);
            check_stmt(*n.inner);
          } else if constexpr (std::is_same_v<T, PoolCollectStmt>) {
          } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
            check_block(n.body);
          }
        },
        s.node);
  }

  // -------------------------------------------------------------------------
  // expressions

  /// Resolves a bare name to a variable, filling `n.ref`. Returns its type or
  /// nullopt if the name is not a variable.
  std::optional<StaticType> resolve_var(NameExpr& n, const SourceSpan& at) {
    if (const Binding* b = lookup_local(n.name)) {
      n.ref = b->ref;
      return b->type;
    }
    if (cls_ < 0) return std::nullopt;
    if (const FieldInfo* f = info_.find_instance_field(cls_, n.name)) {
      if (static_ctx_) error(at, "instance field '" + n.name + "' used in a static context");
      n.ref = VarRef{VarKind::Field, n.name, f->owner, f->slot};
      return f->type;
    }
    if (const FieldInfo* f = info_.find_static_field(cls_, n.name)) {
      n.ref = VarRef{VarKind::Static, n.name, f->owner, f->slot};
      return f->type;
    }
    return std::nullopt;
  }

  /// A receiver that names a class (`A.s`, `A.m()`), or -1.
  int class_qualifier(Expr& e) {
    auto* n = std::get_if<NameExpr>(&e.node);
    if (!n) return -1;
    if (lookup_local(n->name)) return -1;
    if (cls_ >= 0 && (info_.find_instance_field(cls_, n->name) || info_.find_static_field(cls_, n->name)))
      return -1;
    const int c = info_.find_class(n->name);
    if (c < 0) return -1;
    n->is_class_ref = true;
    n->class_index = c;
    e.type = StaticType::of_class(n->name);
    return c;
  }

  static bool is_this(const Expr& e) { return e.is<ThisExpr>(); }

  static const Expr& unwrap(const Expr& e) {
    if (auto* c = std::get_if<CheckForNullExpr>(&e.node)) return unwrap(*c->inner);
    return e;
  }

  int record_site(const Expr& deref, const Expr& receiver, SiteKind kind, const std::string& member) {
    if (deref_banned_) {
      error(deref.span, std::string("dereferences are not allowed in ") + deref_ban_reason_);
      return -1;
    }
    DerefSite site;
    site.id = next_site_++;
    site.span = deref.span;
    const Expr& recv = unwrap(receiver);
    site.receiver = recv;
    site.receiver_type = recv.type;
    site.kind = kind;
    site.member = member;
    site.enclosing = member_;
    site.return_type = ret_type_;
    site.static_context = static_ctx_;
    site.stmt_kind = stmt_kind_;
    site.stmt_id = stmt_id_;
    site.stmt_span = stmt_span_;
    if (auto* n = std::get_if<NameExpr>(&recv.node)) {
      site.receiver_var = n->ref;
      site.assignable = n->ref.kind == VarKind::Local || n->ref.kind == VarKind::Param;
      site.pure = true;
    } else if (auto* f = std::get_if<FieldAccess>(&recv.node); f && f->is_static) {
      site.receiver_var = VarRef{VarKind::Static, f->field, f->owner, f->slot};
      site.pure = true;
    }
    site.locals_in_scope = snapshot_scope();
    tp_.sites.push_back(std::move(site));
    return tp_.sites.back().id;
  }

  /// Checks an instance receiver; returns its class index or -1 after
  /// reporting.
  int receiver_class(Expr& recv) {
    const StaticType t = check_expr(recv);
    if (t.is_error()) return -1;
    if (t.kind == StaticType::Kind::Null) {
      error(recv.span, "dereference of null");
      return -1;
    }
    if (!t.is_class()) {
      error(recv.span, "cannot dereference a value of type " + t.to_string());
      return -1;
    }
    return info_.find_class(t.class_name);
  }

  StaticType check_field_access(Expr& e, bool write) {
    auto& fa = e.as<FieldAccess>();
    if (const int q = class_qualifier(*fa.object); q >= 0) {
      const FieldInfo* f = info_.find_static_field(q, fa.field);
      if (!f) {
        error(e.span, "class '" + info_.classes[q].name + "' has no static field '" + fa.field + "'");
        return StaticType::error();
      }
      fa.is_static = true;
      fa.owner = f->owner;
      fa.slot = f->slot;
      return f->type;
    }
    const int c = receiver_class(*fa.object);
    if (c < 0) return StaticType::error();
    const FieldInfo* f = info_.find_instance_field(c, fa.field);
    if (!f) {
      if (info_.find_static_field(c, fa.field))
        error(e.span, "static field '" + fa.field + "' must be accessed through its class");
      else
        error(e.span, "class '" + info_.classes[c].name + "' has no field '" + fa.field + "'");
      return StaticType::error();
    }
    fa.owner = f->owner;
    fa.slot = f->slot;
    if (!is_this(unwrap(*fa.object)))
      fa.site_id = record_site(e, *fa.object, write ? SiteKind::FieldWrite : SiteKind::FieldRead, fa.field);
    return f->type;
  }

  StaticType check_target(Expr& target) {
    if (auto* n = std::get_if<NameExpr>(&target.node)) {
      auto t = resolve_var(*n, target.span);
      if (!t) {
        error(target.span, "cannot assign to '" + n->name + "'");
        return target.type = StaticType::error();
      }
      return target.type = *t;
    }
    if (target.is<FieldAccess>()) return target.type = check_field_access(target, true);
    error(target.span, "invalid assignment target");
    check_expr(target);
    return StaticType::error();
  }

  void check_args(std::vector<Expr>& args, const std::vector<StaticType>& params,
                  const SourceSpan& at, const std::string& what) {
    std::vector<StaticType> types;
    for (Expr& a : args) types.push_back(check_expr(a));
    if (args.size() != params.size()) {
      error(at, what + " expects " + std::to_string(params.size()) + " argument(s), got " +
                    std::to_string(args.size()));
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i)
      require_assignable(types[i], params[i], args[i].span, "argument");
  }

  StaticType check_call(Expr& e) {
    auto& call = e.as<MethodCall>();
    const MethodRef* ref = nullptr;
    if (!call.receiver) {
      ref = info_.find_method(cls_, call.method);
      if (!ref) {
        error(e.span, "unknown method '" + call.method + "'");
        for (Expr& a : call.args) check_expr(a);
        return StaticType::error();
      }
      const MethodInfo& mi = info_.method(*ref);
      if (mi.is_static) {
        call.kind = CallKind::Static;
      } else {
        if (static_ctx_) error(e.span, "instance method '" + call.method + "' called from a static context");
        call.kind = CallKind::ImplicitThis;
      }
    } else if (const int q = class_qualifier(**call.receiver); q >= 0) {
      ref = info_.find_method(q, call.method);
      if (!ref || !info_.method(*ref).is_static) {
        error(e.span, "class '" + info_.classes[q].name + "' has no static method '" + call.method + "'");
        for (Expr& a : call.args) check_expr(a);
        return StaticType::error();
      }
      call.kind = CallKind::Static;
    } else {
      const int c = receiver_class(**call.receiver);
      if (c >= 0) {
        ref = info_.find_method(c, call.method);
        if (!ref) {
          error(e.span, "class '" + info_.classes[c].name + "' has no method '" + call.method + "'");
        } else if (info_.method(*ref).is_static) {
          error(e.span, "static method '" + call.method + "' must be called through its class");
          ref = nullptr;
        }
      }
      call.kind = CallKind::Virtual;
      if (ref && !is_this(unwrap(**call.receiver)))
        call.site_id = record_site(e, **call.receiver, SiteKind::MethodCallReceiver, call.method);
      if (!ref) {
        for (Expr& a : call.args) check_expr(a);
        return StaticType::error();
      }
    }
    const MethodInfo& mi = info_.method(*ref);
    if (mi.is_test) error(e.span, "test method '" + call.method + "' cannot be called");
    call.target_class = ref->cls;
    call.target_method = ref->method;
    check_args(call.args, mi.params, e.span, "method '" + call.method + "'");
    return mi.return_type;
  }

  bool related(const StaticType& a, const StaticType& b) const {
    return info_.is_subtype(a, b) || info_.is_subtype(b, a);
  }

  StaticType check_expr(Expr& e) {
    e.type = check_expr_inner(e);
    return e.type;
  }

  StaticType check_expr_inner(Expr& e) {
    return std::visit(
        [&](auto& n) -> StaticType {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return StaticType::integer();
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return StaticType::boolean();
          } else if constexpr (std::is_same_v<T, StrLit>) {
            return StaticType::string();
          } else if constexpr (std::is_same_v<T, NullLit>) {
            return StaticType::null_type();
          } else if constexpr (std::is_same_v<T, ThisExpr>) {
            if (static_ctx_) {
              error(e.span, "'this' used in a static context");
              return StaticType::error();
            }
            return StaticType::of_class(info_.classes[cls_].name);
          } else if constexpr (std::is_same_v<T, NameExpr>) {
            if (auto t = resolve_var(n, e.span)) return *t;
            if (info_.find_class(n.name) >= 0)
              error(e.span, "class name '" + n.name + "' used as a value");
            else
              error(e.span, "unknown name '" + n.name + "'");
            return StaticType::error();
          } else if constexpr (std::is_same_v<T, FieldAccess>) {
            return check_field_access(e, false);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            return check_call(e);
          } else if constexpr (std::is_same_v<T, NewExpr>) {
            const int c = info_.find_class(n.class_name);
            if (c < 0) {
              error(e.span, "unknown class '" + n.class_name + "'");
              for (Expr& a : n.args) check_expr(a);
              return StaticType::error();
            }
            n.class_index = c;
            const ClassInfo& ci = info_.classes[c];
            const int k = ci.ctor_with_arity(n.args.size());
            if (k < 0) {
              error(e.span, "class '" + n.class_name + "' has no constructor taking " +
                                std::to_string(n.args.size()) + " argument(s)");
              for (Expr& a : n.args) check_expr(a);
            } else {
              n.ctor_index = ci.ctors[k].decl_index;
              check_args(n.args, ci.ctors[k].params, e.span, "constructor");
            }
            return StaticType::of_class(n.class_name);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            return check_binary(e, n);
          } else if constexpr (std::is_same_v<T, UnaryExpr>) {
            const StaticType t = check_expr(*n.operand);
            const StaticType want = n.op == UnaryOp::Not ? StaticType::boolean() : StaticType::integer();
            if (t.is_error()) return want;
            if (t != want)
              error(e.span, std::string("operator '") + (n.op == UnaryOp::Not ? "!" : "-") +
                                "' expects " + want.to_string() + ", found " + t.to_string());
            return want;
          } else if constexpr (std::is_same_v<T, CastExpr>) {
            const StaticType t = check_expr(*n.operand);
            const int c = info_.find_class(n.class_name);
            if (c < 0) {
              error(e.span, "unknown class '" + n.class_name + "'");
              return StaticType::error();
            }
            n.class_index = c;
            const StaticType target = StaticType::of_class(n.class_name);
            if (!t.is_error() && !(t.is_reference() && related(t, target)))
              error(e.span, "cannot cast " + t.to_string() + " to " + n.class_name);
            return target;
          } else if constexpr (std::is_same_v<T, CheckForNullExpr>) {
            return check_expr(*n.inner);
          } else if constexpr (std::is_same_v<T, PoolVarExpr>) {
            return check_expr(*n.inner);
          }
        },
        e.node);
  }

  StaticType check_binary(Expr& e, BinaryExpr& n) {
    const StaticType l = check_expr(*n.lhs);
    const StaticType r = check_expr(*n.rhs);
    const bool err = l.is_error() || r.is_error();
    auto mismatch = [&](const char* op) {
      if (!err)
        error(e.span, std::string("operator '") + op + "' cannot be applied to " + l.to_string() +
                          " and " + r.to_string());
    };
    switch (n.op) {
      case BinaryOp::Add:
        if (l == StaticType::string() && r == StaticType::string()) return StaticType::string();
        if (l != StaticType::integer() || r != StaticType::integer()) mismatch("+");
        return l == StaticType::string() ? StaticType::string() : StaticType::integer();
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        if (l != StaticType::integer() || r != StaticType::integer()) mismatch("arithmetic");
        return StaticType::integer();
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if (l != StaticType::integer() || r != StaticType::integer()) mismatch("comparison");
        return StaticType::boolean();
      case BinaryOp::And:
      case BinaryOp::Or:
        if (l != StaticType::boolean() || r != StaticType::boolean()) mismatch("logical");
        return StaticType::boolean();
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        const bool ok = (l.is_primitive() && l == r) || (l.is_reference() && r.is_reference() && related(l, r));
        if (!ok) mismatch(n.op == BinaryOp::Eq ? "==" : "!=");
        return StaticType::boolean();
      }
    }
    return StaticType::error();
  }
};

}  // namespace

CheckResult typecheck(Program program) {
  auto tp = std::make_shared<TypedProgram>();
  tp->program = std::move(program);
  CheckResult result;
  result.diagnostics = Checker(*tp).run();
  const bool failed = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                  [](const Diagnostic& d) { return d.severity == Severity::Error; });
  if (!failed) result.program = std::move(tp);
  return result;
}

TypedProgramPtr compile(std::string_view source, const std::string& file) {
  CheckResult r = typecheck(parse(source, file));
  if (!r.ok()) throw CompileError(std::move(r.diagnostics));
  return r.program;
}

namespace {

Stmt* find_in_block(Block& b, int id);

Stmt* find_in_stmt(Stmt& s, int id) {
  if (s.stmt_id == id) return &s;
  if (s.stmt_id > id) return nullptr;
  return std::visit(
      [&](auto& n) -> Stmt* {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          return find_in_block(n, id);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          if (Stmt* r = find_in_block(n.then_block, id)) return r;
          return n.else_block ? find_in_block(*n.else_block, id) : nullptr;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return find_in_block(n.body, id);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          if (Stmt* r = find_in_block(n.body, id)) return r;
          return find_in_block(n.handler, id);
        } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
          return find_in_stmt(*n.inner, id);
        } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
          return find_in_block(n.body, id);
        } else {
          return nullptr;
        }
      },
      s.node);
}

Stmt* find_in_block(Block& b, int id) {
  for (Stmt& s : b.stmts)
    if (Stmt* r = find_in_stmt(s, id)) return r;
  return nullptr;
}

}  // namespace

Stmt* find_stmt(Program& program, int stmt_id) {
  for (ClassDecl& c : program.classes) {
    for (CtorDecl& k : c.ctors)
      if (Stmt* r = find_in_block(k.body, stmt_id)) return r;
    for (MethodDecl& m : c.methods)
      if (Stmt* r = find_in_block(m.body, stmt_id)) return r;
  }
  return nullptr;
}

const Stmt* find_stmt(const Program& program, int stmt_id) {
  return find_stmt(const_cast<Program&>(program), stmt_id);
}

}  // namespace mj
