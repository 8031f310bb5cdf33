#include "mj/repair/strategy.hpp"

#include <stdexcept>

#include "mj/scope.hpp"

namespace mj::repair {

namespace {

struct StrategyRow {
  Strategy s;
  std::string_view id;
  std::string_view description;
};

constexpr StrategyRow kRows[] = {
    {Strategy::S1a, "S1a", "local reuse of an existing compatible object"},
    {Strategy::S1b, "S1b", "global reuse of an existing compatible object"},
    {Strategy::S2a, "S2a", "local creation of a new object"},
    {Strategy::S2b, "S2b", "global creation of a new object"},
    {Strategy::S3, "S3", "skip statement"},
    {Strategy::S4a, "S4a", "return a null to caller"},
    {Strategy::S4b, "S4b", "return a new object to caller"},
    {Strategy::S4c, "S4c", "return an existing compatible object to caller"},
    {Strategy::S4d, "S4d", "return to caller (void method)"},
};

}  // namespace

std::string_view strategy_id(Strategy s) { return kRows[static_cast<int>(s)].id; }
std::string_view strategy_description(Strategy s) { return kRows[static_cast<int>(s)].description; }

Strategy strategy_from_id(std::string_view id) {
  for (const auto& r : kRows)
    if (r.id == id) return r.s;
  throw std::invalid_argument("unknown strategy '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------

int ConstructionPlan::depth() const {
  int d = 0;
  for (const PlanArg& a : args)
    if (a.kind == PlanArg::Kind::Nested) d = std::max(d, a.nested->depth());
  return d + 1;
}

namespace {

std::string literal_text(const StaticType& t) {
  switch (t.kind) {
    case StaticType::Kind::Int: return "0";
    case StaticType::Kind::Bool: return "false";
    case StaticType::Kind::Str: return "\"\"";
    default: return "null";
  }
}

Expr literal_expr(const StaticType& t) {
  switch (t.kind) {
    case StaticType::Kind::Int: return make_expr(IntLit{0});
    case StaticType::Kind::Bool: return make_expr(BoolLit{false});
    case StaticType::Kind::Str: return make_expr(StrLit{""});
    default: return make_expr(NullLit{});
  }
}

}  // namespace

std::string ConstructionPlan::render() const {
  std::string out = "new " + class_name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    switch (args[i].kind) {
      case PlanArg::Kind::Literal: out += literal_text(args[i].type); break;
      case PlanArg::Kind::Null: out += "null"; break;
      case PlanArg::Kind::Nested: out += args[i].nested->render(); break;
    }
  }
  return out + ")";
}

Expr ConstructionPlan::to_expr() const {
  NewExpr n;
  n.class_name = class_name;
  for (const PlanArg& a : args) {
    switch (a.kind) {
      case PlanArg::Kind::Literal: n.args.push_back(literal_expr(a.type)); break;
      case PlanArg::Kind::Null: n.args.push_back(make_expr(NullLit{})); break;
      case PlanArg::Kind::Nested: n.args.push_back(a.nested->to_expr()); break;
    }
  }
  return make_expr(std::move(n));
}

namespace {

void plans_into(const ProgramInfo& info, const StaticType& t, int depth_left, std::vector<ConstructionPlan>& out,
                std::size_t cap) {
  for (const CtorSig& sig : constructors_of(info, t)) {
    std::vector<std::vector<PlanArg>> choices;
    for (const StaticType& p : sig.params) {
      std::vector<PlanArg> options;
      if (!p.is_class()) {
        options.push_back(PlanArg{PlanArg::Kind::Literal, p, nullptr});
      } else {
        options.push_back(PlanArg{PlanArg::Kind::Null, p, nullptr});
        if (depth_left > 1) {
          std::vector<ConstructionPlan> inner;
          plans_into(info, p, depth_left - 1, inner, cap);
          for (auto& ip : inner)
            options.push_back(PlanArg{PlanArg::Kind::Nested, p, std::make_shared<const ConstructionPlan>(std::move(ip))});
        }
      }
      choices.push_back(std::move(options));
    }
    // Odometer over the argument choices, first argument most significant.
    std::vector<std::size_t> idx(choices.size(), 0);
    while (true) {
      if (out.size() >= cap) return;
      ConstructionPlan plan;
      plan.class_name = info.classes[sig.cls].name;
      plan.cls = sig.cls;
      plan.ctor = sig.ctor;
      for (std::size_t i = 0; i < choices.size(); ++i) plan.args.push_back(choices[i][idx[i]]);
      out.push_back(std::move(plan));
      int k = static_cast<int>(choices.size()) - 1;
      while (k >= 0 && ++idx[k] == choices[k].size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
}

}  // namespace

std::vector<ConstructionPlan> plan_constructions(const ProgramInfo& info, const StaticType& t, int max_depth) {
  std::vector<ConstructionPlan> out;
  if (!t.is_class() || max_depth < 1) return out;
  plans_into(info, t, max_depth, out, kMaxPlans);
  return out;
}

// ---------------------------------------------------------------------------

StaticType ConstParam::type() const {
  switch (kind) {
    case Kind::Null: return StaticType::null_type();
    case Kind::Zero:
    case Kind::One: return StaticType::integer();
    case Kind::Empty: return StaticType::string();
  }
  return StaticType::error();
}

Value ConstParam::value() const {
  switch (kind) {
    case Kind::Null: return Value();
    case Kind::Zero: return Value(std::int64_t{0});
    case Kind::One: return Value(std::int64_t{1});
    case Kind::Empty: return Value(std::string());
  }
  return Value();
}

std::string ConstParam::text() const {
  switch (kind) {
    case Kind::Null: return "null";
    case Kind::Zero: return "0";
    case Kind::One: return "1";
    case Kind::Empty: return "\"\"";
  }
  return "?";
}

std::string param_text(const StrategyParam& p) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoParam>) return "";
        else if constexpr (std::is_same_v<T, VarParam>) return x.text;
        else if constexpr (std::is_same_v<T, CtorParam>) return x.plan.render();
        else return x.text();
      },
      p);
}

std::string Decision::label() const {
  std::string out(strategy_id(strategy));
  if (!std::holds_alternative<NoParam>(param)) out += "(" + param_text(param) + ")";
  return out;
}

void validate(const Decision& d) {
  bool ok = false;
  switch (d.strategy) {
    case Strategy::S1a:
    case Strategy::S1b:
    case Strategy::S4c:
      ok = std::holds_alternative<VarParam>(d.param) || std::holds_alternative<ConstParam>(d.param);
      break;
    case Strategy::S2a:
    case Strategy::S2b:
    case Strategy::S4b: ok = std::holds_alternative<CtorParam>(d.param); break;
    case Strategy::S3:
    case Strategy::S4a:
    case Strategy::S4d: ok = std::holds_alternative<NoParam>(d.param); break;
  }
  if (!ok) throw std::invalid_argument("parameter kind does not match strategy " + std::string(strategy_id(d.strategy)));
}

// ---------------------------------------------------------------------------

std::vector<Applicable> applicable_strategies(const DerefSite& site) {
  std::vector<Applicable> out;
  const StaticType& ret = site.return_type;
  for (Strategy s : kAllStrategies) {
    bool ok = false;
    switch (s) {
      case Strategy::S1a:
      case Strategy::S2a:
      case Strategy::S3: ok = true; break;
      case Strategy::S1b:
      case Strategy::S2b: ok = site.assignable; break;
      case Strategy::S4a:
      case Strategy::S4b: ok = ret.is_class(); break;
      case Strategy::S4c: ok = !ret.is_void(); break;
      case Strategy::S4d: ok = ret.is_void(); break;
    }
    if (ok) out.push_back({s, !(s == Strategy::S3 && site.stmt_kind == StmtKind::VarDecl)});
  }
  return out;
}

bool is_applicable(const DerefSite& site, Strategy s) {
  for (const Applicable& a : applicable_strategies(site))
    if (a.strategy == s) return true;
  return false;
}

std::vector<ConstParam> return_constants(const StaticType& t) {
  switch (t.kind) {
    case StaticType::Kind::Int: return {ConstParam{ConstParam::Kind::Zero}, ConstParam{ConstParam::Kind::One}};
    case StaticType::Kind::Str: return {ConstParam{ConstParam::Kind::Empty}};
    default: return {};
  }
}

}  // namespace mj::repair
