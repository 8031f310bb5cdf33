#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mj/interp.hpp"
#include "mj/typecheck.hpp"

namespace mj::repair {

enum class Strategy : std::uint8_t { S1a, S1b, S2a, S2b, S3, S4a, S4b, S4c, S4d };

inline constexpr std::array<Strategy, 9> kAllStrategies = {
    Strategy::S1a, Strategy::S1b, Strategy::S2a, Strategy::S2b, Strategy::S3,
    Strategy::S4a, Strategy::S4b, Strategy::S4c, Strategy::S4d};

std::string_view strategy_id(Strategy s);
std::string_view strategy_description(Strategy s);
Strategy strategy_from_id(std::string_view id);  // throws std::invalid_argument

/// S1a..S2b replace the null value; S3..S4d skip execution.
inline bool is_replacement(Strategy s) { return s <= Strategy::S2b; }
inline bool is_global(Strategy s) { return s == Strategy::S1b || s == Strategy::S2b; }
inline bool returns_early(Strategy s) { return s >= Strategy::S4a; }

// ---------------------------------------------------------------------------
// Construction plans

struct ConstructionPlan;

struct PlanArg {
  enum class Kind : std::uint8_t { Literal, Null, Nested };
  Kind kind = Kind::Literal;
  StaticType type;                                // parameter type
  std::shared_ptr<const ConstructionPlan> nested;  // Kind::Nested
};

/// `new C(args)` using constructor `ctor` (index into ClassInfo::ctors).
struct ConstructionPlan {
  std::string class_name;
  int cls = -1;
  int ctor = -1;
  std::vector<PlanArg> args;

  int depth() const;
  /// Source form, e.g. `new C(new C(null), 0)`.
  std::string render() const;
  Expr to_expr() const;
};

/// Every plan for `t` and its subclasses with nesting at most `max_depth`,
/// constructors in constructors_of order and argument choices null-first.
/// Capped at kMaxPlans.
inline constexpr std::size_t kMaxPlans = 256;
std::vector<ConstructionPlan> plan_constructions(const ProgramInfo& info, const StaticType& t, int max_depth);

// ---------------------------------------------------------------------------
// Decisions

enum class Provenance : std::uint8_t { Static, Runtime };

struct NoParam {};

struct VarParam {
  VarRef ref;
  StaticType type;            // declared type
  std::string text;           // source text naming the variable at the site
  std::string runtime_class;  // class of the value at collection time (runtime only)
};

struct CtorParam {
  ConstructionPlan plan;
};

struct ConstParam {
  enum class Kind : std::uint8_t { Null, Zero, One, Empty };
  Kind kind = Kind::Null;
  StaticType type() const;
  Value value() const;
  std::string text() const;
};

using StrategyParam = std::variant<NoParam, VarParam, CtorParam, ConstParam>;

std::string param_text(const StrategyParam& p);

struct Decision {
  int site_id = -1;
  Strategy strategy = Strategy::S3;
  StrategyParam param;
  Provenance provenance = Provenance::Static;

  /// `S1b(s)`, `S3`, `S2a(new A())`.
  std::string label() const;
};

/// Throws std::invalid_argument when the parameter kind does not match the
/// strategy.
void validate(const Decision& d);

// ---------------------------------------------------------------------------
// Applicability

struct Applicable {
  Strategy strategy;
  bool template_ok = true;  // false: only expressible at runtime
};

/// Strategies usable at `site`, in taxonomy order.
std::vector<Applicable> applicable_strategies(const DerefSite& site);
bool is_applicable(const DerefSite& site, Strategy s);

/// Constants usable as a returned value of type `t` (S4c).
std::vector<ConstParam> return_constants(const StaticType& t);

}  // namespace mj::repair
