#include <gtest/gtest.h>

#include <map>

#include "mj/repair/corpus.hpp"
#include "mj/repair/metaprogram.hpp"
#include "mj/printer.hpp"
#include "support.hpp"

using namespace mj;
using namespace mj::repair;
using testing_support::fixture_path;
using testing_support::load_fixture;
using testing_support::mj_files;
using testing_support::source_root;

namespace {

std::vector<std::filesystem::path> all_programs() {
  std::vector<std::filesystem::path> out;
  for (const char* dir : {"tests/programs", "tests/fixtures", "fixtures/corpus"})
    for (auto& p : mj_files(source_root() / dir)) out.push_back(p);
  return out;
}

struct IntrinsicCounts {
  std::map<int, int> checks;  // site -> checkForNull count
  std::map<int, int> guards;  // site -> skipLine mentions
  int pool_events = 0;
  int collects = 0;
  int scopes = 0;
};

void count_expr(const Expr& e, IntrinsicCounts& c);

void count_exprs(const std::vector<Expr>& es, IntrinsicCounts& c) {
  for (const Expr& e : es) count_expr(e, c);
}

void count_expr(const Expr& e, IntrinsicCounts& c) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FieldAccess>) {
          count_expr(*n.object, c);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver) count_expr(**n.receiver, c);
          count_exprs(n.args, c);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          count_exprs(n.args, c);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          count_expr(*n.lhs, c);
          count_expr(*n.rhs, c);
        } else if constexpr (std::is_same_v<T, UnaryExpr> || std::is_same_v<T, CastExpr>) {
          count_expr(*n.operand, c);
        } else if constexpr (std::is_same_v<T, CheckForNullExpr>) {
          ++c.checks[n.site_id];
          count_expr(*n.inner, c);
        } else if constexpr (std::is_same_v<T, PoolVarExpr>) {
          ++c.pool_events;
          count_expr(*n.inner, c);
        }
      },
      e.node);
}

void count_block(const Block& b, IntrinsicCounts& c);

void count_stmt(const Stmt& s, IntrinsicCounts& c) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          count_block(n, c);
        } else if constexpr (std::is_same_v<T, VarDecl>) {
          if (n.init) count_expr(*n.init, c);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          count_expr(n.target, c);
          count_expr(n.value, c);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          count_expr(n.expr, c);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          count_expr(n.cond, c);
          count_block(n.then_block, c);
          if (n.else_block) count_block(*n.else_block, c);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          count_expr(n.cond, c);
          count_block(n.body, c);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          if (n.value) count_expr(*n.value, c);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          count_block(n.body, c);
          count_block(n.handler, c);
        } else if constexpr (std::is_same_v<T, AssertStmt>) {
          count_expr(n.cond, c);
        } else if constexpr (std::is_same_v<T, SuperCallStmt>) {
          count_exprs(n.args, c);
        } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
          for (const GuardSite& g : n.sites) {
            ++c.guards[g.site_id];
            if (g.receiver) {
              IntrinsicCounts inner;
              count_expr(*g.receiver, inner);
              EXPECT_TRUE(inner.checks.empty());
            }
          }
          count_stmt(*n.inner, c);
        } else if constexpr (std::is_same_v<T, PoolCollectStmt>) {
          ++c.collects;
        } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
          ++c.scopes;
          count_block(n.body, c);
        }
      },
      s.node);
}

void count_block(const Block& b, IntrinsicCounts& c) {
  for (const Stmt& s : b.stmts) count_stmt(s, c);
}

IntrinsicCounts count_program(const Program& p) {
  IntrinsicCounts c;
  for (const ClassDecl& cls : p.classes) {
    for (const FieldDecl& f : cls.fields)
      if (f.init) count_expr(*f.init, c);
    for (const CtorDecl& k : cls.ctors) count_block(k.body, c);
    for (const MethodDecl& m : cls.methods) count_block(m.body, c);
  }
  return c;
}

}  // namespace

TEST(Metaprogram, HooksOffEquivalence) {
  int runs = 0;
  for (const auto& path : all_programs()) {
    auto tp = testing_support::compile_file(path);
    const Metaprogram mp = transform(tp);
    for (MethodRef t : tp->tests()) {
      RunOptions opt;
      opt.step_budget = 200'000;
      RunResult plain = run_test(*tp, t, opt);
      MetaRuntime off(mp, HookMode::Off);
      RunResult meta = run_meta(mp, t, off, opt.step_budget);
      EXPECT_TRUE(meta.outcome.same_verdict(plain.outcome))
          << path.filename() << ": " << plain.outcome.summary() << " vs " << meta.outcome.summary();
      EXPECT_EQ(meta.steps, plain.steps) << path.filename();
      ++runs;
    }
  }
  EXPECT_GE(runs, 40);
}

TEST(Metaprogram, OneCheckPerSiteAndOneGuard) {
  for (const auto& path : all_programs()) {
    auto tp = testing_support::compile_file(path);
    const Metaprogram mp = transform(tp);
    IntrinsicCounts c = count_program(mp.program->program);
    ASSERT_EQ(c.checks.size(), tp->sites.size()) << path.filename();
    for (const auto& [site, n] : c.checks) EXPECT_EQ(n, 1) << path.filename() << " site " << site;
    for (const DerefSite& site : tp->sites) {
      EXPECT_EQ(c.guards[site.id], 1) << path.filename() << " site " << site.id;
    }
    EXPECT_EQ(mp.scope.size(), tp->sites.size());
    EXPECT_EQ(mp.program->sites.size(), tp->sites.size());
  }
}

TEST(Metaprogram, EveryBodyWrapped) {
  auto tp = testing_support::compile_file(fixture_path("reuse_global.mj"));
  IntrinsicCounts c = count_program(transform(tp).program->program);
  EXPECT_EQ(c.scopes, 3);
  EXPECT_EQ(c.collects, 3);
  EXPECT_EQ(c.pool_events, 4);
}

TEST(Metaprogram, PrintedForm) {
  auto tp = testing_support::compile_file(fixture_path("reuse_global.mj"));
  const std::string text = print_program(transform(tp).program->program);
  EXPECT_NE(text.find("            A r = initVar(null, \"r\");\n"
                      "            A s = initVar(new A(), \"s\");\n"
                      "            str label = initVar(\"x\", \"label\");\n"
                      "            if (skipLine(siteIds=[0], r)) {\n"
                      "                checkForNull(r, A, 0).foo(p);\n"
                      "            }\n"),
            std::string::npos)
      << text;
  EXPECT_NE(text.find("        } catch (ForceReturn f) {\n            return f.value();\n        }"), std::string::npos);
}

TEST(Metaprogram, PoolAgreesWithFrame) {
  int observed = 0;
  for (const auto& path : all_programs()) {
    auto tp = testing_support::compile_file(path);
    const Metaprogram mp = transform(tp);
    for (MethodRef t : tp->tests()) {
      MetaRuntime off(mp, HookMode::Off);
      off.observer = [&](const Interpreter& in, const Frame& frame, int site_id, const std::vector<PoolValue>& pool) {
        EXPECT_EQ(pool.size(), mp.scope[site_id].size());
        for (const PoolValue& pv : pool) {
          EXPECT_TRUE(pv.value == in.read_var(frame, pv.var.ref))
              << path.filename() << " site " << site_id << " var " << pv.var.text;
          ++observed;
        }
      };
      run_meta(mp, t, off, 200'000);
    }
  }
  EXPECT_GT(observed, 500);
}

TEST(Metaprogram, CompoundReceiverEvaluatedOnce) {
  auto f = load_fixture(fixture_path("side_effect.mj"), "sideEffectCounted");
  const Metaprogram mp = transform(f.program);
  MetaRuntime off(mp, HookMode::Off);
  EXPECT_TRUE(run_meta(mp, f.test, off, 10'000).outcome.passed());

  auto g = load_fixture(fixture_path("side_effect.mj"), "sideEffect");
  const Metaprogram mg = transform(g.program);
  MetaRuntime skip(mg, HookMode::Replay, Decision{4, Strategy::S3, NoParam{}, Provenance::Runtime});
  EXPECT_TRUE(run_meta(mg, g.test, skip, 10'000).outcome.passed());
  EXPECT_EQ(skip.activations, 1);
}

TEST(Metaprogram, CaughtNullIsNotHarmful) {
  auto f = load_fixture(fixture_path("side_effect.mj"), "sideEffectCounted");
  const Metaprogram mp = transform(f.program);
  MetaRuntime detect(mp, HookMode::Detect);
  EXPECT_TRUE(run_meta(mp, f.test, detect, 10'000).outcome.passed());
  EXPECT_EQ(detect.detected_site, -1);
}

TEST(Metaprogram, DecisionFiresOnlyAtItsSite) {
  auto f = load_fixture(testing_support::corpus_path("observer_notify.mj"), "notify");
  const Metaprogram mp = transform(f.program);
  MetaRuntime skip(mp, HookMode::Replay, Decision{1, Strategy::S3, NoParam{}, Provenance::Runtime});
  RunResult r = run_meta(mp, f.test, skip, 10'000);
  EXPECT_TRUE(r.outcome.is_npe());
  EXPECT_EQ(r.outcome.site_id, 0);
  EXPECT_EQ(skip.activations, 0);
}

TEST(ValueKey, Rendering) {
  auto tp = compile("class A {\n}\n");
  EXPECT_TRUE(key_of(Value(Null{}), tp->info).is_null);
  EXPECT_EQ(key_of(Value(std::int64_t{42}), tp->info).key, "42");
  EXPECT_EQ(key_of(Value(std::string("s")), tp->info).key, "\"s\"");
  Object o{0, 3, {}};
  ValueKey k = key_of(Value(&o), tp->info);
  EXPECT_EQ(k.key, "A#3");
  EXPECT_EQ(k.runtime_class, "A");
}

TEST(VariablePool, ScopesAndFrames) {
  VariablePool pool;
  pool.push_frame(MemberKey{0, MemberKind::Method, 0});
  const VarRef a{VarKind::Local, "a", 0, 0};
  const VarRef b{VarKind::Local, "b", 0, 1};
  pool.declare(a, StaticType::integer(), Value(std::int64_t{1}));
  pool.enter_scope();
  pool.declare(b, StaticType::integer(), Value(std::int64_t{2}));
  EXPECT_EQ(pool.top_entries().size(), 2u);
  pool.exit_scope();
  EXPECT_EQ(pool.top_entries().size(), 1u);
  pool.assign(a, Value(std::int64_t{5}));
  EXPECT_EQ(pool.top_entries()[0].value, Value(std::int64_t{5}));
  EXPECT_THROW(pool.assign(b, Value(std::int64_t{0})), std::logic_error);
  pool.push_frame(MemberKey{0, MemberKind::Method, 1});
  EXPECT_TRUE(pool.top_entries().empty());
  pool.pop_frame();
  EXPECT_EQ(pool.depth(), 1u);
}
