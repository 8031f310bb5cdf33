#include <gtest/gtest.h>

#include <random>

#include "mj/interp.hpp"
#include "mj/printer.hpp"
#include "support.hpp"

using namespace mj;
using testing_support::compile_file;
using testing_support::mj_files;
using testing_support::run_named;
using testing_support::source_root;

namespace {

RunResult run_src(const std::string& src, const std::string& test = "t", RunOptions opt = {}) {
  auto tp = compile(src);
  return run_named(*tp, test, opt);
}

std::string wrap(const std::string& body, const std::string& extra = "") {
  return extra + "\nclass T {\n    test void t() {\n" + body + "\n    }\n}\n";
}

}  // namespace

TEST(Interp, ProgramSuitePasses) {
  const auto files = mj_files(source_root() / "tests" / "programs");
  ASSERT_GE(files.size(), 20u);
  for (const auto& f : files) {
    auto tp = compile_file(f);
    ASSERT_FALSE(tp->tests().empty()) << f;
    for (MethodRef t : tp->tests()) {
      RunResult r = run_test(*tp, t);
      EXPECT_TRUE(r.outcome.passed()) << f << " " << tp->info.method(t).name << ": " << r.outcome.summary() << " "
                                      << r.outcome.message;
    }
  }
}

TEST(Interp, AssertPasses) { EXPECT_TRUE(run_src(wrap("assert(1 + 1 == 2);")).outcome.passed()); }

TEST(Interp, AssertFailure) {
  RunResult r = run_src(wrap("assert(1 + 1 == 3);"));
  EXPECT_EQ(r.outcome.kind, OutcomeKind::AssertFail);
  EXPECT_EQ(r.outcome.summary(), "assert-fail");
}

TEST(Interp, NullReceiverIsUncaughtNpeAtSite) {
  auto tp = compile(wrap("A a = null;\na.m();", "class A { void m() { } }"));
  ASSERT_EQ(tp->sites.size(), 1u);
  RunResult r = run_named(*tp, "t");
  EXPECT_EQ(r.outcome.kind, OutcomeKind::Uncaught);
  EXPECT_TRUE(r.outcome.is_npe());
  EXPECT_EQ(r.outcome.site_id, tp->sites[0].id);
  EXPECT_EQ(r.outcome.summary(), "uncaught NPE at site 0");
}

TEST(Interp, InfiniteLoopExhaustsBudget) {
  RunResult r = run_src(wrap("while (true) { }"));
  EXPECT_EQ(r.outcome.kind, OutcomeKind::BudgetExhausted);
  EXPECT_EQ(r.steps, RunOptions{}.step_budget + 1);
}

TEST(Interp, DefaultValues) {
  const std::string src = R"(
class A {
    int i;
    bool b;
    str s;
    A a;
}
class T {
    test void t() {
        A x = new A();
        assert(x.i == 0);
        assert(!x.b);
        assert(x.s == "");
        assert(x.a == null);
        int l;
        assert(l == 0);
        A n;
        assert(n == null);
    }
})";
  EXPECT_TRUE(run_src(src).outcome.passed());
  EXPECT_EQ(default_value_of(StaticType::integer()), Value(std::int64_t{0}));
  EXPECT_TRUE(default_value_of(StaticType::of_class("A")).is_null());
}

TEST(Interp, NpeCaughtAcrossFrames) {
  const std::string src = R"(
class A {
    A n;
    int deep(int k) {
        if (k == 0) {
            return n.n.deep(0);
        }
        return deep(k - 1);
    }
}
class T {
    test void t() {
        int r = 1;
        try {
            r = new A().deep(5);
        } catch (NPE e) {
            r = 7;
            assert(e == "NPE");
        }
        assert(r == 7);
    }
    test void any() {
        int r = 1;
        try {
            r = 5 / (r - 1);
        } catch (Any e) {
            assert(e == "ArithmeticError");
            r = 2;
        }
        assert(r == 2);
    }
    test void npeDoesNotCatchArithmetic() {
        int z = 0;
        try {
            z = 1 / z;
        } catch (NPE e) {
        }
    }
})";
  EXPECT_TRUE(run_src(src).outcome.passed());
  EXPECT_TRUE(run_src(src, "any").outcome.passed());
  RunResult r = run_src(src, "npeDoesNotCatchArithmetic");
  EXPECT_EQ(r.outcome.exception, ExceptionKind::ArithmeticError);
}

TEST(Interp, CastFailureAndDeepRecursion) {
  const std::string src = R"(
class A { }
class B extends A { }
class C extends A {
    int down(int n) { return down(n + 1); }
}
class T {
    test void t() {
        A a = new C();
        B b = (B) a;
    }
    test void rec() {
        int x = new C().down(0);
    }
    test void nullCast() {
        A a = null;
        B b = (B) a;
        assert(b == null);
    }
})";
  EXPECT_EQ(run_src(src).outcome.exception, ExceptionKind::CastError);
  EXPECT_EQ(run_src(src, "rec").outcome.exception, ExceptionKind::StackOverflow);
  EXPECT_TRUE(run_src(src, "nullCast").outcome.passed());
}

TEST(Interp, WrapAroundArithmetic) {
  const std::string src = wrap(R"(
        int big = 9223372036854775807;
        assert(big + 1 < 0);
        int m = -big - 1;
        assert(m / -1 == m);
        assert(m % -1 == 0);
        assert(-7 / 2 == -3);
        assert(-7 % 2 == -1);)");
  RunResult r = run_src(src);
  EXPECT_TRUE(r.outcome.passed()) << r.outcome.summary() << " " << r.outcome.message;
}

TEST(Interp, RunsAreDeterministic) {
  for (const auto& f : mj_files(source_root() / "tests" / "programs")) {
    auto tp = compile_file(f);
    for (MethodRef t : tp->tests()) {
      RunOptions opt;
      opt.trace = true;
      RunResult a = run_test(*tp, t, opt);
      RunResult b = run_test(*tp, t, opt);
      EXPECT_EQ(a.steps, b.steps);
      ASSERT_EQ(a.trace.size(), b.trace.size());
      for (std::size_t i = 0; i < a.trace.size(); ++i) {
        EXPECT_EQ(a.trace[i].step, b.trace[i].step);
        EXPECT_EQ(a.trace[i].event, b.trace[i].event);
      }
    }
  }
}

TEST(Interp, BudgetIsMonotone) {
  // A run that finishes within budget b finishes identically with any larger
  // budget; with a smaller budget it is cut off exactly.
  for (const auto& f : mj_files(source_root() / "tests" / "programs")) {
    auto tp = compile_file(f);
    for (MethodRef t : tp->tests()) {
      RunResult full = run_test(*tp, t);
      ASSERT_TRUE(full.outcome.passed());
      RunOptions exact;
      exact.step_budget = full.steps;
      EXPECT_TRUE(run_test(*tp, t, exact).outcome.passed()) << f;
      RunOptions tight;
      tight.step_budget = full.steps - 1;
      RunResult cut = run_test(*tp, t, tight);
      EXPECT_EQ(cut.outcome.kind, OutcomeKind::BudgetExhausted) << f;
    }
  }
}

TEST(Interp, TraceIsOrderedAndReferencesRealSites) {
  for (const auto& f : mj_files(source_root() / "tests" / "programs")) {
    auto tp = compile_file(f);
    for (MethodRef t : tp->tests()) {
      RunOptions opt;
      opt.trace = true;
      RunResult r = run_test(*tp, t, opt);
      std::int64_t last = 0;
      for (const TraceEvent& e : r.trace) {
        EXPECT_GE(e.step, last);
        EXPECT_LE(e.step, r.steps);
        EXPECT_LT(e.site_id, static_cast<int>(tp->sites.size()));
        if (e.event == "deref") EXPECT_GE(e.site_id, 0);
        last = e.step;
      }
    }
  }
}

TEST(Interp, TraceEndsAtTheFailingSite) {
  auto tp = compile(wrap("A a = new A();\na.m();\na.n.m();", "class A { A n; void m() { } }"));
  RunOptions opt;
  opt.trace = true;
  RunResult r = run_named(*tp, "t", opt);
  ASSERT_TRUE(r.outcome.is_npe());
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.back().event, "throw NPE");
  EXPECT_EQ(r.trace.back().site_id, r.outcome.site_id);
  EXPECT_EQ(print_expr(tp->sites[r.outcome.site_id].receiver), "a.n");
}

namespace {

// Straight-line integer programs with an independent evaluator. Division
// by a zero divisor must surface as ArithmeticError.
struct ArithCase {
  std::string text;
  std::optional<std::int64_t> value;
};

ArithCase random_arith(std::mt19937& rng, int depth) {
  if (depth == 0 || rng() % 4 == 0) {
    const std::int64_t v = static_cast<std::int64_t>(rng() % 21) - 10;
    return {v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v), v};
  }
  ArithCase a = random_arith(rng, depth - 1);
  ArithCase b = random_arith(rng, depth - 1);
  static const char* ops[] = {"+", "-", "*", "/", "%"};
  const int op = static_cast<int>(rng() % 5);
  ArithCase out{"(" + a.text + " " + ops[op] + " " + b.text + ")", std::nullopt};
  if (!a.value || !b.value) return out;
  const std::uint64_t x = static_cast<std::uint64_t>(*a.value), y = static_cast<std::uint64_t>(*b.value);
  switch (op) {
    case 0: out.value = static_cast<std::int64_t>(x + y); break;
    case 1: out.value = static_cast<std::int64_t>(x - y); break;
    case 2: out.value = static_cast<std::int64_t>(x * y); break;
    case 3:
      if (*b.value != 0) out.value = *b.value == -1 ? static_cast<std::int64_t>(0 - x) : *a.value / *b.value;
      break;
    default:
      if (*b.value != 0) out.value = *b.value == -1 ? 0 : *a.value % *b.value;
  }
  return out;
}

}  // namespace

TEST(Interp, RandomArithmeticMatchesReferenceEvaluator) {
  std::mt19937 rng(99);
  for (int i = 0; i < 300; ++i) {
    ArithCase c = random_arith(rng, 4);
    if (c.value) {
      const std::string body = "int r = " + c.text + ";\nassert(r == " +
                               (*c.value < 0 ? "0 - " + std::to_string(-(*c.value + 1)) + " - 1"
                                             : std::to_string(*c.value)) +
                               ");";
      RunResult r = run_src(wrap(body));
      EXPECT_TRUE(r.outcome.passed()) << c.text << " = " << *c.value << ": " << r.outcome.summary();
    } else {
      RunResult r = run_src(wrap("int r = " + c.text + ";"));
      EXPECT_EQ(r.outcome.exception, ExceptionKind::ArithmeticError) << c.text;
    }
  }
}
