#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "mj/parser.hpp"
#include "mj/printer.hpp"
#include "mj/repair/corpus.hpp"
#include "mj/repair/patch.hpp"
#include "mj/repair/rewrite.hpp"
#include "mj/repair/template_repair.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace mj;
using namespace mj::repair;
using testing_support::corpus_path;
using testing_support::Fixture;
using testing_support::fixture_path;
using testing_support::load_fixture;

namespace {

RepairConfig serial_config() {
  RepairConfig c;
  c.policy = ExecPolicy::Serial;
  return c;
}

std::set<std::string> params_of(const std::vector<Decision>& ds, Strategy s) {
  std::set<std::string> out;
  for (const Decision& d : ds)
    if (d.strategy == s) out.insert(param_text(d.param));
  return out;
}

std::set<std::string> labels_of(const ExplorationReport& r) {
  std::set<std::string> out;
  for (const DecisionResult& d : r.decisions) out.insert(d.decision.label());
  return out;
}

int hunk_count(const std::string& diff) {
  int n = 0;
  std::size_t pos = 0;
  while ((pos = diff.find("\n@@ ", pos)) != std::string::npos) {
    ++n;
    ++pos;
  }
  return n;
}

std::string without_elapsed(const std::string& json) {
  return std::regex_replace(json, std::regex("\"elapsedMs\": [^,\n]*"), "");
}

const Decision& find_decision(const std::vector<Decision>& ds, const std::string& label) {
  for (const Decision& d : ds)
    if (d.label() == label) return d;
  throw std::runtime_error("missing " + label);
}

}  // namespace

TEST(Enumerate, ReuseWithUnrelatedLocal) {
  Fixture f = load_fixture(fixture_path("reuse_global.mj"), "reuse");
  auto ds = enumerate_static_candidates(*f.program, f.program->sites.at(0), 3);
  EXPECT_EQ(params_of(ds, Strategy::S1a), (std::set<std::string>{"s", "null"}));
  EXPECT_EQ(params_of(ds, Strategy::S1b), (std::set<std::string>{"s", "null"}));
  for (const Decision& d : ds) EXPECT_EQ(d.provenance, Provenance::Static);
}

TEST(Enumerate, VoidMethodHasNoValueReturns) {
  Fixture f = load_fixture(fixture_path("reuse_global.mj"), "reuse");
  for (const Decision& d : enumerate_static_candidates(*f.program, f.program->sites.at(0), 3)) {
    EXPECT_NE(d.strategy, Strategy::S4a);
    EXPECT_NE(d.strategy, Strategy::S4b);
    EXPECT_NE(d.strategy, Strategy::S4c);
  }
}

TEST(Enumerate, NullValuedLocalStillEnumerated) {
  Fixture f = load_fixture(corpus_path("felix_like.mj"), "felix");
  auto ds = enumerate_static_candidates(*f.program, f.program->sites.at(0), 3);
  EXPECT_TRUE(params_of(ds, Strategy::S1b).count("fallback"));
}

TEST(Enumerate, TableOrder) {
  Fixture f = load_fixture(corpus_path("pdfbox_like.mj"), "pdfbox");
  auto ds = enumerate_static_candidates(*f.program, f.program->sites.at(0), 3);
  for (std::size_t i = 1; i < ds.size(); ++i) EXPECT_LE(ds[i - 1].strategy, ds[i].strategy);
}

TEST(ApplyTemplate, SkipStatement) {
  Fixture f = load_fixture(fixture_path("reuse_global.mj"), "reuse");
  std::string text = splice_rewrite(*f.program, f.source, Decision{0, Strategy::S3, NoParam{}}, false);
  EXPECT_NE(text.find("        if (r != null) {\n            r.foo(p);\n        }\n"), std::string::npos) << text;
}

TEST(ApplyTemplate, GlobalReuse) {
  Fixture f = load_fixture(fixture_path("reuse_global.mj"), "reuse");
  auto ds = enumerate_static_candidates(*f.program, f.program->sites.at(0), 3);
  std::string text = splice_rewrite(*f.program, f.source, find_decision(ds, "S1b(s)"), false);
  EXPECT_NE(text.find("        if (r == null) {\n            r = s;\n        }\n        r.foo(p);\n"), std::string::npos)
      << text;
}

TEST(ApplyTemplate, LocalReuseDuplicatesStatement) {
  Fixture f = load_fixture(fixture_path("reuse_global.mj"), "reuse");
  auto ds = enumerate_static_candidates(*f.program, f.program->sites.at(0), 3);
  std::string text = splice_rewrite(*f.program, f.source, find_decision(ds, "S1a(s)"), false);
  EXPECT_NE(text.find("if (r == null) {\n            s.foo(p);\n        } else {\n            r.foo(p);\n        }"),
            std::string::npos)
      << text;
}

TEST(ApplyTemplate, ReturnEarly) {
  Fixture f = load_fixture(corpus_path("pdfbox_like.mj"), "pdfbox");
  std::string text = splice_rewrite(*f.program, f.source, Decision{0, Strategy::S4a, NoParam{}}, false);
  EXPECT_NE(text.find("if (f == null) {\n            return null;\n        }\n        if (f.width() > 0) {"),
            std::string::npos)
      << text;
}

TEST(ApplyTemplate, SkipOnDeclarationInapplicable) {
  auto tp = compile(R"(class A {
    A e;

    A f() {
        return e;
    }
}

class T {
    void g(A e) {
        A x = e.f();
    }
})");
  EXPECT_THROW(apply_template(*tp, Decision{0, Strategy::S3, NoParam{}}), TemplateInapplicable);
  EXPECT_NO_THROW(rewrite_statement(*tp, Decision{0, Strategy::S3, NoParam{}}, true));
}

TEST(ApplyTemplate, TreeSpliceEqualsTextSplice) {
  for (const CorpusCase& c : load_corpus(testing_support::source_root() / "fixtures" / "corpus")) {
    LoadedCase lc = load_case(c);
    const int site = baseline_run(*lc.program, lc.test, 1'000'000).outcome.site_id;
    for (const Decision& d : enumerate_static_candidates(*lc.program, lc.program->sites.at(site), 3)) {
      const std::string tree = print_program(apply_template(*lc.program, d));
      const std::string text = print_program(parse(splice_rewrite(*lc.program, lc.source, d, false), "t.mj"));
      EXPECT_EQ(tree, text) << c.bug_id << " " << d.label();
    }
  }
}

TEST(ExploreTemplates, MatchesBruteForce) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"reuse_global.mj", "reuse"},           {"coincide_void.mj", "coincideVoid"},
      {"coincide_int.mj", "coincideInt"},     {"coincide_compound.mj", "coincideCompound"},
      {"coincide_object.mj", "coincideObject"}, {"coincide_str.mj", "coincideStr"},
  };
  for (const auto& [file, test] : cases) {
    Fixture f = load_fixture(fixture_path(file), test);
    ExplorationReport r = explore_templates(*f.program, f.source, f.test, serial_config());
    EXPECT_EQ(labels_of(r), oracle::template_labels(f.source, *f.program, r.site_id, 3)) << file;
    EXPECT_EQ(r.tentative, static_cast<int>(r.decisions.size()));
  }
}

TEST(ExploreTemplates, ReuseGlobalCounts) {
  Fixture f = load_fixture(fixture_path("reuse_global.mj"), "reuse");
  ExplorationReport r = explore_templates(*f.program, f.source, f.test, serial_config());
  EXPECT_EQ(r.mode, Mode::Template);
  EXPECT_EQ(r.site_id, 0);
  EXPECT_EQ(r.tentative, static_cast<int>(oracle::template_labels(f.source, *f.program, 0, 3).size()));
  EXPECT_GE(r.candidates, r.tentative);
}

TEST(ExploreTemplates, NullReuseStaysInvalid) {
  Fixture f = load_fixture(corpus_path("felix_like.mj"), "felix");
  ExplorationReport r = explore_templates(*f.program, f.source, f.test, serial_config());
  int seen = 0;
  for (const DecisionResult& d : r.decisions) {
    if (d.decision.label() != "S1b(fallback)" && d.decision.label() != "S1b(null)") continue;
    ++seen;
    EXPECT_FALSE(d.valid);
    EXPECT_TRUE(d.outcome.is_npe());
  }
  EXPECT_EQ(seen, 2);
}

TEST(ExploreTemplates, NotAnNpeBug) {
  Fixture f = load_fixture(fixture_path("no_npe.mj"), "broken");
  EXPECT_THROW(explore_templates(*f.program, f.source, f.test, serial_config()), NotAnNpeBug);
  Fixture g = load_fixture(fixture_path("no_npe.mj"), "fine");
  EXPECT_THROW(explore_templates(*g.program, g.source, g.test, serial_config()), NotAnNpeBug);
}

TEST(ExploreTemplates, CorpusInvariants) {
  for (const CorpusCase& c : load_corpus(testing_support::source_root() / "fixtures" / "corpus")) {
    LoadedCase lc = load_case(c);
    ExplorationReport a = run_case(lc, Mode::Template, serial_config());
    ExplorationReport b = run_case(lc, Mode::Template, serial_config());
    EXPECT_EQ(without_elapsed(report_to_json(a)), without_elapsed(report_to_json(b))) << c.bug_id;
    int valid = 0;
    for (const DecisionResult& d : a.decisions) {
      valid += d.valid;
      EXPECT_EQ(d.valid, d.outcome.passed());
      ASSERT_TRUE(d.diff.has_value());
      EXPECT_EQ(hunk_count(*d.diff), 1) << c.bug_id << " " << d.id << "\n" << *d.diff;
      const std::string patched = apply_patch(lc.source, *d.diff);
      EXPECT_TRUE(oracle::compiles(patched)) << c.bug_id << " " << d.id;
    }
    EXPECT_EQ(valid, a.valid);
    EXPECT_LE(a.valid, a.tentative);
  }
}
