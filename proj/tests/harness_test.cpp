#include <gtest/gtest.h>

#include <cstdio>
#include <json.hpp>
#include <regex>
#include <sys/wait.h>

#include "mj/repair/corpus.hpp"
#include "mj/repair/parallel.hpp"
#include "support.hpp"

using namespace mj;
using namespace mj::repair;
namespace fs = std::filesystem;

namespace {

fs::path corpus_dir() { return testing_support::source_root() / "fixtures" / "corpus"; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mj-harness-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ComparisonRow row(const std::string& id, double tpl, double meta) {
  ComparisonRow r;
  r.bug_id = id;
  r.template_mode = {tpl, tpl / 2, 1.0, tpl * 10};
  r.meta_mode = {meta, meta / 2, 2.0, meta * 10};
  return r;
}

struct Command {
  int status = -1;
  std::string out;
};

Command run(const std::string& args) {
  Command c;
  const std::string cmd = std::string(MJREPAIR_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return c;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) c.out.append(buf, n);
  const int raw = pclose(p);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

}  // namespace

TEST(Modes, Names) {
  EXPECT_EQ(mode_name(Mode::Template), "template");
  EXPECT_EQ(mode_from_name("meta"), Mode::Meta);
  EXPECT_THROW(mode_from_name("both"), std::invalid_argument);
  EXPECT_EQ(policy_name(ExecPolicy::Parallel), "openmp");
}

TEST(Compare, SingleCase) {
  Comparison c = compare_modes({row("one", 5, 3)});
  EXPECT_EQ(c.total.template_mode.tentative, 5);
  EXPECT_EQ(c.median.meta_mode.tentative, 3);
  EXPECT_EQ(c.average.meta_mode.steps, c.median.meta_mode.steps);
  EXPECT_EQ(c.average.template_mode.valid, 2.5);
}

TEST(Compare, EvenMedian) {
  Comparison c = compare_modes({row("a", 4, 4), row("b", 10, 10)});
  EXPECT_EQ(c.median.template_mode.tentative, 7);
  const std::string text = format_comparison(c);
  EXPECT_NE(text.find("Median"), std::string::npos);
  EXPECT_NE(text.find("7.00"), std::string::npos) << text;
  EXPECT_NE(text.find("Total"), std::string::npos);
  EXPECT_EQ(text.rfind("bug ", 0), 0u);
}

TEST(Compare, Csv) {
  const std::string csv = format_comparison_csv(compare_modes({row("a", 4, 2), row("b", 10, 6)}));
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0],
            "bug,tpl.tentative,tpl.valid,tpl.ms,tpl.steps,meta.tentative,meta.valid,meta.ms,meta.steps");
  EXPECT_EQ(lines[1].substr(0, 4), "a,4,");
  EXPECT_EQ(lines[3].substr(0, 9), "Total,14,");
  EXPECT_EQ(lines[5].substr(0, 12), "Median,7.00,");
}

TEST(Corpus, ShipsSixteenCases) {
  auto cases = load_corpus(corpus_dir());
  ASSERT_EQ(cases.size(), 16u);
  std::set<std::string> ids;
  for (const CorpusCase& c : cases) {
    ids.insert(c.bug_id);
    EXPECT_TRUE(fs::exists(c.source)) << c.source;
    EXPECT_FALSE(c.tags.empty());
    LoadedCase lc = load_case(c);
    EXPECT_EQ(lc.program->info.method(lc.test).name, c.test);
  }
  EXPECT_EQ(ids.size(), 16u);
  for (const char* id : {"runtime_narrowing", "felix_like", "pdfbox_like", "math305_like"}) EXPECT_TRUE(ids.count(id));
}

TEST(Corpus, BaselineMismatch) {
  const fs::path dir = scratch("mismatch");
  fs::copy_file(testing_support::fixture_path("no_npe.mj"), dir / "no_npe.mj");
  std::ofstream(dir / "cases.json") << R"([{"bugId": "ok", "file": "no_npe.mj", "test": "fine", "tags": []}])";
  auto cases = load_corpus(dir);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_THROW(load_case(cases[0]), BaselineMismatch);
}

TEST(Report, JsonShape) {
  auto cases = load_corpus(corpus_dir());
  LoadedCase lc = load_case(cases.at(0));
  RepairConfig cfg;
  cfg.policy = ExecPolicy::Serial;
  ExplorationReport r = run_case(lc, Mode::Meta, cfg);
  const fs::path dir = scratch("report");
  write_diffs(r, dir);
  const auto j = nlohmann::ordered_json::parse(report_to_json(r));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"bugId", "mode", "test", "siteId", "candidates", "tentative", "valid",
                                            "elapsedMs", "steps", "decisions", "filteredOut"}));
  ASSERT_EQ(j["decisions"].size(), r.decisions.size());
  for (std::size_t i = 0; i < r.decisions.size(); ++i) {
    const auto& d = j["decisions"][i];
    EXPECT_EQ(d["id"], "meta-" + std::to_string(i));
    const std::string verdict = d["verdict"];
    EXPECT_TRUE(verdict == "valid" || verdict.rfind("invalid: ", 0) == 0) << verdict;
    const fs::path diff = dir / d["diff"].get<std::string>();
    ASSERT_TRUE(fs::exists(diff)) << diff;
    const std::string text = testing_support::read_file(diff);
    EXPECT_NE(text.find("# verdict: " + verdict + "\n"), std::string::npos);
  }
  std::string bug;
  Mode mode;
  ModeStats s = stats_from_json(report_to_json(r), &bug, &mode);
  EXPECT_EQ(bug, r.bug_id);
  EXPECT_EQ(mode, Mode::Meta);
  EXPECT_EQ(s.tentative, r.tentative);
  EXPECT_EQ(s.steps, static_cast<double>(r.steps));
}

TEST(Report, AtomicWrite) {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "sub" / "x.json", "{}\n");
  EXPECT_EQ(testing_support::read_file(dir / "sub" / "x.json"), "{}\n");
  write_atomic(dir / "sub" / "x.json", "[]\n");
  EXPECT_EQ(testing_support::read_file(dir / "sub" / "x.json"), "[]\n");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir / "sub")) files += e.is_regular_file();
  EXPECT_EQ(files, 1);
}

TEST(Parallel, LowestFailureRethrown) {
  for (ExecPolicy p : {ExecPolicy::Serial, ExecPolicy::Parallel}) {
    std::vector<int> hit(50, 0);
    try {
      for_each_index(hit.size(), p, [&](std::size_t i) {
        hit[i] = 1;
        if (i == 17 || i == 33) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17");
    }
    EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
  }
  EXPECT_GE(max_threads(), 1);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("repair").status, 1);
  EXPECT_EQ(run("--help").status, 0);
  const std::string no_npe = testing_support::fixture_path("no_npe.mj").string();
  EXPECT_EQ(run("repair " + no_npe + " --test fine").status, 2);
  EXPECT_EQ(run("repair " + no_npe + " --test nope").status, 1);
  EXPECT_EQ(run("repair " + no_npe + " --test fine --mode sideways").status, 1);
  const std::string felix = testing_support::corpus_path("felix_like.mj").string();
  Command ok = run("repair " + felix + " --test felix --mode both");
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("template"), std::string::npos);
  EXPECT_NE(ok.out.find("NullValued"), std::string::npos);
}

TEST(Cli, ReportsAndCompareFromDirectory) {
  const fs::path out = scratch("cli");
  const std::string narrowing = testing_support::corpus_path("runtime_narrowing.mj").string();
  Command r = run("repair " + narrowing + " --test narrowing --mode both --report " + (out / "r.json").string() +
                  " --diff-dir " + (out / "d").string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(fs::exists(out / "r.template.json"));
  EXPECT_TRUE(fs::exists(out / "r.meta.json"));
  EXPECT_TRUE(fs::exists(out / "d" / "runtime_narrowing" / "meta-0.diff"));
  fs::remove_all(out / "d");
  Command c = run("corpus compare " + out.string() + " --csv");
  ASSERT_EQ(c.status, 0) << c.out;
  EXPECT_NE(c.out.find("runtime_narrowing,8,2,"), std::string::npos) << c.out;
}

TEST(Cli, TraceAndMetaprogram) {
  const std::string felix = testing_support::corpus_path("felix_like.mj").string();
  Command t = run("repair " + felix + " --test felix --mode meta --trace");
  ASSERT_EQ(t.status, 0);
  const auto first = t.out.substr(0, t.out.find('\n'));
  const auto j = nlohmann::json::parse(first);
  EXPECT_TRUE(j.contains("step"));
  EXPECT_TRUE(j.contains("siteId"));
  Command m = run("show-metaprogram " + felix);
  EXPECT_EQ(m.status, 0);
  EXPECT_NE(m.out.find("checkForNull(l, Logger, 0)"), std::string::npos) << m.out;
}
