#include "mj/repair/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mj/repair/explorer.hpp"
#include "mj/repair/template_repair.hpp"

namespace mj::repair {

namespace fs = std::filesystem;

BaselineMismatch::BaselineMismatch(const std::string& bug_id, const Outcome& outcome)
    : std::runtime_error(bug_id + ": test does not fail with an uncaught NPE (" + outcome.summary() + ")"),
      outcome_(outcome) {}

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<CorpusCase> load_corpus(const fs::path& dir) {
  const auto j = nlohmann::json::parse(slurp(dir / "cases.json"));
  std::vector<CorpusCase> out;
  for (const auto& e : j) {
    CorpusCase c;
    c.bug_id = e.at("bugId").get<std::string>();
    c.source = dir / e.at("file").get<std::string>();
    c.test = e.at("test").get<std::string>();
    if (e.contains("tags")) c.tags = e.at("tags").get<std::vector<std::string>>();
    out.push_back(std::move(c));
  }
  return out;
}

LoadedCase load_case(const CorpusCase& c) {
  LoadedCase l;
  l.info = c;
  l.source = slurp(c.source);
  l.program = compile(l.source, c.source.filename().string());
  auto ref = l.program->find_test(c.test);
  if (!ref) throw std::runtime_error(c.bug_id + ": no test named '" + c.test + "'");
  l.test = *ref;
  RunResult r = run_test(*l.program, l.test);
  if (!(r.outcome.kind == OutcomeKind::Uncaught && r.outcome.is_npe())) throw BaselineMismatch(c.bug_id, r.outcome);
  return l;
}

ExplorationReport run_case(const LoadedCase& c, Mode mode, RepairConfig config) {
  config.bug_id = c.info.bug_id;
  config.path = c.info.source.filename().string();
  if (mode == Mode::Template) return explore_templates(*c.program, c.source, c.test, config);
  const Metaprogram mp = transform(c.program);
  return explore_decisions(mp, c.source, c.test, config);
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_diffs(ExplorationReport& report, const fs::path& diff_dir) {
  for (DecisionResult& d : report.decisions) {
    if (!d.diff) continue;
    const std::string rel = report.bug_id + "/" + d.id + ".diff";
    write_atomic(diff_dir / rel, *d.diff + "# verdict: " + d.verdict() + "\n");
    d.diff_path = rel;
  }
}

}  // namespace mj::repair
