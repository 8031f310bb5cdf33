#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mj/printer.hpp"
#include "mj/repair/corpus.hpp"
#include "mj/repair/explorer.hpp"
#include "mj/repair/template_repair.hpp"

namespace fs = std::filesystem;
using namespace mj;
using namespace mj::repair;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBaseline = 2;

struct Options {
  std::int64_t budget = 1'000'000;
  int ctor_depth = 3;
  std::string report;
  std::string diff_dir;
  bool trace = false;
  bool serial = false;
  bool emit_metaprogram = false;
  bool csv = false;
  std::string out = "mjrepair-out";
};

RepairConfig config_of(const Options& o) {
  RepairConfig c;
  c.step_budget = o.budget;
  c.ctor_depth = o.ctor_depth;
  c.policy = o.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
  return c;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string summary_line(const ExplorationReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-22s %-8s site %-3d tentative %3d  valid %3d  filtered %3d  %8.1f ms",
                r.bug_id.c_str(), std::string(mode_name(r.mode)).c_str(), r.site_id, r.tentative, r.valid,
                static_cast<int>(r.filtered_out.size()), r.elapsed_ms);
  return buf;
}

void print_decisions(const ExplorationReport& r) {
  for (const DecisionResult& d : r.decisions)
    std::cout << "  " << d.id << "  " << d.decision.label() << "  " << d.verdict() << "\n";
  for (const FilteredDecision& f : r.filtered_out)
    std::cout << "  filtered  " << f.decision.label() << "  " << to_string(f.reason) << "\n";
}

fs::path report_path_for(const std::string& base, Mode mode, bool both) {
  fs::path p(base);
  if (!both) return p;
  fs::path out = p.parent_path() / p.stem();
  out += "." + std::string(mode_name(mode)) + p.extension().string();
  return out;
}

void emit(ExplorationReport& r, const Options& o, bool both) {
  if (!o.diff_dir.empty()) write_diffs(r, o.diff_dir);
  if (!o.report.empty()) write_atomic(report_path_for(o.report, r.mode, both), report_to_json(r));
}

void print_trace(const std::vector<TraceEvent>& trace) {
  for (const TraceEvent& e : trace) {
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["siteId"] = e.site_id;
    j["event"] = e.event;
    std::cout << j.dump() << "\n";
  }
}

int cmd_repair(const std::string& file, const std::string& test, const std::string& mode, const Options& o) {
  const std::string source = read_text(file);
  TypedProgramPtr tp = compile(source, fs::path(file).filename().string());
  auto ref = tp->find_test(test);
  if (!ref) {
    std::cerr << "mjrepair: no test named '" << test << "'\n";
    return kExitUsage;
  }
  RepairConfig config = config_of(o);
  config.bug_id = fs::path(file).stem().string();
  config.path = fs::path(file).filename().string();

  RunOptions base_opt;
  base_opt.step_budget = o.budget;
  base_opt.trace = o.trace;
  RunResult base = run_test(*tp, *ref, base_opt);
  if (o.trace) print_trace(base.trace);
  if (!(base.outcome.kind == OutcomeKind::Uncaught && base.outcome.is_npe())) {
    std::cerr << "mjrepair: baseline mismatch: " << base.outcome.summary() << "\n";
    return kExitBaseline;
  }

  const bool both = mode == "both";
  if (o.emit_metaprogram) std::cout << print_program(transform(tp).program->program);
  if (mode == "template" || both) {
    ExplorationReport r = explore_templates(*tp, source, *ref, config);
    emit(r, o, both);
    std::cout << summary_line(r) << "\n";
    print_decisions(r);
  }
  if (mode == "meta" || both) {
    const Metaprogram mp = transform(tp);
    ExplorationReport r = explore_decisions(mp, source, *ref, config);
    emit(r, o, both);
    std::cout << summary_line(r) << "\n";
    print_decisions(r);
  }
  return kExitOk;
}

struct CorpusResult {
  std::vector<ComparisonRow> rows;
  bool mismatch = false;
};

CorpusResult run_corpus(const fs::path& dir, const Options& o, bool write, bool quiet) {
  CorpusResult out;
  const fs::path diff_dir = o.diff_dir.empty() ? fs::path(o.out) : fs::path(o.diff_dir);
  for (const CorpusCase& c : load_corpus(dir)) {
    LoadedCase loaded;
    try {
      loaded = load_case(c);
    } catch (const BaselineMismatch& e) {
      std::cerr << "mjrepair: " << e.what() << "\n";
      out.mismatch = true;
      continue;
    }
    ComparisonRow row;
    row.bug_id = c.bug_id;
    for (Mode m : {Mode::Template, Mode::Meta}) {
      ExplorationReport r = run_case(loaded, m, config_of(o));
      if (write) {
        write_diffs(r, diff_dir);
        write_atomic(fs::path(o.out) / (c.bug_id + "." + std::string(mode_name(m)) + ".json"), report_to_json(r));
      }
      if (!quiet) std::cout << summary_line(r) << "\n";
      (m == Mode::Template ? row.template_mode : row.meta_mode) = stats_of(r);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<ComparisonRow> rows_from_reports(const fs::path& dir) {
  std::map<std::string, ComparisonRow> rows;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string bug;
    Mode mode;
    const ModeStats s = stats_from_json(read_text(f), &bug, &mode);
    ComparisonRow& row = rows[bug];
    row.bug_id = bug;
    (mode == Mode::Template ? row.template_mode : row.meta_mode) = s;
  }
  std::vector<ComparisonRow> out;
  for (auto& [_, r] : rows) out.push_back(std::move(r));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null dereference repair for MJ programs"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--budget", o.budget, "step budget per run")->check(CLI::PositiveNumber);
    cmd->add_option("--ctor-depth", o.ctor_depth, "nesting limit for constructed objects")->check(CLI::PositiveNumber);
    cmd->add_flag("--serial", o.serial, "run candidates on one thread");
  };

  std::string file, test, mode = "both";
  auto* repair = app.add_subcommand("repair", "repair the NPE raised by one test");
  repair->add_option("file", file, "MJ source file")->required()->check(CLI::ExistingFile);
  repair->add_option("--test", test, "failing test method")->required();
  repair->add_option("--mode", mode, "meta, template or both")->check(CLI::IsMember({"meta", "template", "both"}));
  repair->add_option("--report", o.report, "write the JSON report here");
  repair->add_option("--diff-dir", o.diff_dir, "write one diff per tentative patch under this directory");
  repair->add_flag("--trace", o.trace, "print the baseline run trace as JSON lines");
  repair->add_flag("--emit-metaprogram", o.emit_metaprogram, "print the instrumented program");
  add_common(repair);

  std::string corpus_dir;
  auto* corpus = app.add_subcommand("corpus", "run or compare a corpus");
  corpus->require_subcommand(1);
  auto* corpus_run = corpus->add_subcommand("run", "repair every case in both modes");
  corpus_run->add_option("dir", corpus_dir, "directory with cases.json")->required()->check(CLI::ExistingDirectory);
  corpus_run->add_option("--out", o.out, "directory for reports");
  corpus_run->add_option("--diff-dir", o.diff_dir, "directory for diffs (default: --out)");
  add_common(corpus_run);
  auto* corpus_compare = corpus->add_subcommand("compare", "tabulate both modes per case");
  corpus_compare->add_option("dir", corpus_dir, "corpus directory or directory of reports")
      ->required()
      ->check(CLI::ExistingDirectory);
  corpus_compare->add_flag("--csv", o.csv, "print CSV instead of an aligned table");
  add_common(corpus_compare);

  std::string show_file;
  auto* show = app.add_subcommand("show-metaprogram", "print the instrumented program");
  show->add_option("file", show_file, "MJ source file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*repair) return cmd_repair(file, test, mode, o);
    if (*show) {
      const std::string source = read_text(show_file);
      std::cout << print_program(transform(compile(source, fs::path(show_file).filename().string())).program->program);
      return kExitOk;
    }
    if (*corpus_run) {
      CorpusResult r = run_corpus(corpus_dir, o, true, false);
      std::cout << "\n" << format_comparison(compare_modes(r.rows));
      return r.mismatch ? kExitBaseline : kExitOk;
    }
    if (*corpus_compare) {
      std::vector<ComparisonRow> rows;
      bool mismatch = false;
      if (fs::exists(fs::path(corpus_dir) / "cases.json")) {
        CorpusResult r = run_corpus(corpus_dir, o, false, true);
        rows = std::move(r.rows);
        mismatch = r.mismatch;
      } else {
        rows = rows_from_reports(corpus_dir);
      }
      const Comparison c = compare_modes(std::move(rows));
      std::cout << (o.csv ? format_comparison_csv(c) : format_comparison(c));
      return mismatch ? kExitBaseline : kExitOk;
    }
  } catch (const SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const CompileError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << format_diagnostic(d) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "mjrepair: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
