#include "mj/repair/report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace mj::repair {

using nlohmann::ordered_json;

std::string_view mode_name(Mode m) { return m == Mode::Template ? "template" : "meta"; }

Mode mode_from_name(std::string_view name) {
  if (name == "template") return Mode::Template;
  if (name == "meta") return Mode::Meta;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(PatchCheck c) {
  switch (c) {
    case PatchCheck::NotChecked: return "not-checked";
    case PatchCheck::Agrees: return "agrees";
    case PatchCheck::Diverges: return "diverges";
    case PatchCheck::Unsynthesizable: return "unsynthesizable";
  }
  return "?";
}

std::string_view to_string(FilterReason r) {
  return r == FilterReason::NullValued ? "NullValued" : "DuplicateValue";
}

std::string DecisionResult::verdict() const { return valid ? "valid" : "invalid: " + outcome.summary(); }

int ExplorationReport::unsynthesizable() const {
  return static_cast<int>(std::count_if(decisions.begin(), decisions.end(), [](const DecisionResult& d) {
    return d.check == PatchCheck::Unsynthesizable;
  }));
}

int ExplorationReport::divergences() const {
  return static_cast<int>(std::count_if(decisions.begin(), decisions.end(), [](const DecisionResult& d) {
    return d.check == PatchCheck::Diverges;
  }));
}

std::string report_to_json(const ExplorationReport& r) {
  ordered_json j;
  j["bugId"] = r.bug_id;
  j["mode"] = mode_name(r.mode);
  j["test"] = r.test;
  j["siteId"] = r.site_id;
  j["candidates"] = r.candidates;
  j["tentative"] = r.tentative;
  j["valid"] = r.valid;
  j["elapsedMs"] = r.elapsed_ms;
  j["steps"] = r.steps;
  j["decisions"] = ordered_json::array();
  for (const DecisionResult& d : r.decisions) {
    ordered_json e;
    e["id"] = d.id;
    e["strategy"] = strategy_id(d.decision.strategy);
    e["description"] = strategy_description(d.decision.strategy);
    e["param"] = param_text(d.decision.param);
    e["verdict"] = d.verdict();
    e["steps"] = d.steps;
    e["diff"] = d.diff_path.empty() ? ordered_json(nullptr) : ordered_json(d.diff_path);
    e["patchCheck"] = to_string(d.check);
    j["decisions"].push_back(std::move(e));
  }
  j["filteredOut"] = ordered_json::array();
  for (const FilteredDecision& f : r.filtered_out) {
    ordered_json e;
    e["strategy"] = strategy_id(f.decision.strategy);
    e["param"] = param_text(f.decision.param);
    e["reason"] = to_string(f.reason);
    if (!f.detail.empty()) e["detail"] = f.detail;
    j["filteredOut"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

ModeStats stats_of(const ExplorationReport& r) {
  return {static_cast<double>(r.tentative), static_cast<double>(r.valid), r.elapsed_ms,
          static_cast<double>(r.steps)};
}

ModeStats stats_from_json(const std::string& json_text, std::string* bug_id, Mode* mode) {
  const auto j = nlohmann::json::parse(json_text);
  if (bug_id) *bug_id = j.at("bugId").get<std::string>();
  if (mode) *mode = mode_from_name(j.at("mode").get<std::string>());
  return {j.at("tentative").get<double>(), j.at("valid").get<double>(), j.at("elapsedMs").get<double>(),
          j.at("steps").get<double>()};
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

using Column = double ModeStats::*;
constexpr Column kColumns[] = {&ModeStats::tentative, &ModeStats::valid, &ModeStats::elapsed_ms, &ModeStats::steps};

}  // namespace

Comparison compare_modes(std::vector<ComparisonRow> rows) {
  Comparison c;
  c.rows = std::move(rows);
  c.total.bug_id = "Total";
  c.average.bug_id = "Average";
  c.median.bug_id = "Median";
  const double n = static_cast<double>(c.rows.size());
  for (ModeStats ComparisonRow::*mode : {&ComparisonRow::template_mode, &ComparisonRow::meta_mode}) {
    for (Column col : kColumns) {
      std::vector<double> values;
      double sum = 0;
      for (const ComparisonRow& r : c.rows) {
        values.push_back(r.*mode.*col);
        sum += r.*mode.*col;
      }
      c.total.*mode.*col = sum;
      c.average.*mode.*col = n > 0 ? sum / n : 0;
      c.median.*mode.*col = median_of(std::move(values));
    }
  }
  return c;
}

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::vector<std::string> cells(const ComparisonRow& r, bool footer) {
  const int d = footer ? 2 : 0;
  return {r.bug_id,
          fmt(r.template_mode.tentative, d),
          fmt(r.template_mode.valid, d),
          fmt(r.template_mode.elapsed_ms, footer ? 2 : 1),
          fmt(r.template_mode.steps, d),
          fmt(r.meta_mode.tentative, d),
          fmt(r.meta_mode.valid, d),
          fmt(r.meta_mode.elapsed_ms, footer ? 2 : 1),
          fmt(r.meta_mode.steps, d)};
}

const std::vector<std::string> kHeader = {"bug",          "tpl.tentative", "tpl.valid",
                                          "tpl.ms",       "tpl.steps",     "meta.tentative",
                                          "meta.valid",   "meta.ms",       "meta.steps"};

}  // namespace

std::string format_comparison(const Comparison& c) {
  std::vector<std::vector<std::string>> table{kHeader};
  for (const auto& r : c.rows) table.push_back(cells(r, false));
  const std::size_t footer_at = table.size();
  table.push_back(cells(c.total, false));
  table.push_back(cells(c.average, true));
  table.push_back(cells(c.median, true));

  std::vector<std::size_t> width(kHeader.size(), 0);
  for (const auto& row : table)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());

  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += "  ";
      const std::string pad(width[i] - row[i].size(), ' ');
      out += i == 0 ? row[i] + pad : pad + row[i];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  auto rule = [&] {
    std::size_t total = 0;
    for (std::size_t w : width) total += w + 2;
    out += std::string(total - 2, '-') + '\n';
  };
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i == 1 || i == footer_at) rule();
    emit(table[i]);
  }
  return out;
}

std::string format_comparison_csv(const Comparison& c) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  emit(kHeader);
  for (const auto& r : c.rows) emit(cells(r, false));
  emit(cells(c.total, false));
  emit(cells(c.average, true));
  emit(cells(c.median, true));
  return out;
}

}  // namespace mj::repair
