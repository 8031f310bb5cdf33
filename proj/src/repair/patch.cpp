#include "mj/repair/patch.hpp"

#include <algorithm>
#include <sstream>

#include "mj/parser.hpp"
#include "mj/repair/rewrite.hpp"

namespace mj::repair {

namespace {

constexpr int kContext = 3;
constexpr std::string_view kNoNewline = "\\ No newline at end of file";

// Lines keep their terminator; only the last may lack one.
std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    out.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

enum class Op : std::uint8_t { Keep, Del, Add };

struct Edit {
  Op op;
  int a;  // index in original (Keep/Del)
  int b;  // index in patched (Keep/Add)
};

// Edit script from a longest common subsequence of the middle section left
// after trimming the common prefix and suffix.
std::vector<Edit> edit_script(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  int pre = 0;
  while (pre < n && pre < m && a[pre] == b[pre]) ++pre;
  int suf = 0;
  while (suf < n - pre && suf < m - pre && a[n - 1 - suf] == b[m - 1 - suf]) ++suf;

  std::vector<Edit> out;
  for (int i = 0; i < pre; ++i) out.push_back({Op::Keep, i, i});

  const int rn = n - pre - suf;
  const int rm = m - pre - suf;
  std::vector<std::vector<int>> lcs(rn + 1, std::vector<int>(rm + 1, 0));
  for (int i = rn - 1; i >= 0; --i)
    for (int j = rm - 1; j >= 0; --j)
      lcs[i][j] = a[pre + i] == b[pre + j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  int i = 0, j = 0;
  while (i < rn || j < rm) {
    if (i < rn && j < rm && a[pre + i] == b[pre + j]) {
      out.push_back({Op::Keep, pre + i, pre + j});
      ++i;
      ++j;
    } else if (j < rm && (i == rn || lcs[i][j + 1] >= lcs[i + 1][j])) {
      out.push_back({Op::Add, -1, pre + j});
      ++j;
    } else {
      out.push_back({Op::Del, pre + i, -1});
      ++i;
    }
  }
  for (int k = 0; k < suf; ++k) out.push_back({Op::Keep, n - suf + k, m - suf + k});

  // Within a run of changes, list deletions before additions.
  std::vector<Edit> ordered;
  std::size_t k = 0;
  while (k < out.size()) {
    if (out[k].op == Op::Keep) {
      ordered.push_back(out[k++]);
      continue;
    }
    std::size_t e = k;
    while (e < out.size() && out[e].op != Op::Keep) ++e;
    for (std::size_t x = k; x < e; ++x)
      if (out[x].op == Op::Del) ordered.push_back(out[x]);
    for (std::size_t x = k; x < e; ++x)
      if (out[x].op == Op::Add) ordered.push_back(out[x]);
    k = e;
  }
  return ordered;
}

std::string range(int start, int count) {
  if (count == 1) return std::to_string(start + 1);
  return std::to_string(count == 0 ? start : start + 1) + "," + std::to_string(count);
}

}  // namespace

std::string emit_unified_diff(std::string_view original, std::string_view patched, const std::string& path) {
  if (original == patched) return "";
  const std::vector<std::string> a = split_lines(original);
  const std::vector<std::string> b = split_lines(patched);
  const std::vector<Edit> edits = edit_script(a, b);

  // Lines of each side consumed before edit i.
  std::vector<int> a_before(edits.size() + 1, 0), b_before(edits.size() + 1, 0);
  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    a_before[i + 1] = a_before[i] + (edits[i].op != Op::Add);
    b_before[i + 1] = b_before[i] + (edits[i].op != Op::Del);
    if (edits[i].op != Op::Keep) changes.push_back(i);
  }

  std::string out = "--- a/" + path + "\n+++ b/" + path + "\n";
  std::size_t c = 0;
  while (c < changes.size()) {
    std::size_t last = c;
    while (last + 1 < changes.size() && changes[last + 1] - changes[last] <= 2 * kContext + 1) ++last;
    const std::size_t begin = changes[c] >= kContext ? changes[c] - kContext : 0;
    const std::size_t end = std::min(edits.size(), changes[last] + kContext + 1);

    std::string body;
    for (std::size_t i = begin; i < end; ++i) {
      const Edit& e = edits[i];
      const std::string& text = e.op == Op::Add ? b[e.b] : a[e.a];
      body += e.op == Op::Keep ? ' ' : e.op == Op::Del ? '-' : '+';
      body += text;
      if (text.empty() || text.back() != '\n') body += "\n" + std::string(kNoNewline) + "\n";
    }
    out += "@@ -" + range(a_before[begin], a_before[end] - a_before[begin]) + " +" +
           range(b_before[begin], b_before[end] - b_before[begin]) + " @@\n" + body;
    c = last + 1;
  }
  return out;
}

std::string apply_patch(std::string_view original, std::string_view diff) {
  const std::vector<std::string> a = split_lines(original);
  const std::vector<std::string> lines = split_lines(diff);
  std::string out;
  std::size_t pos = 0;  // next unconsumed original line
  std::size_t i = 0;

  auto strip = [](std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
  };
  auto parse_range = [](const std::string& spec) {
    const std::size_t comma = spec.find(',');
    const int start = std::stoi(spec.substr(0, comma));
    const int count = comma == std::string::npos ? 1 : std::stoi(spec.substr(comma + 1));
    return std::pair<int, int>(start, count);
  };

  while (i < lines.size()) {
    const std::string line = strip(lines[i]);
    if (line.empty() || line[0] == '#' || line.rfind("--- ", 0) == 0 || line.rfind("+++ ", 0) == 0) {
      ++i;
      continue;
    }
    if (line.rfind("@@ -", 0) != 0) throw HunkMismatch("unexpected diff line: " + line);
    std::istringstream header(line.substr(3));
    std::string old_spec;
    header >> old_spec;
    const auto [old_start, old_count] = parse_range(old_spec.substr(1));
    const std::size_t first = static_cast<std::size_t>(old_count == 0 ? old_start : old_start - 1);
    if (first < pos || first > a.size()) throw HunkMismatch("hunk out of order: " + line);
    while (pos < first) out += a[pos++];
    ++i;
    while (i < lines.size()) {
      const std::string& h = lines[i];
      if (h.empty() || (h[0] != ' ' && h[0] != '-' && h[0] != '+')) break;
      std::string text = h.substr(1);
      if (i + 1 < lines.size() && lines[i + 1].rfind(kNoNewline, 0) == 0) {
        text = strip(text);
        ++i;
      }
      if (h[0] != '+') {
        if (pos >= a.size() || a[pos] != text)
          throw HunkMismatch("context mismatch at original line " + std::to_string(pos + 1));
        ++pos;
      }
      if (h[0] != '-') out += text;
      ++i;
    }
  }
  while (pos < a.size()) out += a[pos++];
  return out;
}

Patch decision_to_patch(const TypedProgram& tp, std::string_view source, const Decision& d, const std::string& path) {
  Patch p;
  p.decision = d;
  p.span = tp.sites.at(d.site_id).stmt_span;
  p.patched_source = splice_rewrite(tp, source, d, true);
  CheckResult r;
  try {
    r = typecheck(parse(p.patched_source, path));
  } catch (const SyntaxError& e) {
    throw Unsynthesizable(std::string("patched source does not parse: ") + e.what());
  }
  if (!r.ok()) throw Unsynthesizable("patched source does not compile: " + format_diagnostic(r.diagnostics.front()));
  p.diff = emit_unified_diff(source, p.patched_source, path);
  return p;
}

}  // namespace mj::repair
