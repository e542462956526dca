#include "drwps/summary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "drwps/errors.hpp"
#include "drwps/text.hpp"
#include "drwps/version.hpp"

namespace drwps {

namespace {

std::vector<std::string> split_cells(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      return cells;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool is_missing(const std::string& cell) { return trim(cell).empty(); }

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::vector<std::string> cells = split_cells(stripped);
    if (!have_header) {
      table.columns = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.columns.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw ParseError("missing CSV header line");
  return table;
}

SummaryTable summarize_table(const CsvTable& in, const std::vector<std::string>& group_by) {
  if (in.rows.empty()) throw ConfigError("no data rows to summarize");

  std::vector<std::size_t> key_cols;
  key_cols.reserve(group_by.size());
  for (const std::string& name : group_by) {
    const auto it = std::find(in.columns.begin(), in.columns.end(), name);
    if (it == in.columns.end()) throw ConfigError("unknown group-by column '" + name + "'");
    key_cols.push_back(static_cast<std::size_t>(it - in.columns.begin()));
  }

  // A column is numeric when every non-empty cell parses as a double and at
  // least one such cell exists. Group-by columns are keys, never fields.
  std::vector<std::size_t> field_cols;
  SummaryTable out;
  out.group_by = group_by;
  for (std::size_t c = 0; c < in.columns.size(); ++c) {
    if (std::find(key_cols.begin(), key_cols.end(), c) != key_cols.end()) continue;
    bool numeric = true;
    bool any = false;
    for (const auto& row : in.rows) {
      if (is_missing(row[c])) continue;
      if (!parse_double(trim(row[c]))) {
        numeric = false;
        break;
      }
      any = true;
    }
    if (numeric && any) {
      field_cols.push_back(c);
      out.fields.push_back(in.columns[c]);
    }
  }

  struct Accum {
    std::uint64_t count = 0;
    std::uint64_t missing = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::map<std::vector<std::string>, std::vector<Accum>> groups;
  for (const auto& row : in.rows) {
    std::vector<std::string> key;
    key.reserve(key_cols.size());
    for (std::size_t c : key_cols) key.push_back(row[c]);
    auto [it, inserted] = groups.try_emplace(std::move(key));
    if (inserted) it->second.resize(field_cols.size());
    for (std::size_t f = 0; f < field_cols.size(); ++f) {
      const std::string& cell = row[field_cols[f]];
      Accum& a = it->second[f];
      if (is_missing(cell)) {
        ++a.missing;
        continue;
      }
      const double v = *parse_double(trim(cell));
      ++a.count;
      a.sum += v;
      a.sum_sq += v * v;
    }
  }

  for (auto& [key, accums] : groups) {
    SummaryGroup group;
    group.key = key;
    for (std::size_t f = 0; f < accums.size(); ++f) {
      const Accum& a = accums[f];
      SummaryCell cell;
      cell.field = out.fields[f];
      cell.count = a.count;
      cell.missing = a.missing;
      if (a.count > 0) {
        const double n = static_cast<double>(a.count);
        cell.mean = a.sum / n;
        if (a.count > 1) {
          // Centered form avoids the catastrophic cancellation of
          // sum_sq - sum^2/n only for wildly offset data; these are bounded
          // simulation statistics, so the two-pass tradeoff is not worth a
          // second sweep. Clamp to zero for identical values.
          const double var = std::max(0.0, (a.sum_sq - a.sum * a.sum / n) / (n - 1.0));
          cell.sd = std::sqrt(var);
          cell.ci95 = 1.96 * cell.sd / std::sqrt(n);
        }
      }
      group.cells.push_back(std::move(cell));
    }
    out.groups.push_back(std::move(group));
  }
  return out;
}

std::string summary_to_csv(const SummaryTable& table) {
  std::string out = "# drw-pubsub ";
  out += kVersion;
  out += '\n';
  for (const std::string& name : table.group_by) {
    out += name;
    out += ',';
  }
  out += "field,count,missing,mean,sd,ci95\n";
  for (const SummaryGroup& group : table.groups) {
    for (const SummaryCell& cell : group.cells) {
      for (const std::string& k : group.key) {
        out += k;
        out += ',';
      }
      out += cell.field;
      out += ',';
      out += std::to_string(cell.count);
      out += ',';
      out += std::to_string(cell.missing);
      out += ',';
      out += format_double(cell.mean);
      out += ',';
      out += format_double(cell.sd);
      out += ',';
      out += format_double(cell.ci95);
      out += '\n';
    }
  }
  return out;
}

}  // namespace drwps
