#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace drwps {

// Post-processing for result CSV files: group rows by a set of key columns
// and report per-group moments for every numeric column.

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // each row has columns.size() cells
};

// Parses a simple comma-separated table. Lines starting with '#' and blank
// lines are skipped. The first remaining line is the header. Cells never
// contain commas in this format, so no quoting is supported. Throws
// ParseError on a missing header or a row whose cell count does not match
// the header.
CsvTable parse_csv(std::string_view text);

struct SummaryCell {
  std::string field;
  std::uint64_t count = 0;    // values included in the statistics
  std::uint64_t missing = 0;  // empty cells excluded from them
  double mean = 0.0;
  double sd = 0.0;    // sample standard deviation; 0 when count < 2
  double ci95 = 0.0;  // 1.96 * sd / sqrt(count); 0 when count < 2
};

struct SummaryGroup {
  std::vector<std::string> key;    // group-by values, in group_by order
  std::vector<SummaryCell> cells;  // one per numeric field, in column order
};

struct SummaryTable {
  std::vector<std::string> group_by;  // key column names
  std::vector<std::string> fields;    // numeric column names, in input order
  std::vector<SummaryGroup> groups;   // sorted lexicographically by key
};

// Groups rows by the named columns and computes count, mean, sample standard
// deviation and a 95% normal-approximation confidence half-width for every
// numeric column. A column is numeric when it has at least one non-empty
// cell and all its non-empty cells parse as doubles; other columns are
// ignored. Empty cells are excluded and counted per group as `missing`.
// Throws ConfigError when a group-by column does not exist or the table has
// no data rows.
SummaryTable summarize_table(const CsvTable& in, const std::vector<std::string>& group_by);

// Long-format CSV: one row per (group, field), preceded by the same
// `# drw-pubsub <version>` comment line the runner emits.
std::string summary_to_csv(const SummaryTable& table);

}  // namespace drwps
