#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fairreg/error.hpp"

namespace fairreg::cli {

namespace {

std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        any = false;
        break;
      default: field += c; any = true; break;
    }
  }
  if (quoted) throw SchemaError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double parse_number(const std::string& cell, const std::string& column, std::size_t line) {
  std::size_t b = cell.find_first_not_of(" \t");
  std::size_t e = cell.find_last_not_of(" \t");
  const std::string s = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaError("csv line " + std::to_string(line) + ": column '" + column +
                      "' is not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  auto records = split_records(text);
  if (records.empty()) throw SchemaError("csv: empty file");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw SchemaError("csv line " + std::to_string(r + 1) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  auto append = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += quote_if_needed(fields[i]);
    }
    out += '\n';
  };
  append(table.header);
  for (const auto& row : table.rows) append(row);
  return out;
}

LoadedData table_to_dataset(const CsvTable& table, bool need_target,
                            const std::vector<std::string>& feature_names) {
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) return -1;
    if (std::find(std::next(it), table.header.end(), name) != table.header.end()) {
      throw SchemaError("csv: duplicate column '" + name + "'");
    }
    return it - table.header.begin();
  };

  const std::ptrdiff_t group_col = column("group");
  if (group_col < 0) throw SchemaError("csv: missing 'group' column");
  const std::ptrdiff_t target_col = column("target");
  if (need_target && target_col < 0) throw SchemaError("csv: missing 'target' column");
  if (table.rows.empty()) throw SchemaError("csv: no data rows");

  LoadedData out;
  std::vector<std::size_t> feature_cols;
  if (feature_names.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == group_col || static_cast<std::ptrdiff_t>(c) == target_col) {
        continue;
      }
      feature_cols.push_back(c);
      out.feature_names.push_back(table.header[c]);
    }
  } else {
    for (const std::string& name : feature_names) {
      const std::ptrdiff_t c = column(name);
      if (c < 0) throw SchemaError("csv: missing feature column '" + name + "'");
      feature_cols.push_back(static_cast<std::size_t>(c));
    }
    out.feature_names = feature_names;
  }

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  out.data.features.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  out.data.responses = Eigen::VectorXd::Zero(n);
  out.data.groups.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto i = static_cast<Eigen::Index>(r);
    const std::string& label = row[static_cast<std::size_t>(group_col)];
    if (label.empty()) throw SchemaError("csv line " + std::to_string(r + 2) + ": empty group label");
    out.data.groups.push_back(label);
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      out.data.features(i, static_cast<Eigen::Index>(k)) =
          parse_number(row[feature_cols[k]], table.header[feature_cols[k]], r + 2);
    }
    if (target_col >= 0) {
      out.data.responses(i) = parse_number(row[static_cast<std::size_t>(target_col)], "target", r + 2);
    }
  }
  if (!out.data.features.allFinite() || !out.data.responses.allFinite()) {
    throw SchemaError("csv: non-finite numeric value");
  }
  return out;
}

}  // namespace fairreg::cli
