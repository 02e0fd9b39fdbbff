#pragma once

#include <string>
#include <vector>

#include "fairreg/dataset.hpp"

namespace fairreg::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file with a header row. Double-quoted fields may
/// contain commas and doubled quotes. Throws SchemaError on unreadable files,
/// an empty file or ragged rows.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::string format_csv(const CsvTable& table);

/// Column `group` supplies labels, `target` responses (required only when
/// need_target) and every other column, or exactly `feature_names` when
/// given, the numeric features.
struct LoadedData {
  Dataset data;
  std::vector<std::string> feature_names;
};
LoadedData table_to_dataset(const CsvTable& table, bool need_target,
                            const std::vector<std::string>& feature_names = {});

}  // namespace fairreg::cli
