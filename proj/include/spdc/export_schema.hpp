#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace spdc {

// Frozen column layouts of the CSV exports. The plotter depends on these;
// changing one is a format break and needs a new schema version.
inline constexpr std::string_view kSchemaVersion = "1";

struct CsvSchema {
  std::string_view kind;
  std::string_view file;
  std::vector<std::string_view> columns;
};

const std::vector<CsvSchema>& csv_schemas();
const CsvSchema& csv_schema(std::string_view kind);

struct ParsedCsv {
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Parses an export, checks the body hash against "# body_fnv1a" and the
/// header against the schema named in "# schema". Throws Error(Io) on a
/// malformed, truncated or tampered file.
ParsedCsv read_export(std::string_view text);

}  // namespace spdc
