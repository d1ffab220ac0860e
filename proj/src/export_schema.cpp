#include "spdc/export_schema.hpp"

#include <sstream>

#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

const std::vector<CsvSchema>& csv_schemas() {
  static const std::vector<CsvSchema> schemas = {
      {"transmission", "transmission.csv", {"theta_deg", "T_TE", "T_TM"}},
      {"transmission-omega", "transmission.csv", {"omega_rad_per_s", "T_TE", "T_TM"}},
      {"spectrum", "spectrum.csv", {"two_omega_s_over_omega_p0", "theta_s_deg", "eta_s"}},
      {"profile", "profile.csv", {"theta_s_deg", "psi_s_deg", "n_s_tr"}},
      {"corr-area", "corr_area.csv", {"delta_theta_i_deg", "delta_psi_i_deg", "n_cor"}},
      {"sweep", "sweep.csv", {"L", "l_a_nm", "l_b_nm", "value", "gap_flag", "peak_side"}},
  };
  return schemas;
}

const CsvSchema& csv_schema(std::string_view kind) {
  for (const auto& s : csv_schemas()) {
    if (s.kind == kind) return s;
  }
  fail(ErrorCode::NotFound, "unknown export kind '" + std::string(kind) + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ParsedCsv read_export(std::string_view text) {
  ParsedCsv out;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const auto end = text.find('\n', pos);
    if (end == std::string_view::npos) fail(ErrorCode::Io, "truncated metadata line");
    const std::string line(text.substr(pos + 2, end - pos - 2));
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Io, "malformed metadata line '" + line + "'");
    out.metadata[line.substr(0, eq)] = line.substr(eq + 1);
    pos = end + 1;
  }
  const auto body = text.substr(pos);
  const auto it = out.metadata.find("body_fnv1a");
  if (it == out.metadata.end()) fail(ErrorCode::Io, "missing body hash");
  if (body_hash(body) != it->second) fail(ErrorCode::Io, "body hash mismatch (truncated or edited file)");
  if (body.empty()) fail(ErrorCode::Io, "empty body");

  std::stringstream ss{std::string(body)};
  std::string line;
  std::getline(ss, line);
  out.columns = split(line);
  while (std::getline(ss, line)) {
    auto row = split(line);
    if (row.size() != out.columns.size()) {
      fail(ErrorCode::Io, "row " + std::to_string(out.rows.size() + 1) + " has " +
                              std::to_string(row.size()) + " cells, expected " +
                              std::to_string(out.columns.size()));
    }
    out.rows.push_back(std::move(row));
  }

  if (const auto k = out.metadata.find("schema"); k != out.metadata.end()) {
    const auto& schema = csv_schema(k->second);
    if (out.columns.size() != schema.columns.size()) fail(ErrorCode::Io, "column count differs from schema " + k->second);
    for (std::size_t i = 0; i < out.columns.size(); ++i) {
      if (out.columns[i] != schema.columns[i]) {
        fail(ErrorCode::Io, "column '" + out.columns[i] + "' differs from schema " + k->second);
      }
    }
  }
  return out;
}

}  // namespace spdc
