#include "spdc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "spdc/error.hpp"

namespace spdc {

std::string format_g17(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::Io, "rename to " + path.string() + " failed: " + ec.message());
}

std::string CsvTable::render() const {
  std::string body;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) body += ',';
    body += columns[i];
  }
  for (const auto& c : text_columns) body += "," + c;
  body += '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) body += ',';
      body += format_g17(row[i]);
    }
    if (r < text_rows.size()) {
      for (const auto& t : text_rows[r]) body += "," + t;
    }
    body += '\n';
  }
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
  out += "# body_fnv1a=" + body_hash(body) + "\n";
  return out + body;
}

std::string body_hash(std::string_view body) {
  Fnv1a h;
  h.update(body);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

}  // namespace spdc
