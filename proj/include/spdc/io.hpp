#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spdc {

class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  void update(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffU;
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// 17 significant digits, round-trip safe.
std::string format_g17(double v);
/// Shortest representation that round-trips.
std::string format_shortest(double v);

/// Writes via a sibling temporary file and rename(2).
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;  // "# key=value"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Optional per-row text columns appended after the numeric ones.
  std::vector<std::string> text_columns;
  std::vector<std::vector<std::string>> text_rows;

  /// Metadata lines, then "# body_fnv1a=<hex>" over the header row and data.
  std::string render() const;
};

/// 16 hex digits of the FNV-1a hash of `body`.
std::string body_hash(std::string_view body);

}  // namespace spdc
