#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "spdc/materials.hpp"
#include "spdc/stack.hpp"

namespace spdc::test {

inline std::filesystem::path data_dir() { return SPDC_TEST_DATA_DIR; }
inline std::filesystem::path config_dir() { return SPDC_TEST_CONFIG_DIR; }

inline const MaterialDb& shipped_db() {
  static const MaterialDb db = MaterialDb::load(data_dir() / "materials.yaml");
  return db;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("spdc-" + tag + "-" + std::to_string(rng() % 1000000007ULL));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Lossless random stack of dispersion-free layers.
inline Stack random_stack(std::mt19937_64& rng, int max_layers) {
  std::uniform_int_distribution<int> count(1, max_layers);
  std::uniform_real_distribution<double> index(1.2, 3.5);
  std::uniform_real_distribution<double> length(20e-9, 400e-9);
  std::vector<Layer> layers;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    layers.push_back({make_isotropic("m" + std::to_string(i), index(rng)), length(rng)});
  }
  return Stack(std::move(layers));
}

}  // namespace spdc::test
