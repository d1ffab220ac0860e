#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spdc/designer.hpp"
#include "spdc/materials.hpp"
#include "spdc/observables.hpp"
#include "spdc/pump.hpp"
#include "spdc/stack.hpp"

namespace spdc {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct TransmissionSettings {
  SpectrumVariable variable = SpectrumVariable::Theta;
  Range theta_deg{0.0, 89.9};  // swept or fixed (lo) angle
  double wavelength_nm = 800.0;  // fixed wavelength for angle sweeps
  Range wavelength_nm_range{350.0, 1000.0};
  std::size_t points = 1000;
};

struct SpectrumSettings {
  Range two_omega{0.8, 1.2};
  Range theta_deg{0.0, 89.5};
  double psi_deg = 0.0;
  std::size_t n_omega = 256;
  std::size_t n_theta = 256;
  ChannelSelection selection;
};

struct ProfileSettings {
  Range two_omega{0.8, 1.2};
  std::size_t n_omega = 1281;
  Range theta_deg{0.0, 89.5};
  std::size_t n_theta = 180;
  std::size_t n_psi = 37;  // over [−90°, 90°]
  ChannelSelection selection;
  bool normalize = true;
  RingRule rings;
};

struct CorrAreaSettings {
  double theta_s0_deg = 0.0;
  double psi_s0_deg = 0.0;
  Range two_omega{0.8, 1.2};
  std::size_t n_omega = 4001;
  double half_theta_deg = 5.0;
  double half_psi_deg = 2.0;
  std::size_t n_theta = 128;
  std::size_t n_psi = 33;
  ChannelSelection selection;
  double island_threshold = 0.05;
};

struct SweepSettings {
  std::string material_a = "GaN";
  std::string material_b = "AlN";
  int n_layers = 11;
  PeakSide side = PeakSide::Lower;
  std::vector<double> L_grid = default_L_grid();
  MonitorOptions monitor;
  PinOptions pin;
  std::size_t top_k = 5;
};

/// How the structure was specified, kept for round-tripping.
struct StructureSpec {
  bool shorthand = false;
  std::string material_a, material_b;
  int n_layers = 0;
  double l_a_nm = 0.0, l_b_nm = 0.0;
  std::vector<std::pair<std::string, double>> layers_nm;  // explicit form
  std::optional<PeakSide> design_peak;  // checked by `validate` when set
};

struct RunConfig {
  std::filesystem::path source;  // config file, for relative paths
  std::filesystem::path materials_path;
  MaterialDb materials;
  StructureSpec structure_spec;
  Stack structure;
  PumpConfig pump;
  IndexModel index_model = IndexModel::Isotropic;
  int threads = 0;
  std::optional<TransmissionSettings> transmission;
  std::optional<SpectrumSettings> spectrum;
  std::optional<ProfileSettings> profile;
  std::optional<CorrAreaSettings> corr_area;
  std::optional<SweepSettings> design_sweep;
  std::uint64_t hash = 0;  // FNV-1a of the config bytes
};

/// Parses and fully validates a run configuration. Unknown keys, wrong
/// types and out-of-range values throw ConfigError naming the key path.
/// Relative material paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical YAML for a structure; parse → emit → parse is exact.
std::string emit_structure(const StructureSpec& spec);
StructureSpec parse_structure(const std::string& yaml_text);
Stack build_structure(const StructureSpec& spec, const MaterialDb& db);

}  // namespace spdc
