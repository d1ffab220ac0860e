#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace spdc {

struct SellmeierTerm {
  double strength;      // B_i (dimensionless)
  double resonance_um;  // C_i (µm); contributes B λ² / (λ² - C²)
};

/// n²(λ) = a0 + Σ B_i λ² / (λ² − C_i²), λ in µm. A model with no terms is
/// dispersion-free with n = √a0. Evaluation outside the validity window
/// throws OutOfRange instead of extrapolating.
class DispersionModel {
 public:
  DispersionModel() = default;
  DispersionModel(double a0, std::vector<SellmeierTerm> terms, double min_um,
                  double max_um);

  static DispersionModel constant(double n);

  double index_at_wavelength_um(double lambda_um) const;
  double index_at_omega(double omega) const;

  bool in_range_um(double lambda_um) const {
    return lambda_um >= min_um_ && lambda_um <= max_um_;
  }
  double min_um() const { return min_um_; }
  double max_um() const { return max_um_; }
  double a0() const { return a0_; }
  const std::vector<SellmeierTerm>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

 private:
  double a0_ = 1.0;
  std::vector<SellmeierTerm> terms_;
  double min_um_ = 0.0;
  double max_um_ = 1e9;
};

using DTensor = std::array<std::array<std::array<double, 3>, 3>, 3>;
using DContracted = std::array<std::array<double, 6>, 3>;

/// Expands a 3×6 contracted (Voigt) matrix into d_ijk with d_ijk = d_ikj.
DTensor expand_contracted(const DContracted& d);

enum class Axis { Ordinary, Extraordinary };

struct Material {
  std::string name;
  DispersionModel n_ordinary;
  DispersionModel n_extraordinary;
  DContracted d_contracted{};  // pm/V
  DTensor d{};                 // pm/V, expanded from d_contracted
  bool is_nonlinear = false;

  /// Largest |d_ijk|, the coefficient of the ideal reference emitter.
  double max_abs_d() const;
};

using MaterialPtr = std::shared_ptr<const Material>;

MaterialPtr make_material(std::string name, DispersionModel n_o,
                          DispersionModel n_e, const DContracted& d = {});
MaterialPtr make_isotropic(std::string name, double n,
                           const DContracted& d = {});
MaterialPtr air();

double refractive_index(const Material& m, Axis axis, double omega);

/// Index seen by a TM wave propagating at internal angle theta to the optic
/// axis (z) of a uniaxial crystal: 1/n² = cos²θ/n_o² + sin²θ/n_e².
double effective_tm_index(const Material& m, double omega, double theta);
double effective_tm_index(double n_o, double n_e, double theta);

/// Immutable after load; shareable across threads.
class MaterialDb {
 public:
  MaterialDb();  // contains "air" only

  static MaterialDb load(const std::filesystem::path& path);
  static MaterialDb from_yaml_string(const std::string& text);

  void add(MaterialPtr m);
  MaterialPtr get(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, MaterialPtr> by_name_;
};

}  // namespace spdc
