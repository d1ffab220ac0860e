#pragma once

#include <numbers>

namespace spdc {

// CODATA 2018 exact / recommended values.
struct PhysicalConstants {
  static constexpr double c = 299792458.0;              // m/s
  static constexpr double hbar = 1.054571817e-34;       // J s
  static constexpr double eps0 = 8.8541878128e-12;      // F/m
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDeg = kPi / 180.0;

/// Angular frequency of a vacuum wavelength given in meters.
constexpr double omega_from_wavelength(double lambda_m) {
  return 2.0 * kPi * PhysicalConstants::c / lambda_m;
}

constexpr double wavelength_from_omega(double omega) {
  return 2.0 * kPi * PhysicalConstants::c / omega;
}

}  // namespace spdc
