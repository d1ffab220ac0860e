#pragma once

#include <limits>

#include "spdc/linear_optics.hpp"

namespace spdc {

inline constexpr double kCollimated = std::numeric_limits<double>::infinity();

struct PumpConfig {
  double omega0 = 0.0;            // carrier, rad/s
  double xi = 1.0;                // amplitude; sets the arbitrary-unit scale only
  double r_p = kCollimated;       // transverse amplitude width, m; inf = plane wave
  double theta_p = 0.0;           // incidence, rad
  double psi_p = 0.0;
  double detection_half_interval = 3.141592653589793;  // T, s
  Polarization polarization = Polarization::TE;

  bool collimated() const { return r_p == kCollimated; }
};

/// Throws InvalidArgument on non-physical values.
void validate(const PumpConfig& pump);

/// Gaussian (r_p/√(2π)) exp(−r_p²(k_x²+k_y²)/4), normalized so that
/// ∫∫|E|² dk_x dk_y = 1. A collimated pump has no finite envelope; callers
/// branch on collimated() and use exact kinematics instead.
class TransverseEnvelope {
 public:
  explicit TransverseEnvelope(double r_p);

  bool collimated() const { return r_p_ == kCollimated; }
  double r_p() const { return r_p_; }
  double operator()(double kx, double ky) const;
  /// k beyond which |E|²/|E(0)|² < 1e-12.
  double support_radius() const;

 private:
  double r_p_;
};

TransverseEnvelope transverse_envelope(const PumpConfig& pump);

/// 2T/(2π): replaces one δ(0) of the cw spectral envelope in densities.
double cw_spectral_weight(const PumpConfig& pump);

}  // namespace spdc
