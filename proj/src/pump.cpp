#include "spdc/pump.hpp"

#include <cmath>

#include "spdc/constants.hpp"
#include "spdc/error.hpp"

namespace spdc {

void validate(const PumpConfig& pump) {
  if (!(pump.omega0 > 0.0) || !std::isfinite(pump.omega0)) {
    fail(ErrorCode::InvalidArgument, "pump frequency must be positive");
  }
  if (!(pump.r_p > 0.0)) fail(ErrorCode::InvalidArgument, "r_p must be > 0");
  if (!(pump.detection_half_interval > 0.0)) {
    fail(ErrorCode::InvalidArgument, "detection half-interval T must be > 0");
  }
  if (!(std::abs(pump.theta_p) < kPi / 2) || !(std::abs(pump.psi_p) <= kPi / 2)) {
    fail(ErrorCode::InvalidArgument, "pump incidence angles out of range");
  }
}

TransverseEnvelope::TransverseEnvelope(double r_p) : r_p_(r_p) {
  if (!(r_p > 0.0)) fail(ErrorCode::InvalidArgument, "r_p must be > 0");
}

double TransverseEnvelope::operator()(double kx, double ky) const {
  if (collimated()) fail(ErrorCode::InvalidArgument, "collimated pump has no envelope");
  return r_p_ / std::sqrt(2.0 * kPi) * std::exp(-r_p_ * r_p_ * (kx * kx + ky * ky) / 4.0);
}

double TransverseEnvelope::support_radius() const {
  // |E|² ∝ exp(−r_p² k²/2) = 1e-12
  return std::sqrt(2.0 * 12.0 * std::log(10.0)) / r_p_;
}

TransverseEnvelope transverse_envelope(const PumpConfig& pump) {
  return TransverseEnvelope(pump.r_p);
}

double cw_spectral_weight(const PumpConfig& pump) {
  if (!(pump.detection_half_interval > 0.0)) {
    fail(ErrorCode::InvalidArgument, "detection half-interval T must be > 0");
  }
  return 2.0 * pump.detection_half_interval / (2.0 * kPi);
}

}  // namespace spdc
