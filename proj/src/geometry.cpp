#include "spdc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "spdc/constants.hpp"

namespace spdc {

std::array<double, 2> transverse_k(double omega, double theta, double psi) {
  const double k = omega / PhysicalConstants::c * std::sin(theta);
  return {-k * std::sin(psi), k * std::cos(psi)};
}

IdlerDirection idler_direction(double omega_p, double theta_p, double psi_p,
                               double omega_s, double theta_s, double psi_s) {
  IdlerDirection out;
  const double omega_i = omega_p - omega_s;
  if (!(omega_i > 0.0)) {
    out.evanescent = true;
    return out;
  }
  if (theta_p == 0.0) {
    const double s = omega_s == omega_i ? -std::sin(theta_s)
                                        : -(omega_s / omega_i) * std::sin(theta_s);
    out.psi = psi_s;
    if (std::abs(s) > 1.0) {
      out.evanescent = true;
      return out;
    }
    out.theta = omega_s == omega_i ? -theta_s : std::asin(s);
    return out;
  }
  // ω sinϑ units; c cancels.
  const double px = -omega_p * std::sin(theta_p) * std::sin(psi_p);
  const double py = omega_p * std::sin(theta_p) * std::cos(psi_p);
  const double sx = -omega_s * std::sin(theta_s) * std::sin(psi_s);
  const double sy = omega_s * std::sin(theta_s) * std::cos(psi_s);
  const double vx = px - sx, vy = py - sy;
  if (vy != 0.0) {
    out.psi = std::atan(-vx / vy);
  } else {
    out.psi = vx == 0.0 ? 0.0 : kPi / 2;
  }
  const double s = (-vx * std::sin(out.psi) + vy * std::cos(out.psi)) / omega_i;
  if (std::abs(s) > 1.0) {
    out.evanescent = true;
    return out;
  }
  out.theta = std::asin(s);
  return out;
}

Vec3 polarization_vector(Polarization pol, Direction dir, double sin_theta,
                         double cos_theta, double psi) {
  const double sp = std::sin(psi), cp = std::cos(psi);
  if (pol == Polarization::TE) return {cp, sp, 0.0};
  const double z = dir == Direction::F ? -sin_theta : sin_theta;
  return {-cos_theta * sp, cos_theta * cp, z};
}

Vec3 wave_direction(Direction dir, double sin_theta, double cos_theta, double psi) {
  const double sp = std::sin(psi), cp = std::cos(psi);
  const double z = dir == Direction::F ? cos_theta : -cos_theta;
  return {-sin_theta * sp, sin_theta * cp, z};
}

double detector_angle(double theta, double psi) {
  if (psi == 0.0) return 0.0;
  const double s = std::sin(psi), t = std::tan(theta);
  const double arg = std::cos(psi) / std::sqrt(1.0 + s * s * t * t);
  return std::acos(std::min(1.0, arg)) * (psi > 0.0 ? 1.0 : -1.0);
}

std::array<cdouble, 2> to_detector_basis(cdouble te, cdouble tm, double zeta) {
  const double c = std::cos(zeta), s = std::sin(zeta);
  return {c * te - s * tm, s * te + c * tm};
}

}  // namespace spdc
