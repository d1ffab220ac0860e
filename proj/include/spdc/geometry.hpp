#pragma once

#include <array>

#include "spdc/linear_optics.hpp"

namespace spdc {

using Vec3 = std::array<double, 3>;

/// Transverse wave vector of a plane wave (ω, ϑ, ψ) outside the structure:
/// k⊥ = (ω/c) sinϑ (−sinψ, cosψ). ϑ is signed, ψ ∈ [−π/2, π/2].
std::array<double, 2> transverse_k(double omega, double theta, double psi);

struct IdlerDirection {
  double theta = 0.0;
  double psi = 0.0;
  bool evanescent = false;
};

/// Idler direction fixed by k_p⊥ = k_s⊥ + k_i⊥ and ω_i = ω_p − ω_s.
/// At normal pump incidence ψ_i = ψ_s and sinϑ_i = −(ω_s/ω_i) sinϑ_s, so the
/// degenerate case returns ϑ_i = −ϑ_s exactly. Non-positive ω_i is flagged
/// evanescent.
IdlerDirection idler_direction(double omega_p, double theta_p, double psi_p,
                               double omega_s, double theta_s, double psi_s);

/// In-plane unit vector along k⊥ for positive ϑ.
inline Vec3 in_plane_unit(double sin_psi, double cos_psi) { return {-sin_psi, cos_psi, 0.0}; }

/// TE = (cosψ, sinψ, 0) for both directions. TM_F = (cosθ u, −sinθ) and
/// TM_B = (cosθ u, +sinθ) with u = (−sinψ, cosψ, 0) and θ the signed internal
/// angle. Matches the TM convention of TransferChain.
Vec3 polarization_vector(Polarization pol, Direction dir, double sin_theta,
                         double cos_theta, double psi);

/// Wave-vector direction of a (direction, internal angle, ψ) plane wave.
Vec3 wave_direction(Direction dir, double sin_theta, double cos_theta, double psi);

/// ζ(ϑ, ψ) = arccos[cosψ / √(1 + sin²ψ tan²ϑ)] · sign(ψ).
double detector_angle(double theta, double psi);

/// (TE, TM) amplitudes -> (⊥, ∥): φ⊥ = cosζ φ_TE − sinζ φ_TM,
/// φ∥ = sinζ φ_TE + cosζ φ_TM.
std::array<cdouble, 2> to_detector_basis(cdouble te, cdouble tm, double zeta);

}  // namespace spdc
