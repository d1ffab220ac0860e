#pragma once

#include <array>
#include <string>
#include <vector>

#include "spdc/two_photon.hpp"

namespace spdc {

/// Which channels and detector polarizations enter a density. Polarization
/// index 0 is ⊥, 1 is ∥; -1 sums over both.
struct ChannelSelection {
  unsigned channel_mask = channel_bit(Channel::FF);
  int signal_pol = -1;
  int idler_pol = -1;

  bool includes(Channel c, int sig, int idl) const {
    return (channel_mask & channel_bit(c)) && (signal_pol < 0 || signal_pol == sig) &&
           (idler_pol < 0 || idler_pol == idl);
  }
};

/// Parses "FF", "FF:perp,par", "all", "FF+FB:any,perp".
ChannelSelection parse_selection(const std::string& text);
std::string to_string(const ChannelSelection& s);

/// n = cw · |φ|² per grid point and channel/polarization pair.
struct PairDensity {
  AmplitudeGrid grid;
  bool collimated = true;
  double cw_weight = 1.0;
  double omega_p0 = 0.0;
  std::vector<std::array<double, 16>> values;  // same indexing as TwoPhotonAmplitude
  std::vector<IdlerDirection> idler;

  double selected(std::size_t k, const ChannelSelection& sel) const;
};

PairDensity pair_density(const TwoPhotonAmplitude& phi);

/// Mean signal-photon density over (ω_s, ϑ_s, ψ_s), row-major. The idler is
/// integrated with the measure |sinϑ_i| dϑ_i dψ_i ω_i²/c²; for a collimated
/// pump the transverse δ-functions leave the factor 1/cosϑ_i.
struct SignalDensity {
  std::vector<double> omega_s, theta_s, psi_s;
  std::vector<double> values;

  std::size_t index(std::size_t w, std::size_t t, std::size_t p) const {
    return (w * theta_s.size() + t) * psi_s.size() + p;
  }
};

SignalDensity signal_density(const PairDensity& pd, const ChannelSelection& sel = {});

/// n_s^ref(ω_s) = cw · (ξ w S_ref)² for the ideal emitter with the same
/// nonlinear lengths. Throws NoNonlinearLayer for an all-linear stack.
std::vector<double> reference_density(const TwoPhotonEngine& engine,
                                      const std::vector<double>& omega_s);

/// η = n_s / n_s^ref pointwise.
SignalDensity relative_density(const SignalDensity& ns, const std::vector<double>& ref);

struct Maximum {
  double value = 0.0;
  std::size_t w = 0, t = 0, p = 0;
};
Maximum grid_maximum(const SignalDensity& d);

/// ∫ dω_s over the frequency axis (trapezoid).
struct TransverseProfile {
  std::vector<double> theta_s, psi_s;
  std::vector<double> values;  // [t][p]

  double at(std::size_t t, std::size_t p) const { return values[t * psi_s.size() + p]; }
};

TransverseProfile transverse_profile(const SignalDensity& ns);

/// Scales the profile so that ∫ sinϑ dϑ ∫_{ψ ≤ 0} dψ n = (π/180)²/4.
void normalize_quadrant(TransverseProfile& tp);

/// ψ-averaged radial profile.
std::vector<double> radial_profile(const TransverseProfile& tp);

struct RingRule {
  double min_height = 0.05;      // relative to the profile maximum
  double min_prominence = 0.05;  // relative to the profile maximum
};

struct Ring {
  double theta;  // rad
  double value;
  double prominence;
};

/// Local maxima of the radial profile that clear both thresholds.
std::vector<Ring> find_rings(const std::vector<double>& theta,
                             const std::vector<double>& radial, const RingRule& rule = {});

struct IdlerWindow {
  double half_theta = 0.0;  // rad, δϑ_i ∈ [−half, half]
  double half_psi = 0.0;
  std::size_t n_theta = 128;
  std::size_t n_psi = 128;

  std::vector<double> delta_theta() const;
  std::vector<double> delta_psi() const;
};

struct Island {
  double weight;  // summed cell values
  double peak;
  double theta_centroid;  // δϑ_i, rad
  double psi_centroid;    // δψ_i, rad
  std::size_t cells;
  std::size_t theta_min, theta_max, psi_min, psi_max;  // cell index bounds
};

struct CorrelatedArea {
  double theta_s0 = 0.0, psi_s0 = 0.0;
  double theta_i0 = 0.0, psi_i0 = 0.0;  // window centre (−ϑ_s⁰, −ψ_s⁰)
  std::vector<double> delta_theta, delta_psi;
  std::vector<double> values;  // [θ][ψ]
  double total_weight = 0.0;   // all idler directions, window or not
  std::vector<Island> islands;  // sorted by weight, descending

  double at(std::size_t t, std::size_t p) const { return values[t * delta_psi.size() + p]; }
};

/// Islands: 4-connected cells above threshold × grid maximum.
std::vector<Island> find_islands(const std::vector<double>& values, std::size_t n_theta,
                                 std::size_t n_psi, const std::vector<double>& delta_theta,
                                 const std::vector<double>& delta_psi,
                                 double threshold = 0.05);

/// Frequency-integrated joint density for the signal direction (ϑ_s⁰, ψ_s⁰).
/// Focused pumps must have been sampled on the idler window (see
/// idler_window_grid); collimated pumps bin each ω_s sample at its exact
/// idler direction with linear weights. Throws WindowMiss when the window
/// holds < 1e-6 of the weight.
CorrelatedArea correlated_area(const PairDensity& pd, double theta_s0, double psi_s0,
                               const IdlerWindow& window, const ChannelSelection& sel = {});

/// Focused-pump correlated area accumulated over blocks of ω_s, so memory
/// stays bounded by kFocusedChunkRecords amplitudes. Matches correlated_area
/// on the full idler-window grid.
inline constexpr std::size_t kFocusedChunkRecords = 1u << 18;
CorrelatedArea focused_correlated_area(const TwoPhotonEngine& engine,
                                       const std::vector<double>& omega_s, double theta_s0,
                                       double psi_s0, const IdlerWindow& window,
                                       const ChannelSelection& sel = {}, int threads = 1,
                                       std::vector<std::string>* warnings = nullptr);

/// Amplitude grid for a correlated area: one signal direction, window idler axes.
AmplitudeGrid idler_window_grid(const std::vector<double>& omega_s, double theta_s0,
                                double psi_s0, const IdlerWindow& window);

/// Second moment of the ψ marginal about its mean, rad.
double azimuthal_spread(const CorrelatedArea& ca);

/// Σ over the whole grid with ω_s, |sinϑ_s| dϑ_s dψ_s measure (trapezoid).
double total_pairs(const SignalDensity& ns);

/// Trapezoid rule on a possibly non-uniform axis.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

std::string profile_csv(const TransverseProfile& tp,
                        const std::vector<std::pair<std::string, std::string>>& meta);
std::string spectrum_map_csv(const SignalDensity& eta, std::size_t psi_index, double omega_p0,
                             const std::vector<std::pair<std::string, std::string>>& meta);
std::string corr_area_csv(const CorrelatedArea& ca,
                          const std::vector<std::pair<std::string, std::string>>& meta);

}  // namespace spdc
