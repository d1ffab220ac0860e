#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spdc/geometry.hpp"
#include "spdc/linear_optics.hpp"
#include "spdc/pump.hpp"
#include "spdc/stack.hpp"

namespace spdc {

/// Output channel: signal direction then idler direction.
enum class Channel { FF = 0, FB = 1, BF = 2, BB = 3 };
inline constexpr Channel kChannels[] = {Channel::FF, Channel::FB, Channel::BF, Channel::BB};

inline Direction signal_direction(Channel c) {
  return static_cast<int>(c) < 2 ? Direction::F : Direction::B;
}
inline Direction idler_direction(Channel c) {
  return static_cast<int>(c) % 2 == 0 ? Direction::F : Direction::B;
}
std::string to_string(Channel c);
Channel channel_from_string(const std::string& name);

inline constexpr unsigned kAllChannels = 0xFu;
inline constexpr unsigned channel_bit(Channel c) { return 1u << static_cast<int>(c); }

/// Polarization index 0/1: TE/TM before detector rotation, ⊥/∥ after.
struct ChannelAmplitudes {
  std::array<cdouble, 16> v{};

  static constexpr std::size_t index(Channel c, int sig_pol, int idl_pol) {
    return static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(sig_pol) * 2 +
           static_cast<std::size_t>(idl_pol);
  }
  cdouble& at(Channel c, int sig_pol, int idl_pol) { return v[index(c, sig_pol, idl_pol)]; }
  cdouble at(Channel c, int sig_pol, int idl_pol) const {
    return v[index(c, sig_pol, idl_pol)];
  }
  /// Σ over the four polarization pairs of |φ|².
  double polarization_sum(Channel c) const;
};

struct EngineOptions {
  IndexModel index_model = IndexModel::Isotropic;
  unsigned channel_mask = kAllChannels;
};

/// Signal or idler plane-wave solution at (ω, |sinϑ|). Independent of ψ and
/// of the sign of ϑ; stored only for the nonlinear layers.
struct ModeSolution {
  double omega = 0.0;
  double abs_sin_theta = 0.0;  // outside the structure
  double cos_theta_out = 1.0;  // in the exit medium
  std::size_t layers = 0;      // nonlinear layer count
  // [pol][j]
  std::array<std::vector<double>, 2> kz, sin_int, cos_int;
  // conj of the outgoing-mode coefficient: [pol][out b][in b'] -> (re[j], im[j])
  std::array<std::array<std::array<std::vector<double>, 2>, 2>, 2> u_re, u_im;
};

/// Per-material sums H over nonlinear layers for one signal/idler pair.
struct LayerSums {
  std::size_t groups = 0;
  std::vector<cdouble> h;  // [group][a][b'][g'][β][γ][channel]

  static constexpr std::size_t per_group = 2 * 2 * 2 * 2 * 2 * 4;
  static constexpr std::size_t index(std::size_t g, int a, int bs, int gi, int beta,
                                     int gamma, int ch) {
    return g * per_group +
           static_cast<std::size_t>((((((a * 2 + bs) * 2 + gi) * 2 + beta) * 2 + gamma) * 4) +
                                    ch);
  }
};

/// Two-photon amplitude assembly for a fixed stack and pump.
///
/// φ = ξ · w · J · E^tr(k_s⊥ + k_i⊥) · S with w = (4ω_sω_i/ω_p0²)^{5/2},
/// J = 1/cosϑ_p and
///   S = Σ_l Σ_{a,b',g'} d:e_p e_s e_i · A_p,a · ū_s,b' · ū_i,g'
///       · L e^{iΔK L/2} sinc(ΔK L/2),
/// ΔK = σ_a K_p − σ_b' K_s − σ_g' K_i. ū is the conjugate in-layer
/// coefficient of the mode carrying unit amplitude into the chosen output.
/// For a collimated pump E^tr is dropped and the idler direction must obey
/// exact transverse matching. A focused pump keeps its carrier-direction
/// in-layer amplitudes for every plane-wave component.
class TwoPhotonEngine {
 public:
  TwoPhotonEngine(Stack stack, PumpConfig pump, EngineOptions options = {});

  const Stack& stack() const { return stack_; }
  const PumpConfig& pump() const { return pump_; }
  const EngineOptions& options() const { return options_; }

  ModeSolution solve_mode(double omega, double abs_sin_theta) const;
  void solve_mode(double omega, double abs_sin_theta, ModeSolution& out) const;

  void layer_sums(const ModeSolution& signal, const ModeSolution& idler,
                  LayerSums& out) const;

  /// Structure sum S in the TE/TM basis for the given signs of sinϑ and
  /// azimuths. Channels outside the mask are left zero.
  ChannelAmplitudes contract(const LayerSums& h, const ModeSolution& signal,
                             double sign_s, double psi_s, const ModeSolution& idler,
                             double sign_i, double psi_i) const;

  /// S for explicit directions, TE/TM basis.
  ChannelAmplitudes structure_sum(double omega_s, double theta_s, double psi_s,
                                  double theta_i, double psi_i) const;

  /// φ in the detector basis for explicit directions; ω_i = ω_p0 − ω_s.
  ChannelAmplitudes amplitude(double omega_s, double theta_s, double psi_s,
                              double theta_i, double psi_i) const;

  /// Frequency weight w and pump Jacobian J.
  double frequency_weight(double omega_s) const;
  double pump_jacobian() const;
  /// ξ·w·J (·E^tr for a focused pump).
  double prefactor(double omega_s, double theta_s, double psi_s, double theta_i,
                   double psi_i) const;

  /// S_ref = Σ max|d| L over nonlinear layers.
  double reference_sum() const { return reference_sum_; }

  std::size_t nonlinear_layers() const { return nl_.size(); }

 private:
  struct NlLayer {
    std::size_t stack_index;
    std::size_t group;
    double length;
  };
  struct Group {
    MaterialPtr material;
    std::size_t begin, end;  // into nl_
  };

  Stack stack_;
  PumpConfig pump_;
  EngineOptions options_;
  std::vector<NlLayer> nl_;
  std::vector<Group> groups_;
  std::vector<double> lengths_;  // nl_ order
  // Pump in-layer data [a][j], carrier direction.
  std::array<std::vector<double>, 2> pump_re_, pump_im_;
  std::vector<double> pump_kz_, pump_sin_, pump_cos_;
  double reference_sum_ = 0.0;
};

/// Grid over which φ is sampled. Collimated pumps bind the idler direction
/// kinematically; focused pumps sample the idler window explicitly.
struct AmplitudeGrid {
  std::vector<double> omega_s;  // rad/s
  std::vector<double> theta_s;  // rad
  std::vector<double> psi_s;    // rad
  std::vector<double> theta_i;  // focused only
  std::vector<double> psi_i;    // focused only
};

struct TwoPhotonAmplitude {
  AmplitudeGrid grid;
  bool collimated = true;
  std::uint64_t stack_hash = 0;
  PumpConfig pump;
  /// Row-major over (ω_s, ϑ_s, ψ_s[, ϑ_i, ψ_i]); detector basis (⊥=0, ∥=1).
  std::vector<ChannelAmplitudes> values;
  /// Idler directions for the collimated case (same indexing, no idler axes).
  std::vector<IdlerDirection> idler;
  std::vector<std::string> warnings;

  std::size_t index(std::size_t w, std::size_t t, std::size_t p, std::size_t ti = 0,
                    std::size_t pi = 0) const;
};

TwoPhotonAmplitude assemble_phi(const TwoPhotonEngine& engine, const AmplitudeGrid& grid,
                                int threads = 1);

/// Rotates both photons of every channel from TE/TM to (⊥, ∥).
ChannelAmplitudes detector_rotation(const ChannelAmplitudes& te_tm, double theta_s,
                                    double psi_s, double theta_i, double psi_i);

/// Warnings when ΔK·L_total changes by more than π between adjacent samples
/// of a 1-D axis (F-F-F mismatch at normal pump incidence).
std::vector<std::string> sampling_warnings(const TwoPhotonEngine& engine,
                                           const AmplitudeGrid& grid);

}  // namespace spdc
