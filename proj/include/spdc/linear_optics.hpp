#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdc/stack.hpp"

namespace spdc {

using cdouble = std::complex<double>;

enum class Polarization { TE = 0, TM = 1 };
enum class Direction { F = 0, B = 1 };  // along +z / -z

inline constexpr Polarization kPolarizations[] = {Polarization::TE, Polarization::TM};
inline constexpr Direction kDirections[] = {Direction::F, Direction::B};

std::string to_string(Polarization p);
std::string to_string(Direction d);

/// How the TM wave sees a uniaxial layer (optic axis along z).
enum class IndexModel {
  Isotropic,  // TE and TM both use n_o
  Uniaxial,   // TM uses the angle-dependent extraordinary index
};

struct SnellAngle {
  double sin_theta = 0.0;
  double cos_theta = 1.0;  // >= 0; meaningless when evanescent
  bool evanescent = false;

  double theta() const;
};

/// n_out sin(theta_out) = n_layer sin(theta_layer); theta keeps its sign.
SnellAngle snell_internal_angle(double n_outside, double theta_outside, double n_layer);

struct OpticalLayer {
  double n;
  double length;  // m
};

/// A stack resolved at one frequency and polarization. The outer media
/// default to air.
struct OpticalProfile {
  double n_in = 1.0;
  double n_out = 1.0;
  std::vector<OpticalLayer> layers;
};

/// Indices for a field of frequency omega whose Snell invariant (n sinθ in
/// the entrance medium) is beta.
OpticalProfile resolve_profile(const Stack& stack, double omega, Polarization pol,
                               double beta, IndexModel model = IndexModel::Isotropic);

/// Forward/backward electric-field amplitudes per region, l = 0..N+1.
/// Layer amplitudes are referenced at the layer start z_{l-1}; region 0 at
/// z_0 and region N+1 at z_N.
///
/// TM convention: e_F = (cosθ u, -sinθ), e_B = (cosθ u, +sinθ) with u the
/// in-plane transverse unit vector, so the tangential field is
/// cosθ (A_F + A_B) and the Fresnel r at normal incidence equals the TE one,
/// (n1 - n2)/(n1 + n2).
struct LayerAmplitudes {
  std::vector<cdouble> forward;
  std::vector<cdouble> backward;
};

/// Solves the 2×2 interface/propagation chain of one profile. Two basis
/// solutions are propagated from the left so any pair of boundary values can
/// be imposed afterwards without re-running the chain.
class TransferChain {
 public:
  TransferChain() = default;
  TransferChain(const OpticalProfile& profile, double omega, double beta,
                Polarization pol) {
    compute(profile, omega, beta, pol);
  }

  /// Reuses internal storage across calls.
  void compute(const OpticalProfile& profile, double omega, double beta,
               Polarization pol);

  std::size_t regions() const { return kz_.size(); }

  /// Positive z wave-number per region (rad/m).
  double kz(std::size_t region) const { return kz_[region]; }
  double cos_theta(std::size_t region) const { return cos_[region]; }
  double sin_theta(std::size_t region) const { return sin_[region]; }

  /// Total matrix: a^{(N+1)} = M a^{(0)}.
  cdouble m11() const { return m_[0]; }
  cdouble m12() const { return m_[1]; }
  cdouble m21() const { return m_[2]; }
  cdouble m22() const { return m_[3]; }

  /// Amplitudes for incident waves A_F^{(0)} = in_left, A_B^{(N+1)} = in_right.
  LayerAmplitudes solve_incident(cdouble in_left, cdouble in_right) const;

  /// Amplitudes for unit outgoing wave in `out` and no outgoing wave on the
  /// other side: F -> A_F^{(N+1)} = 1, A_B^{(0)} = 0; B -> A_B^{(0)} = 1,
  /// A_F^{(N+1)} = 0.
  LayerAmplitudes outgoing_mode(Direction out) const;

  /// Same, written into caller storage: coefficients (cF, cB) for each region.
  void outgoing_mode(Direction out, std::span<cdouble> forward,
                     std::span<cdouble> backward) const;
  void incident(cdouble in_left, cdouble in_right, std::span<cdouble> forward,
                std::span<cdouble> backward) const;

  /// Field amplitude coefficients for left incidence.
  cdouble t() const;
  cdouble r() const;
  /// Flux-weighted intensity coefficients.
  double transmittance() const;
  double reflectance() const;

 private:
  void combine(cdouble x, cdouble y, std::span<cdouble> forward,
               std::span<cdouble> backward) const;

  // Basis solutions starting from (1,0) and (0,1) in region 0.
  std::vector<cdouble> b1f_, b1b_, b2f_, b2b_;
  std::vector<double> kz_, cos_, sin_, p_;
  cdouble m_[4]{};
};

/// Interface matrix D_{l+1}^{-1} D_l as (a, b) with I = [[a+b, a-b], [a-b, a+b]].
struct InterfaceCoefficients {
  double a;
  double b;
};
InterfaceCoefficients interface_coefficients(Polarization pol, double n_left,
                                             double cos_left, double n_right,
                                             double cos_right);

/// Whole-chain 2×2 matrix for composition checks.
struct Matrix2 {
  cdouble a11, a12, a21, a22;
  friend Matrix2 operator*(const Matrix2& x, const Matrix2& y);
};
/// Region-to-region interface matrix for refractive indices n_left -> n_right.
Matrix2 interface_matrix(Polarization pol, double n_left, double n_right, double beta);
/// Propagation through `layer` followed by the interface into index n_next.
Matrix2 layer_matrix(Polarization pol, const OpticalLayer& layer, double n_next,
                     double omega, double beta);

LayerAmplitudes layer_amplitudes(const Stack& stack, double omega, double theta,
                                 Polarization pol, cdouble in_left, cdouble in_right,
                                 IndexModel model = IndexModel::Isotropic);

double transmittance(const Stack& stack, double omega, double theta, Polarization pol,
                     IndexModel model = IndexModel::Isotropic);

enum class SpectrumVariable { Omega, Theta };

struct TransmissionSpectrum {
  SpectrumVariable variable = SpectrumVariable::Omega;
  double fixed = 0.0;  // theta (rad) for Omega spectra, omega for Theta spectra
  std::vector<double> x;
  std::vector<double> t_te;
  std::vector<double> t_tm;

  const std::vector<double>& values(Polarization p) const {
    return p == Polarization::TE ? t_te : t_tm;
  }
};

/// T(ω) at fixed external angle theta.
TransmissionSpectrum transmission_spectrum(const Stack& stack, double theta,
                                           std::span<const double> omegas,
                                           IndexModel model = IndexModel::Isotropic,
                                           int threads = 1);
/// T(θ) at fixed ω.
TransmissionSpectrum transmission_vs_angle(const Stack& stack, double omega,
                                           std::span<const double> thetas,
                                           IndexModel model = IndexModel::Isotropic,
                                           int threads = 1);

struct TransmissionPeak {
  double x;       // parabolic-refined position
  double value;   // refined peak transmission
  std::size_t grid_index;
};

struct Band {
  int index;      // 1-based, in order of increasing x within the window
  double x_lo;    // interval edges (linear interpolation of the threshold crossing)
  double x_hi;
  double min_value;
  /// Maxima below the band ordered by distance from the lower edge
  /// (first = "first lower peak"), and above the band from the upper edge.
  std::vector<TransmissionPeak> lower_peaks;
  std::vector<TransmissionPeak> upper_peaks;
};

struct BandAnalysis {
  double threshold;  // absolute T threshold used
  std::vector<Band> bands;
};

/// Bands are maximal runs with T < gap_threshold · max(T) that are at least
/// min_width_fraction as wide as the widest such run; narrower runs are the
/// transmission ripple between band-edge resonances and are ignored. Peaks
/// are 3-point local maxima with parabolic refinement. Adjacent peaks must be
/// at least 3 grid points apart. Throws NotFound without bands.
BandAnalysis find_bands_and_peaks(std::span<const double> x, std::span<const double> t,
                                  double gap_threshold = 0.5,
                                  double min_width_fraction = 0.5);

std::string spectrum_csv(const TransmissionSpectrum& s,
                         const std::vector<std::pair<std::string, std::string>>& meta = {});

}  // namespace spdc
