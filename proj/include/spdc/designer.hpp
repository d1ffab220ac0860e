#pragma once

#include <string>
#include <vector>

#include "spdc/constants.hpp"
#include "spdc/observables.hpp"
#include "spdc/stack.hpp"

namespace spdc {

enum class PeakSide { Lower, Upper };
std::string to_string(PeakSide s);
PeakSide peak_side_from_string(const std::string& s);

struct PinOptions {
  std::size_t scan_points = 4001;
  double tolerance = 1e-6;  // relative peak offset from ω_p0 on the dispersive stack
  int max_iterations = 25;
};

struct PinnedLengths {
  double l_a = 0.0;  // physical, m
  double l_b = 0.0;
  double trial_peak = 0.0;  // ω_p^max of the dispersion-free trial stack
  double residual = 0.0;    // |ω_peak/ω_p0 − 1| on the final dispersive stack
  int iterations = 0;
};

/// Band 2 peak of a stack at normal incidence (TE), searched around the
/// Bragg estimate of the second band. Throws PeakNotFound.
struct PeakLocation {
  double omega = 0.0;
  double value = 0.0;
  double half_lo = 0.0;  // half-prominence edges
  double half_hi = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
};
PeakLocation locate_band2_peak(const Stack& stack, PeakSide side, double omega_ref,
                               const PinOptions& options = {});

/// Places the first lower/upper peak of band 2 at ω_p0 for the ratio
/// L = l_b^opt / l_a^opt, then corrects for dispersion by fixed-point
/// rescaling of the physical lengths.
PinnedLengths pin_lengths_to_pump(const MaterialPtr& a, const MaterialPtr& b, int n_layers,
                                  double L, PeakSide side, double omega_p0,
                                  const PinOptions& options = {});

/// True when ω_p0 lies within the half-prominence width of the peak found
/// by re-analysing `stack` from scratch.
bool closure_holds(const Stack& stack, PeakSide side, double omega_p0,
                   const PinOptions& options = {});

enum class MonitoredQuantity { EtaMax, TotalPairs, AngularDensity };
std::string to_string(MonitoredQuantity q);
MonitoredQuantity monitored_quantity_from_string(const std::string& s);

struct MonitorOptions {
  MonitoredQuantity quantity = MonitoredQuantity::EtaMax;
  Polarization pump_polarization = Polarization::TE;
  ChannelSelection selection{channel_bit(Channel::FF), 0, 1};
  double psi_s0 = 0.0;
  std::size_t n_omega = 64;
  std::size_t n_theta = 64;
  double two_omega_lo = 0.8;  // window in 2ω_s/ω_p0
  double two_omega_hi = 1.2;
  double theta_max = 89.0 * kDeg;
  IndexModel index_model = IndexModel::Isotropic;
};

/// Signal grid used by the monitor and the enhancement estimates.
AmplitudeGrid monitor_grid(double omega_p0, const MonitorOptions& options);

/// Relative density η_s on the monitor grid.
SignalDensity monitored_eta(const Stack& stack, double omega_p0, const MonitorOptions& options,
                            int threads = 1);

double monitored_value(const Stack& stack, double omega_p0, const MonitorOptions& options,
                       int threads = 1);

struct DesignPoint {
  double L = 0.0;
  PeakSide side = PeakSide::Lower;
  double l_a = 0.0, l_b = 0.0;  // m
  double value = 0.0;
  bool gap = false;
  std::string gap_reason;
  double residual = 0.0;
};

struct DesignSweep {
  int n_layers = 0;
  PeakSide side = PeakSide::Lower;
  MonitoredQuantity quantity = MonitoredQuantity::EtaMax;
  std::vector<DesignPoint> points;
};

DesignSweep efficiency_sweep(const MaterialPtr& a, const MaterialPtr& b, int n_layers,
                             const std::vector<double>& L_grid, PeakSide side, double omega_p0,
                             const MonitorOptions& monitor, const PinOptions& pin = {},
                             int threads = 1);

/// Non-gap points by value descending; ties go to the smaller L.
std::vector<DesignPoint> select_best(const DesignSweep& sweep, std::size_t k);

std::vector<double> default_L_grid();

std::string sweep_csv(const DesignSweep& sweep,
                      const std::vector<std::pair<std::string, std::string>>& meta);
std::string top_designs_json(const DesignSweep& sweep, std::size_t k);

}  // namespace spdc
