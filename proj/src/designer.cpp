#include "spdc/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include "json.hpp"

#include "spdc/error.hpp"
#include "spdc/io.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

std::string to_string(PeakSide s) { return s == PeakSide::Lower ? "lower" : "upper"; }

PeakSide peak_side_from_string(const std::string& s) {
  if (s == "lower") return PeakSide::Lower;
  if (s == "upper") return PeakSide::Upper;
  fail(ErrorCode::InvalidArgument, "peak side must be 'lower' or 'upper', got '" + s + "'");
}

std::string to_string(MonitoredQuantity q) {
  switch (q) {
    case MonitoredQuantity::EtaMax: return "eta_max";
    case MonitoredQuantity::TotalPairs: return "total_pairs";
    case MonitoredQuantity::AngularDensity: return "angular_density";
  }
  return "?";
}

MonitoredQuantity monitored_quantity_from_string(const std::string& s) {
  for (auto q : {MonitoredQuantity::EtaMax, MonitoredQuantity::TotalPairs,
                 MonitoredQuantity::AngularDensity})
    if (to_string(q) == s) return q;
  fail(ErrorCode::InvalidArgument, "unknown monitored quantity '" + s + "'");
}

namespace {

// Frequencies for which every material of the stack has dispersion data.
std::pair<double, double> valid_omega_range(const Stack& stack) {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (const auto& layer : stack.layers()) {
    for (const auto* m : {&layer.material->n_ordinary, &layer.material->n_extraordinary}) {
      if (m->is_constant()) continue;
      lo = std::max(lo, omega_from_wavelength(m->max_um() * 1e-6));
      hi = std::min(hi, omega_from_wavelength(m->min_um() * 1e-6));
    }
  }
  return {lo, hi};
}

double period_optical_length(const Stack& stack, double omega) {
  if (stack.size() < 2) fail(ErrorCode::PeakNotFound, "stack has no period");
  return refractive_index(*stack.layer(0).material, Axis::Ordinary, omega) * stack.layer(0).length +
         refractive_index(*stack.layer(1).material, Axis::Ordinary, omega) * stack.layer(1).length;
}

}  // namespace

PeakLocation locate_band2_peak(const Stack& stack, PeakSide side, double omega_ref,
                               const PinOptions& options) {
  const double omega2 = 2.0 * kPi * PhysicalConstants::c / period_optical_length(stack, omega_ref);
  auto [vlo, vhi] = valid_omega_range(stack);
  const double lo = std::max(0.75 * omega2, vlo * (1.0 + 1e-12));
  const double hi = std::min(1.25 * omega2, vhi * (1.0 - 1e-12));
  if (!(hi > lo)) fail(ErrorCode::PeakNotFound, "band 2 lies outside the dispersion data");

  const std::size_t n = std::max<std::size_t>(options.scan_points, 16);
  std::vector<double> omegas(n);
  for (std::size_t i = 0; i < n; ++i) omegas[i] = lo + (hi - lo) * i / (n - 1);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = transmittance(stack, omegas[i], 0.0, Polarization::TE);

  BandAnalysis analysis;
  try {
    analysis = find_bands_and_peaks(omegas, t);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFound) fail(ErrorCode::PeakNotFound, "no forbidden band near band 2");
    throw;
  }
  const Band* band = nullptr;
  for (const auto& b : analysis.bands) {
    const double centre = 0.5 * (b.x_lo + b.x_hi);
    if (!band || std::abs(centre - omega2) < std::abs(0.5 * (band->x_lo + band->x_hi) - omega2)) band = &b;
  }
  if (std::abs(0.5 * (band->x_lo + band->x_hi) / omega2 - 1.0) > 0.1) {
    fail(ErrorCode::PeakNotFound, "band 2 not found near its Bragg frequency");
  }
  const auto& peaks = side == PeakSide::Lower ? band->lower_peaks : band->upper_peaks;
  if (peaks.empty()) fail(ErrorCode::PeakNotFound, "band 2 has no " + to_string(side) + " peak in range");
  const auto& pk = peaks.front();

  const double h = omegas[1] - omegas[0];
  const double a = std::max(lo, pk.x - 2.0 * h), b = std::min(hi, pk.x + 2.0 * h);
  auto neg_t = [&](double w) { return -transmittance(stack, w, 0.0, Polarization::TE); };
  const auto [w_best, f_best] = boost::math::tools::brent_find_minima(neg_t, a, b, 52);

  PeakLocation loc;
  loc.omega = w_best;
  loc.value = -f_best;
  loc.band_lo = band->x_lo;
  loc.band_hi = band->x_hi;

  // Half-prominence edges on the scan grid.
  const std::size_t i0 = pk.grid_index;
  std::size_t il = i0, ir = i0;
  while (il > 0 && t[il - 1] <= t[il]) --il;
  while (ir + 1 < n && t[ir + 1] <= t[ir]) ++ir;
  const double level = loc.value - 0.5 * (loc.value - std::max(t[il], t[ir]));
  auto crossing = [&](std::size_t from, std::size_t to, int step) {
    for (std::size_t i = from; i != to; i += step) {
      const std::size_t j = i + step;
      if (t[j] < level) return omegas[i] + (omegas[j] - omegas[i]) * (t[i] - level) / (t[i] - t[j]);
    }
    return omegas[to];
  };
  loc.half_lo = crossing(i0, il, -1);
  loc.half_hi = crossing(i0, ir, +1);
  return loc;
}

PinnedLengths pin_lengths_to_pump(const MaterialPtr& a, const MaterialPtr& b, int n_layers,
                                  double L, PeakSide side, double omega_p0,
                                  const PinOptions& options) {
  if (!(L > 0.0)) fail(ErrorCode::InvalidArgument, "L must be positive");
  if (n_layers < 3 || n_layers % 2 == 0) fail(ErrorCode::InvalidArgument, "N must be odd and >= 3");
  const double na = refractive_index(*a, Axis::Ordinary, omega_p0);
  const double nb = refractive_index(*b, Axis::Ordinary, omega_p0);
  const double la_opt0 = kPi * PhysicalConstants::c / omega_p0;
  const double lb_opt0 = L * la_opt0;

  const Stack trial = build_ab_stack(make_isotropic(a->name, na), make_isotropic(b->name, nb),
                                     n_layers, la_opt0 / na, lb_opt0 / nb);
  PinnedLengths out;
  out.trial_peak = locate_band2_peak(trial, side, omega_p0, options).omega;
  // Lengths scaled by s move every spectral feature from ω to ω/s.
  const double s = out.trial_peak / omega_p0;
  out.l_a = la_opt0 * s / na;
  out.l_b = lb_opt0 * s / nb;

  for (out.iterations = 1; out.iterations <= options.max_iterations; ++out.iterations) {
    const Stack real = build_ab_stack(a, b, n_layers, out.l_a, out.l_b);
    const double r = locate_band2_peak(real, side, omega_p0, options).omega / omega_p0;
    out.residual = std::abs(r - 1.0);
    if (out.residual < options.tolerance) return out;
    out.l_a *= r;
    out.l_b *= r;
  }
  fail(ErrorCode::PeakNotFound, "dispersive peak did not converge onto the pump frequency");
}

bool closure_holds(const Stack& stack, PeakSide side, double omega_p0, const PinOptions& options) {
  const auto loc = locate_band2_peak(stack, side, omega_p0, options);
  return omega_p0 >= loc.half_lo && omega_p0 <= loc.half_hi;
}

AmplitudeGrid monitor_grid(double omega_p0, const MonitorOptions& o) {
  if (o.n_omega < 2 || o.n_theta < 2) fail(ErrorCode::InvalidArgument, "monitor grid needs >= 2 points per axis");
  if (!(o.two_omega_lo > 0.0 && o.two_omega_hi < 2.0 && o.two_omega_lo < o.two_omega_hi)) {
    fail(ErrorCode::InvalidArgument, "monitor frequency window must lie inside (0, 2)");
  }
  AmplitudeGrid g;
  for (std::size_t i = 0; i < o.n_omega; ++i) {
    const double x = o.two_omega_lo + (o.two_omega_hi - o.two_omega_lo) * i / (o.n_omega - 1);
    g.omega_s.push_back(0.5 * x * omega_p0);
  }
  for (std::size_t i = 0; i < o.n_theta; ++i) g.theta_s.push_back(o.theta_max * i / (o.n_theta - 1));
  if (o.quantity == MonitoredQuantity::TotalPairs) {
    for (int i = 0; i <= 16; ++i) g.psi_s.push_back((-90.0 + 180.0 * i / 16) * kDeg);
  } else {
    g.psi_s = {o.psi_s0};
  }
  return g;
}

SignalDensity monitored_eta(const Stack& stack, double omega_p0, const MonitorOptions& o,
                            int threads) {
  PumpConfig pump;
  pump.omega0 = omega_p0;
  pump.polarization = o.pump_polarization;
  const TwoPhotonEngine engine(stack, pump, {o.index_model, o.selection.channel_mask});
  const auto grid = monitor_grid(omega_p0, o);
  const auto pd = pair_density(assemble_phi(engine, grid, threads));
  return relative_density(signal_density(pd, o.selection), reference_density(engine, grid.omega_s));
}

double monitored_value(const Stack& stack, double omega_p0, const MonitorOptions& o, int threads) {
  const auto eta = monitored_eta(stack, omega_p0, o, threads);
  if (o.quantity == MonitoredQuantity::EtaMax) return grid_maximum(eta).value;
  return total_pairs(eta);
}

DesignSweep efficiency_sweep(const MaterialPtr& a, const MaterialPtr& b, int n_layers,
                             const std::vector<double>& L_grid, PeakSide side, double omega_p0,
                             const MonitorOptions& monitor, const PinOptions& pin, int threads) {
  if (L_grid.empty()) fail(ErrorCode::InvalidArgument, "empty L grid");
  for (std::size_t i = 1; i < L_grid.size(); ++i) {
    if (!(L_grid[i] > L_grid[i - 1])) fail(ErrorCode::InvalidArgument, "L grid must increase strictly");
  }
  if (!a->is_nonlinear && !b->is_nonlinear) {
    fail(ErrorCode::NoNonlinearLayer, "neither material is nonlinear");
  }
  DesignSweep sweep;
  sweep.n_layers = n_layers;
  sweep.side = side;
  sweep.quantity = monitor.quantity;
  sweep.points.resize(L_grid.size());
  parallel_for(L_grid.size(), threads, [&](std::size_t i) {
    DesignPoint& p = sweep.points[i];
    p.L = L_grid[i];
    p.side = side;
    try {
      const auto pinned = pin_lengths_to_pump(a, b, n_layers, p.L, side, omega_p0, pin);
      p.l_a = pinned.l_a;
      p.l_b = pinned.l_b;
      p.residual = pinned.residual;
      p.value = monitored_value(build_ab_stack(a, b, n_layers, p.l_a, p.l_b), omega_p0, monitor, 1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PeakNotFound && e.code() != ErrorCode::OutOfRange) throw;
      p.gap = true;
      p.gap_reason = e.what();
    }
  });
  return sweep;
}

std::vector<DesignPoint> select_best(const DesignSweep& sweep, std::size_t k) {
  std::vector<DesignPoint> pts;
  for (const auto& p : sweep.points)
    if (!p.gap) pts.push_back(p);
  std::stable_sort(pts.begin(), pts.end(), [](const DesignPoint& x, const DesignPoint& y) {
    if (x.value != y.value) return x.value > y.value;
    return x.L < y.L;
  });
  if (pts.size() > k) pts.resize(k);
  return pts;
}

std::vector<double> default_L_grid() {
  std::vector<double> g;
  for (int i = 10; i <= 200; ++i) g.push_back(i / 100.0);
  return g;
}

std::string sweep_csv(const DesignSweep& sweep,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
  CsvTable table;
  table.metadata = meta;
  table.metadata.emplace_back("n_layers", std::to_string(sweep.n_layers));
  table.metadata.emplace_back("monitored", to_string(sweep.quantity));
  table.columns = {"L", "l_a_nm", "l_b_nm", "value", "gap_flag"};
  table.text_columns = {"peak_side"};
  for (const auto& p : sweep.points) {
    table.rows.push_back({p.L, p.l_a * 1e9, p.l_b * 1e9, p.value, p.gap ? 1.0 : 0.0});
    table.text_rows.push_back({to_string(p.side)});
  }
  return table.render();
}

std::string top_designs_json(const DesignSweep& sweep, std::size_t k) {
  nlohmann::ordered_json j;
  j["n_layers"] = sweep.n_layers;
  j["peak_side"] = to_string(sweep.side);
  j["monitored"] = to_string(sweep.quantity);
  j["top"] = nlohmann::ordered_json::array();
  std::size_t rank = 1;
  for (const auto& p : select_best(sweep, k)) {
    j["top"].push_back({{"rank", rank++},
                        {"L", p.L},
                        {"l_a_nm", p.l_a * 1e9},
                        {"l_b_nm", p.l_b * 1e9},
                        {"value", p.value}});
  }
  return j.dump(2) + "\n";
}

}  // namespace spdc
