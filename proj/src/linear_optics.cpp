#include "spdc/linear_optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spdc/constants.hpp"
#include "spdc/error.hpp"
#include "spdc/io.hpp"
#include "spdc/parallel.hpp"

namespace spdc {

std::string to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }
std::string to_string(Direction d) { return d == Direction::F ? "F" : "B"; }

double SnellAngle::theta() const { return std::atan2(sin_theta, cos_theta); }

SnellAngle snell_internal_angle(double n_outside, double theta_outside, double n_layer) {
  SnellAngle a;
  a.sin_theta = n_outside * std::sin(theta_outside) / n_layer;
  const double c2 = 1.0 - a.sin_theta * a.sin_theta;
  a.evanescent = c2 < 0.0;
  a.cos_theta = a.evanescent ? 0.0 : std::sqrt(c2);
  return a;
}

namespace {

// TM index of a uniaxial layer for Snell invariant beta: from
// 1/n² = cos²θ/n_o² + sin²θ/n_e² with n sinθ = beta.
double uniaxial_tm_index(double n_o, double n_e, double beta) {
  return std::sqrt(n_o * n_o + beta * beta * (1.0 - (n_o * n_o) / (n_e * n_e)));
}

struct RegionOptics {
  double sin, cos, kz, p;
};

RegionOptics region_optics(double n, double k0, double beta) {
  const double s = beta / n;
  const double c2 = 1.0 - s * s;
  if (c2 <= 0.0) fail(ErrorCode::InvalidArgument, "evanescent wave inside the stack");
  const double c = std::sqrt(c2);
  return {s, c, k0 * n * c, n * c};
}

}  // namespace

OpticalProfile resolve_profile(const Stack& stack, double omega, Polarization pol,
                               double beta, IndexModel model) {
  OpticalProfile p;
  p.layers.reserve(stack.size());
  for (const auto& l : stack.layers()) {
    const auto& m = *l.material;
    double n = refractive_index(m, Axis::Ordinary, omega);
    if (pol == Polarization::TM && model == IndexModel::Uniaxial) {
      n = uniaxial_tm_index(n, refractive_index(m, Axis::Extraordinary, omega), beta);
    }
    p.layers.push_back({n, l.length});
  }
  return p;
}

InterfaceCoefficients interface_coefficients(Polarization pol, double n_left,
                                             double cos_left, double n_right,
                                             double cos_right) {
  if (pol == Polarization::TE) {
    return {0.5, 0.5 * (n_left * cos_left) / (n_right * cos_right)};
  }
  return {0.5 * cos_left / cos_right, 0.5 * n_left / n_right};
}

void TransferChain::compute(const OpticalProfile& profile, double omega, double beta,
                            Polarization pol) {
  const std::size_t n_regions = profile.layers.size() + 2;
  const double k0 = omega / PhysicalConstants::c;
  for (auto* v : {&b1f_, &b1b_, &b2f_, &b2b_}) v->resize(n_regions);
  for (auto* v : {&kz_, &cos_, &sin_, &p_}) v->resize(n_regions);

  auto index_of = [&](std::size_t r) {
    if (r == 0) return profile.n_in;
    if (r == n_regions - 1) return profile.n_out;
    return profile.layers[r - 1].n;
  };
  for (std::size_t r = 0; r < n_regions; ++r) {
    const auto o = region_optics(index_of(r), k0, beta);
    sin_[r] = o.sin;
    cos_[r] = o.cos;
    kz_[r] = o.kz;
    p_[r] = o.p;
  }

  cdouble f1 = 1.0, g1 = 0.0, f2 = 0.0, g2 = 1.0;
  b1f_[0] = f1;
  b1b_[0] = g1;
  b2f_[0] = f2;
  b2b_[0] = g2;
  for (std::size_t r = 0; r + 1 < n_regions; ++r) {
    if (r > 0) {
      const double phase = kz_[r] * profile.layers[r - 1].length;
      const cdouble e(std::cos(phase), std::sin(phase));
      const cdouble ec = std::conj(e);
      f1 *= e;
      g1 *= ec;
      f2 *= e;
      g2 *= ec;
    }
    const auto ic = interface_coefficients(pol, index_of(r), cos_[r], index_of(r + 1),
                                           cos_[r + 1]);
    const double s = ic.a + ic.b, d = ic.a - ic.b;
    const cdouble nf1 = s * f1 + d * g1, ng1 = d * f1 + s * g1;
    const cdouble nf2 = s * f2 + d * g2, ng2 = d * f2 + s * g2;
    f1 = nf1;
    g1 = ng1;
    f2 = nf2;
    g2 = ng2;
    b1f_[r + 1] = f1;
    b1b_[r + 1] = g1;
    b2f_[r + 1] = f2;
    b2b_[r + 1] = g2;
  }
  m_[0] = f1;
  m_[1] = f2;
  m_[2] = g1;
  m_[3] = g2;
  if (!(std::abs(m_[0]) > 0.0) || !(std::abs(m_[3]) > 0.0) ||
      !std::isfinite(std::abs(m_[0])) || !std::isfinite(std::abs(m_[3]))) {
    fail(ErrorCode::SingularMatrix, "degenerate transfer chain");
  }
}

void TransferChain::combine(cdouble x, cdouble y, std::span<cdouble> forward,
                            std::span<cdouble> backward) const {
  for (std::size_t r = 0; r < kz_.size(); ++r) {
    forward[r] = x * b1f_[r] + y * b2f_[r];
    backward[r] = x * b1b_[r] + y * b2b_[r];
  }
}

void TransferChain::incident(cdouble in_left, cdouble in_right,
                             std::span<cdouble> forward,
                             std::span<cdouble> backward) const {
  const cdouble x = (in_right - in_left * m_[2]) / m_[3];
  combine(in_left, x, forward, backward);
  // Pin the imposed values exactly.
  forward[0] = in_left;
  backward[kz_.size() - 1] = in_right;
}

void TransferChain::outgoing_mode(Direction out, std::span<cdouble> forward,
                                  std::span<cdouble> backward) const {
  if (out == Direction::F) {
    combine(1.0 / m_[0], 0.0, forward, backward);
    forward[kz_.size() - 1] = 1.0;
  } else {
    combine(-m_[1] / m_[0], 1.0, forward, backward);
    forward[kz_.size() - 1] = 0.0;
  }
}

LayerAmplitudes TransferChain::solve_incident(cdouble in_left, cdouble in_right) const {
  LayerAmplitudes a{std::vector<cdouble>(kz_.size()), std::vector<cdouble>(kz_.size())};
  incident(in_left, in_right, a.forward, a.backward);
  return a;
}

LayerAmplitudes TransferChain::outgoing_mode(Direction out) const {
  LayerAmplitudes a{std::vector<cdouble>(kz_.size()), std::vector<cdouble>(kz_.size())};
  outgoing_mode(out, a.forward, a.backward);
  return a;
}

cdouble TransferChain::r() const { return -m_[2] / m_[3]; }

cdouble TransferChain::t() const { return (m_[0] * m_[3] - m_[1] * m_[2]) / m_[3]; }

double TransferChain::transmittance() const {
  return p_.back() / p_.front() * std::norm(t());
}

double TransferChain::reflectance() const { return std::norm(r()); }

Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
  return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
          x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
}

Matrix2 interface_matrix(Polarization pol, double n_left, double n_right, double beta) {
  const auto l = region_optics(n_left, 1.0, beta);
  const auto r = region_optics(n_right, 1.0, beta);
  const auto ic = interface_coefficients(pol, n_left, l.cos, n_right, r.cos);
  return {ic.a + ic.b, ic.a - ic.b, ic.a - ic.b, ic.a + ic.b};
}

Matrix2 layer_matrix(Polarization pol, const OpticalLayer& layer, double n_next,
                     double omega, double beta) {
  const auto o = region_optics(layer.n, omega / PhysicalConstants::c, beta);
  const double phase = o.kz * layer.length;
  const cdouble e(std::cos(phase), std::sin(phase));
  const Matrix2 prop{e, 0.0, 0.0, std::conj(e)};
  return interface_matrix(pol, layer.n, n_next, beta) * prop;
}

LayerAmplitudes layer_amplitudes(const Stack& stack, double omega, double theta,
                                 Polarization pol, cdouble in_left, cdouble in_right,
                                 IndexModel model) {
  const double beta = std::sin(theta);
  const TransferChain chain(resolve_profile(stack, omega, pol, beta, model), omega, beta,
                            pol);
  return chain.solve_incident(in_left, in_right);
}

double transmittance(const Stack& stack, double omega, double theta, Polarization pol,
                     IndexModel model) {
  const double beta = std::sin(theta);
  const TransferChain chain(resolve_profile(stack, omega, pol, beta, model), omega, beta,
                            pol);
  return chain.transmittance();
}

TransmissionSpectrum transmission_spectrum(const Stack& stack, double theta,
                                           std::span<const double> omegas,
                                           IndexModel model, int threads) {
  if (omegas.empty()) fail(ErrorCode::InvalidArgument, "empty frequency grid");
  TransmissionSpectrum s;
  s.variable = SpectrumVariable::Omega;
  s.fixed = theta;
  s.x.assign(omegas.begin(), omegas.end());
  s.t_te.resize(omegas.size());
  s.t_tm.resize(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    s.t_te[i] = transmittance(stack, omegas[i], theta, Polarization::TE, model);
    s.t_tm[i] = transmittance(stack, omegas[i], theta, Polarization::TM, model);
  });
  return s;
}

TransmissionSpectrum transmission_vs_angle(const Stack& stack, double omega,
                                           std::span<const double> thetas,
                                           IndexModel model, int threads) {
  if (thetas.empty()) fail(ErrorCode::InvalidArgument, "empty angle grid");
  TransmissionSpectrum s;
  s.variable = SpectrumVariable::Theta;
  s.fixed = omega;
  s.x.assign(thetas.begin(), thetas.end());
  s.t_te.resize(thetas.size());
  s.t_tm.resize(thetas.size());
  parallel_for(thetas.size(), threads, [&](std::size_t i) {
    s.t_te[i] = transmittance(stack, omega, thetas[i], Polarization::TE, model);
    s.t_tm[i] = transmittance(stack, omega, thetas[i], Polarization::TM, model);
  });
  return s;
}

namespace {

TransmissionPeak refine_peak(std::span<const double> x, std::span<const double> t,
                             std::size_t i) {
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double y0 = t[i - 1], y1 = t[i], y2 = t[i + 1];
  // Vertex of the parabola through three (possibly non-uniform) points.
  const double d0 = (y1 - y0) / (x1 - x0);
  const double d1 = (y2 - y1) / (x2 - x1);
  const double curv = (d1 - d0) / (x2 - x0);
  if (!(curv < 0.0)) return {x1, y1, i};
  const double slope_mid = d0 + curv * (x1 - x0);  // derivative at x1
  const double xv = std::clamp(x1 - slope_mid / (2.0 * curv), x0, x2);
  const double yv = y1 + slope_mid * (xv - x1) + curv * (xv - x1) * (xv - x1);
  return {xv, std::max(yv, y1), i};
}

}  // namespace

BandAnalysis find_bands_and_peaks(std::span<const double> x, std::span<const double> t,
                                  double gap_threshold, double min_width_fraction) {
  if (x.size() != t.size() || x.size() < 3) {
    fail(ErrorCode::InvalidArgument, "spectrum needs >= 3 matching samples");
  }
  const double tmax = *std::max_element(t.begin(), t.end());
  BandAnalysis out;
  out.threshold = gap_threshold * tmax;
  const double thr = out.threshold;

  auto crossing = [&](std::size_t a, std::size_t b) {
    const double w = (thr - t[a]) / (t[b] - t[a]);
    return x[a] + w * (x[b] - x[a]);
  };

  std::size_t i = 0;
  const std::size_t n = t.size();
  while (i < n) {
    if (t[i] >= thr) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double vmin = t[i];
    while (j + 1 < n && t[j + 1] < thr) vmin = std::min(vmin, t[++j]);
    Band b;
    b.index = static_cast<int>(out.bands.size()) + 1;
    b.x_lo = i == 0 ? x[0] : crossing(i - 1, i);
    b.x_hi = j + 1 == n ? x[n - 1] : crossing(j, j + 1);
    b.min_value = vmin;
    out.bands.push_back(std::move(b));
    i = j + 1;
  }
  if (out.bands.empty()) fail(ErrorCode::NotFound, "no forbidden band in the window");
  double widest = 0.0;
  for (const auto& b : out.bands) widest = std::max(widest, b.x_hi - b.x_lo);
  std::erase_if(out.bands, [&](const Band& b) {
    return b.x_hi - b.x_lo < min_width_fraction * widest;
  });
  for (std::size_t b = 0; b < out.bands.size(); ++b) out.bands[b].index = static_cast<int>(b) + 1;

  std::vector<TransmissionPeak> peaks;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (t[k] > t[k - 1] && t[k] >= t[k + 1] && t[k] >= thr) {
      peaks.push_back(refine_peak(x, t, k));
    }
  }
  auto& bands = out.bands;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const double lo = b == 0 ? -std::numeric_limits<double>::infinity() : bands[b - 1].x_hi;
    const double hi =
        b + 1 == bands.size() ? std::numeric_limits<double>::infinity() : bands[b + 1].x_lo;
    for (const auto& p : peaks) {
      if (p.x > lo && p.x < bands[b].x_lo) bands[b].lower_peaks.push_back(p);
      if (p.x > bands[b].x_hi && p.x < hi) bands[b].upper_peaks.push_back(p);
    }
    std::reverse(bands[b].lower_peaks.begin(), bands[b].lower_peaks.end());
  }
  return out;
}

std::string spectrum_csv(const TransmissionSpectrum& s,
                         const std::vector<std::pair<std::string, std::string>>& meta) {
  CsvTable table;
  table.metadata = meta;
  const bool omega = s.variable == SpectrumVariable::Omega;
  table.metadata.emplace_back(omega ? "theta_deg" : "omega_rad_per_s",
                              format_g17(omega ? s.fixed / kDeg : s.fixed));
  table.columns = {omega ? "omega_rad_per_s" : "theta_deg", "T_TE", "T_TM"};
  table.rows.reserve(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    table.rows.push_back({omega ? s.x[i] : s.x[i] / kDeg, s.t_te[i], s.t_tm[i]});
  }
  return table.render();
}

}  // namespace spdc
