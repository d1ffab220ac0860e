#include "spdc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spdc/constants.hpp"
#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

namespace {

int parse_pol(const std::string& s) {
  if (s == "any") return -1;
  if (s == "perp") return 0;
  if (s == "par") return 1;
  fail(ErrorCode::InvalidArgument, "unknown detector polarization '" + s + "'");
}

const char* pol_name(int p) { return p < 0 ? "any" : (p == 0 ? "perp" : "par"); }

// Trapezoid weights of a (possibly single-point) axis.
std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  if (x.size() < 2) {
    if (!x.empty()) w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

std::size_t locate(const std::vector<double>& axis, double v, const char* name) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i] - v) <= 1e-9 * std::max(1.0, std::abs(v))) return i;
  }
  fail(ErrorCode::InvalidArgument, std::string(name) + " is not on the signal grid");
}

std::vector<double> centred_axis(double half, std::size_t n) {
  std::vector<double> a(n);
  if (n == 1) {
    a[0] = 0.0;
    return a;
  }
  for (std::size_t i = 0; i < n; ++i) a[i] = -half + 2.0 * half * i / (n - 1);
  return a;
}

// Linear (cloud-in-cell) deposit onto a uniform 2-D grid.
void deposit(std::vector<double>& cells, const std::vector<double>& ax, const std::vector<double>& ay,
             double x, double y, double mass) {
  auto split = [](const std::vector<double>& a, double v, std::size_t& i0, double& f) {
    if (a.size() == 1) {
      if (std::abs(v - a[0]) > 0.0) return false;
      i0 = 0;
      f = 0.0;
      return true;
    }
    const double h = a[1] - a[0];
    const double s = (v - a.front()) / h;
    if (s < -0.5 || s > static_cast<double>(a.size() - 1) + 0.5) return false;
    const double c = std::clamp(s, 0.0, static_cast<double>(a.size() - 1));
    i0 = std::min(static_cast<std::size_t>(c), a.size() - 2);
    f = c - static_cast<double>(i0);
    return true;
  };
  std::size_t ix, iy;
  double fx, fy;
  if (!split(ax, x, ix, fx)) return;
  const bool ypoint = ay.size() == 1;
  if (ypoint) {
    // A single ψ column takes everything inside half a window.
    iy = 0;
    fy = 0.0;
  } else if (!split(ay, y, iy, fy)) {
    return;
  }
  const std::size_t ny = ay.size();
  auto add = [&](std::size_t i, std::size_t j, double w) {
    if (w != 0.0) cells[i * ny + j] += mass * w;
  };
  if (ax.size() == 1) {
    add(0, iy, 1.0 - fy);
    if (!ypoint) add(0, iy + 1, fy);
    return;
  }
  add(ix, iy, (1.0 - fx) * (1.0 - fy));
  add(ix + 1, iy, fx * (1.0 - fy));
  if (!ypoint) {
    add(ix, iy + 1, (1.0 - fx) * fy);
    add(ix + 1, iy + 1, fx * fy);
  }
}

}  // namespace

ChannelSelection parse_selection(const std::string& text) {
  ChannelSelection sel;
  const auto colon = text.find(':');
  const std::string ch = text.substr(0, colon);
  if (ch == "all") {
    sel.channel_mask = kAllChannels;
  } else {
    sel.channel_mask = 0;
    std::size_t pos = 0;
    while (pos <= ch.size()) {
      const auto plus = ch.find('+', pos);
      sel.channel_mask |= channel_bit(channel_from_string(ch.substr(pos, plus - pos)));
      if (plus == std::string::npos) break;
      pos = plus + 1;
    }
  }
  if (colon != std::string::npos) {
    const std::string pols = text.substr(colon + 1);
    const auto comma = pols.find(',');
    if (comma == std::string::npos) {
      fail(ErrorCode::InvalidArgument, "polarization pair must read 'signal,idler'");
    }
    sel.signal_pol = parse_pol(pols.substr(0, comma));
    sel.idler_pol = parse_pol(pols.substr(comma + 1));
  }
  return sel;
}

std::string to_string(const ChannelSelection& s) {
  std::string out;
  if (s.channel_mask == kAllChannels) {
    out = "all";
  } else {
    for (Channel c : kChannels) {
      if (!(s.channel_mask & channel_bit(c))) continue;
      if (!out.empty()) out += '+';
      out += to_string(c);
    }
  }
  return out + ':' + pol_name(s.signal_pol) + ',' + pol_name(s.idler_pol);
}

double PairDensity::selected(std::size_t k, const ChannelSelection& sel) const {
  double s = 0.0;
  const auto& v = values[k];
  for (Channel c : kChannels)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        if (sel.includes(c, b, g)) s += v[ChannelAmplitudes::index(c, b, g)];
  return s;
}

PairDensity pair_density(const TwoPhotonAmplitude& phi) {
  PairDensity pd;
  pd.grid = phi.grid;
  pd.collimated = phi.collimated;
  pd.cw_weight = cw_spectral_weight(phi.pump);
  pd.omega_p0 = phi.pump.omega0;
  pd.idler = phi.idler;
  pd.values.resize(phi.values.size());
  for (std::size_t k = 0; k < phi.values.size(); ++k) {
    for (std::size_t j = 0; j < 16; ++j) pd.values[k][j] = pd.cw_weight * std::norm(phi.values[k].v[j]);
  }
  return pd;
}

SignalDensity signal_density(const PairDensity& pd, const ChannelSelection& sel) {
  SignalDensity ns;
  ns.omega_s = pd.grid.omega_s;
  ns.theta_s = pd.grid.theta_s;
  ns.psi_s = pd.grid.psi_s;
  const std::size_t nw = ns.omega_s.size(), nt = ns.theta_s.size(), np = ns.psi_s.size();
  ns.values.assign(nw * nt * np, 0.0);

  if (pd.collimated) {
    for (std::size_t k = 0; k < ns.values.size(); ++k) {
      if (pd.idler[k].evanescent) continue;
      ns.values[k] = pd.selected(k, sel) / std::cos(pd.idler[k].theta);
    }
    return ns;
  }

  const auto& ti = pd.grid.theta_i;
  const auto& pi = pd.grid.psi_i;
  const auto wt = trapezoid_weights(ti);
  const auto wp = trapezoid_weights(pi);
  const double c2 = PhysicalConstants::c * PhysicalConstants::c;
  for (std::size_t w = 0; w < nw; ++w) {
    const double omega_i = pd.omega_p0 - ns.omega_s[w];
    const double measure = omega_i * omega_i / c2;
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t p = 0; p < np; ++p) {
        const std::size_t base = ((w * nt + t) * np + p) * ti.size() * pi.size();
        double acc = 0.0;
        for (std::size_t a = 0; a < ti.size(); ++a) {
          const double ja = wt[a] * std::abs(std::sin(ti[a]));
          if (ja == 0.0) continue;
          for (std::size_t b = 0; b < pi.size(); ++b) {
            acc += ja * wp[b] * pd.selected(base + a * pi.size() + b, sel);
          }
        }
        ns.values[ns.index(w, t, p)] = acc * measure;
      }
    }
  }
  return ns;
}

std::vector<double> reference_density(const TwoPhotonEngine& engine,
                                      const std::vector<double>& omega_s) {
  const double sref = engine.reference_sum();
  if (!(sref > 0.0)) {
    fail(ErrorCode::NoNonlinearLayer, "reference density needs a nonlinear layer");
  }
  const auto& pump = engine.pump();
  const double cw = cw_spectral_weight(pump);
  std::vector<double> out;
  out.reserve(omega_s.size());
  for (double w : omega_s) {
    const double a = pump.xi * engine.frequency_weight(w) * sref;
    out.push_back(cw * a * a);
  }
  return out;
}

SignalDensity relative_density(const SignalDensity& ns, const std::vector<double>& ref) {
  if (ref.size() != ns.omega_s.size()) {
    fail(ErrorCode::InvalidArgument, "reference and density frequency grids differ");
  }
  SignalDensity eta = ns;
  const std::size_t per_w = ns.theta_s.size() * ns.psi_s.size();
  for (std::size_t w = 0; w < ref.size(); ++w) {
    for (std::size_t j = 0; j < per_w; ++j) eta.values[w * per_w + j] /= ref[w];
  }
  return eta;
}

Maximum grid_maximum(const SignalDensity& d) {
  Maximum m;
  for (std::size_t w = 0; w < d.omega_s.size(); ++w)
    for (std::size_t t = 0; t < d.theta_s.size(); ++t)
      for (std::size_t p = 0; p < d.psi_s.size(); ++p) {
        const double v = d.values[d.index(w, t, p)];
        if (v > m.value) m = {v, w, t, p};
      }
  return m;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return s;
}

TransverseProfile transverse_profile(const SignalDensity& ns) {
  TransverseProfile tp;
  tp.theta_s = ns.theta_s;
  tp.psi_s = ns.psi_s;
  const std::size_t nt = ns.theta_s.size(), np = ns.psi_s.size();
  tp.values.assign(nt * np, 0.0);
  const auto ww = trapezoid_weights(ns.omega_s);
  for (std::size_t w = 0; w < ns.omega_s.size(); ++w)
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t p = 0; p < np; ++p) tp.values[t * np + p] += ww[w] * ns.values[ns.index(w, t, p)];
  return tp;
}

void normalize_quadrant(TransverseProfile& tp) {
  std::vector<double> psi_q, t_int;
  std::vector<std::size_t> cols;
  for (std::size_t p = 0; p < tp.psi_s.size(); ++p) {
    if (tp.psi_s[p] <= 0.0) {
      psi_q.push_back(tp.psi_s[p]);
      cols.push_back(p);
    }
  }
  if (cols.empty()) fail(ErrorCode::InvalidArgument, "profile has no psi <= 0 samples");
  const auto wp = trapezoid_weights(psi_q);
  const auto wt = trapezoid_weights(tp.theta_s);
  double integral = 0.0;
  for (std::size_t t = 0; t < tp.theta_s.size(); ++t)
    for (std::size_t q = 0; q < cols.size(); ++q)
      integral += wt[t] * std::sin(tp.theta_s[t]) * wp[q] * tp.at(t, cols[q]);
  if (!(integral > 0.0)) return;
  const double target = (kPi / 180.0) * (kPi / 180.0) / 4.0;
  for (double& v : tp.values) v *= target / integral;
}

std::vector<double> radial_profile(const TransverseProfile& tp) {
  const std::size_t np = tp.psi_s.size();
  const auto wp = trapezoid_weights(tp.psi_s);
  const double span = np > 1 ? tp.psi_s.back() - tp.psi_s.front() : 1.0;
  std::vector<double> r(tp.theta_s.size(), 0.0);
  for (std::size_t t = 0; t < r.size(); ++t) {
    for (std::size_t p = 0; p < np; ++p) r[t] += wp[p] * tp.at(t, p);
    r[t] /= span;
  }
  return r;
}

std::vector<Ring> find_rings(const std::vector<double>& theta, const std::vector<double>& radial,
                             const RingRule& rule) {
  if (theta.size() != radial.size()) fail(ErrorCode::InvalidArgument, "find_rings: size mismatch");
  std::vector<Ring> rings;
  const std::size_t n = radial.size();
  if (n < 3) return rings;
  const double vmax = *std::max_element(radial.begin(), radial.end());
  if (!(vmax > 0.0)) return rings;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = radial[i];
    if (!(v > radial[i - 1] && v >= radial[i + 1])) continue;
    if (v < rule.min_height * vmax) continue;
    double left = v;
    for (std::size_t j = i; j-- > 0;) {
      if (radial[j] > v) break;
      left = std::min(left, radial[j]);
    }
    double right = v;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (radial[j] > v) break;
      right = std::min(right, radial[j]);
    }
    const double prominence = v - std::max(left, right);
    if (prominence < rule.min_prominence * vmax) continue;
    rings.push_back({theta[i], v, prominence});
  }
  return rings;
}

std::vector<double> IdlerWindow::delta_theta() const { return centred_axis(half_theta, n_theta); }
std::vector<double> IdlerWindow::delta_psi() const { return centred_axis(half_psi, n_psi); }

std::vector<Island> find_islands(const std::vector<double>& values, std::size_t n_theta,
                                 std::size_t n_psi, const std::vector<double>& delta_theta,
                                 const std::vector<double>& delta_psi, double threshold) {
  std::vector<Island> islands;
  if (values.empty()) return islands;
  const double vmax = *std::max_element(values.begin(), values.end());
  if (!(vmax > 0.0)) return islands;
  const double cut = threshold * vmax;
  std::vector<int> label(values.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < values.size(); ++start) {
    if (label[start] >= 0 || values[start] < cut) continue;
    Island isl{0.0, 0.0, 0.0, 0.0, 0, n_theta, 0, n_psi, 0};
    const int id = static_cast<int>(islands.size());
    label[start] = id;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t t = k / n_psi, p = k % n_psi;
      const double v = values[k];
      isl.weight += v;
      isl.peak = std::max(isl.peak, v);
      isl.theta_centroid += v * delta_theta[t];
      isl.psi_centroid += v * delta_psi[p];
      ++isl.cells;
      isl.theta_min = std::min(isl.theta_min, t);
      isl.theta_max = std::max(isl.theta_max, t);
      isl.psi_min = std::min(isl.psi_min, p);
      isl.psi_max = std::max(isl.psi_max, p);
      auto visit = [&](std::size_t nk) {
        if (label[nk] < 0 && values[nk] >= cut) {
          label[nk] = id;
          stack.push_back(nk);
        }
      };
      if (t > 0) visit(k - n_psi);
      if (t + 1 < n_theta) visit(k + n_psi);
      if (p > 0) visit(k - 1);
      if (p + 1 < n_psi) visit(k + 1);
    }
    isl.theta_centroid /= isl.weight;
    isl.psi_centroid /= isl.weight;
    islands.push_back(isl);
  }
  std::stable_sort(islands.begin(), islands.end(),
                   [](const Island& a, const Island& b) { return a.weight > b.weight; });
  return islands;
}

AmplitudeGrid idler_window_grid(const std::vector<double>& omega_s, double theta_s0,
                                double psi_s0, const IdlerWindow& window) {
  AmplitudeGrid g;
  g.omega_s = omega_s;
  g.theta_s = {theta_s0};
  g.psi_s = {psi_s0};
  for (double d : window.delta_theta()) g.theta_i.push_back(-theta_s0 + d);
  for (double d : window.delta_psi()) g.psi_i.push_back(psi_s0 + d);
  return g;
}

namespace {

double window_integral(const CorrelatedArea& ca) {
  const auto wt = trapezoid_weights(ca.delta_theta);
  const auto wp = trapezoid_weights(ca.delta_psi);
  double sum = 0.0;
  for (std::size_t a = 0; a < wt.size(); ++a)
    for (std::size_t b = 0; b < wp.size(); ++b) sum += wt[a] * wp[b] * ca.at(a, b);
  return sum;
}

}  // namespace

CorrelatedArea correlated_area(const PairDensity& pd, double theta_s0, double psi_s0,
                               const IdlerWindow& window, const ChannelSelection& sel) {
  CorrelatedArea ca;
  ca.theta_s0 = theta_s0;
  ca.psi_s0 = psi_s0;
  ca.theta_i0 = -theta_s0;
  ca.psi_i0 = psi_s0;
  ca.delta_theta = window.delta_theta();
  ca.delta_psi = window.delta_psi();
  const std::size_t nt = ca.delta_theta.size(), np = ca.delta_psi.size();
  ca.values.assign(nt * np, 0.0);

  const std::size_t t0 = locate(pd.grid.theta_s, theta_s0, "theta_s0");
  const std::size_t p0 = locate(pd.grid.psi_s, psi_s0, "psi_s0");
  const auto& om = pd.grid.omega_s;
  const std::size_t nw = om.size();
  const std::size_t nts = pd.grid.theta_s.size(), nps = pd.grid.psi_s.size();
  double window_weight = 0.0;

  if (pd.collimated) {
    // Mass per unit ω along the idler curve, linearly interpolated between
    // samples and deposited in sub-steps finer than a quarter cell.
    std::vector<double> f(nw, 0.0), dth(nw, 0.0), dps(nw, 0.0);
    std::vector<bool> ok(nw, false);
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t k = (w * nts + t0) * nps + p0;
      if (pd.idler[k].evanescent) continue;
      ok[w] = true;
      f[w] = pd.selected(k, sel) / std::cos(pd.idler[k].theta);
      dth[w] = pd.idler[k].theta - ca.theta_i0;
      dps[w] = pd.idler[k].psi - ca.psi_i0;
    }
    const double cell_t = nt > 1 ? ca.delta_theta[1] - ca.delta_theta[0] : 2.0 * window.half_theta;
    const double cell_p = np > 1 ? ca.delta_psi[1] - ca.delta_psi[0] : 2.0 * window.half_psi;
    const double step = 0.25 * (cell_t > 0.0 ? cell_t : 1e-3);
    for (std::size_t w = 0; w + 1 < nw; ++w) {
      if (!ok[w] || !ok[w + 1]) continue;
      const double dw = om[w + 1] - om[w];
      const double span = std::max(std::abs(dth[w + 1] - dth[w]), std::abs(dps[w + 1] - dps[w]));
      const std::size_t sub = 1 + static_cast<std::size_t>(span / step);
      for (std::size_t s = 0; s < sub; ++s) {
        const double u = (s + 0.5) / sub;
        const double mass = dw / sub * ((1.0 - u) * f[w] + u * f[w + 1]);
        ca.total_weight += mass;
        deposit(ca.values, ca.delta_theta, ca.delta_psi, (1.0 - u) * dth[w] + u * dth[w + 1],
                (1.0 - u) * dps[w] + u * dps[w + 1], mass);
      }
    }
    window_weight = std::accumulate(ca.values.begin(), ca.values.end(), 0.0);
    const double area = (cell_t > 0.0 ? cell_t : 1.0) * (cell_p > 0.0 ? cell_p : 1.0);
    for (double& v : ca.values) v /= area;
  } else {
    const auto& ti = pd.grid.theta_i;
    const auto& pi = pd.grid.psi_i;
    if (ti.size() != nt || pi.size() != np) {
      fail(ErrorCode::InvalidArgument, "focused density was not sampled on this idler window");
    }
    bool aligned = true;
    for (std::size_t a = 0; a < nt; ++a)
      aligned = aligned && std::abs(ti[a] - ca.theta_i0 - ca.delta_theta[a]) <= 1e-9;
    for (std::size_t b = 0; b < np; ++b)
      aligned = aligned && std::abs(pi[b] - ca.psi_i0 - ca.delta_psi[b]) <= 1e-9;
    if (!aligned) {
      fail(ErrorCode::InvalidArgument, "focused density was not sampled on this idler window");
    }
    const auto ww = trapezoid_weights(om);
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t base = ((w * nts + t0) * nps + p0) * nt * np;
      for (std::size_t j = 0; j < nt * np; ++j) ca.values[j] += ww[w] * pd.selected(base + j, sel);
    }
    window_weight = window_integral(ca);
    ca.total_weight = window_weight;
  }

  if (!(ca.total_weight > 0.0) || window_weight < 1e-6 * ca.total_weight) {
    throw Error(ErrorCode::WindowMiss, "idler window holds less than 1e-6 of the weight");
  }
  ca.islands = find_islands(ca.values, nt, np, ca.delta_theta, ca.delta_psi);
  return ca;
}

CorrelatedArea focused_correlated_area(const TwoPhotonEngine& engine,
                                       const std::vector<double>& omega_s, double theta_s0,
                                       double psi_s0, const IdlerWindow& window,
                                       const ChannelSelection& sel, int threads,
                                       std::vector<std::string>* warnings) {
  if (engine.pump().collimated()) {
    fail(ErrorCode::InvalidArgument, "focused_correlated_area needs a focused pump");
  }
  CorrelatedArea ca;
  ca.theta_s0 = theta_s0;
  ca.psi_s0 = psi_s0;
  ca.theta_i0 = -theta_s0;
  ca.psi_i0 = psi_s0;
  ca.delta_theta = window.delta_theta();
  ca.delta_psi = window.delta_psi();
  const std::size_t cells = ca.delta_theta.size() * ca.delta_psi.size();
  ca.values.assign(cells, 0.0);

  const auto ww = trapezoid_weights(omega_s);
  const std::size_t chunk = std::max<std::size_t>(1, kFocusedChunkRecords / std::max<std::size_t>(cells, 1));
  for (std::size_t begin = 0; begin < omega_s.size(); begin += chunk) {
    const std::size_t end = std::min(omega_s.size(), begin + chunk);
    const std::vector<double> part(omega_s.begin() + begin, omega_s.begin() + end);
    const auto phi = assemble_phi(engine, idler_window_grid(part, theta_s0, psi_s0, window), threads);
    if (warnings) {
      for (const auto& w : phi.warnings) {
        if (std::find(warnings->begin(), warnings->end(), w) == warnings->end()) warnings->push_back(w);
      }
    }
    const auto pd = pair_density(phi);
    for (std::size_t w = 0; w < part.size(); ++w) {
      for (std::size_t j = 0; j < cells; ++j) ca.values[j] += ww[begin + w] * pd.selected(w * cells + j, sel);
    }
  }
  ca.total_weight = window_integral(ca);
  if (!(ca.total_weight > 0.0)) {
    throw Error(ErrorCode::WindowMiss, "idler window holds less than 1e-6 of the weight");
  }
  ca.islands = find_islands(ca.values, ca.delta_theta.size(), ca.delta_psi.size(), ca.delta_theta,
                            ca.delta_psi);
  return ca;
}

double azimuthal_spread(const CorrelatedArea& ca) {
  const std::size_t nt = ca.delta_theta.size(), np = ca.delta_psi.size();
  std::vector<double> marg(np, 0.0);
  for (std::size_t a = 0; a < nt; ++a)
    for (std::size_t b = 0; b < np; ++b) marg[b] += ca.at(a, b);
  const double m0 = std::accumulate(marg.begin(), marg.end(), 0.0);
  if (!(m0 > 0.0)) return 0.0;
  double m1 = 0.0;
  for (std::size_t b = 0; b < np; ++b) m1 += marg[b] * ca.delta_psi[b];
  m1 /= m0;
  double m2 = 0.0;
  for (std::size_t b = 0; b < np; ++b) m2 += marg[b] * (ca.delta_psi[b] - m1) * (ca.delta_psi[b] - m1);
  return std::sqrt(m2 / m0);
}

double total_pairs(const SignalDensity& ns) {
  const auto ww = trapezoid_weights(ns.omega_s);
  const auto wt = trapezoid_weights(ns.theta_s);
  const auto wp = trapezoid_weights(ns.psi_s);
  double s = 0.0;
  for (std::size_t w = 0; w < ns.omega_s.size(); ++w)
    for (std::size_t t = 0; t < ns.theta_s.size(); ++t) {
      const double jt = ww[w] * wt[t] * std::abs(std::sin(ns.theta_s[t]));
      for (std::size_t p = 0; p < ns.psi_s.size(); ++p) s += jt * wp[p] * ns.values[ns.index(w, t, p)];
    }
  return s;
}

std::string profile_csv(const TransverseProfile& tp,
                        const std::vector<std::pair<std::string, std::string>>& meta) {
  CsvTable table;
  table.metadata = meta;
  table.columns = {"theta_s_deg", "psi_s_deg", "n_s_tr"};
  for (std::size_t t = 0; t < tp.theta_s.size(); ++t)
    for (std::size_t p = 0; p < tp.psi_s.size(); ++p)
      table.rows.push_back({tp.theta_s[t] / kDeg, tp.psi_s[p] / kDeg, tp.at(t, p)});
  return table.render();
}

std::string spectrum_map_csv(const SignalDensity& eta, std::size_t psi_index, double omega_p0,
                             const std::vector<std::pair<std::string, std::string>>& meta) {
  CsvTable table;
  table.metadata = meta;
  table.metadata.emplace_back("psi_s_deg", format_g17(eta.psi_s.at(psi_index) / kDeg));
  table.columns = {"two_omega_s_over_omega_p0", "theta_s_deg", "eta_s"};
  for (std::size_t w = 0; w < eta.omega_s.size(); ++w)
    for (std::size_t t = 0; t < eta.theta_s.size(); ++t)
      table.rows.push_back({2.0 * eta.omega_s[w] / omega_p0, eta.theta_s[t] / kDeg,
                            eta.values[eta.index(w, t, psi_index)]});
  return table.render();
}

std::string corr_area_csv(const CorrelatedArea& ca,
                          const std::vector<std::pair<std::string, std::string>>& meta) {
  CsvTable table;
  table.metadata = meta;
  table.metadata.emplace_back("theta_s0_deg", format_g17(ca.theta_s0 / kDeg));
  table.metadata.emplace_back("psi_s0_deg", format_g17(ca.psi_s0 / kDeg));
  table.metadata.emplace_back("theta_i0_deg", format_g17(ca.theta_i0 / kDeg));
  table.metadata.emplace_back("psi_i0_deg", format_g17(ca.psi_i0 / kDeg));
  table.metadata.emplace_back("islands", std::to_string(ca.islands.size()));
  table.columns = {"delta_theta_i_deg", "delta_psi_i_deg", "n_cor"};
  for (std::size_t a = 0; a < ca.delta_theta.size(); ++a)
    for (std::size_t b = 0; b < ca.delta_psi.size(); ++b)
      table.rows.push_back({ca.delta_theta[a] / kDeg, ca.delta_psi[b] / kDeg, ca.at(a, b)});
  return table.render();
}

}  // namespace spdc
