#include "spdc/two_photon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "spdc/constants.hpp"
#include "spdc/error.hpp"
#include "spdc/parallel.hpp"
#include "spdc/simd/kernels.hpp"

namespace spdc {

std::string to_string(Channel c) {
  static constexpr const char* names[] = {"FF", "FB", "BF", "BB"};
  return names[static_cast<int>(c)];
}

Channel channel_from_string(const std::string& name) {
  for (Channel c : kChannels)
    if (to_string(c) == name) return c;
  fail(ErrorCode::InvalidArgument, "unknown channel '" + name + "'");
}

double ChannelAmplitudes::polarization_sum(Channel c) const {
  double s = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int g = 0; g < 2; ++g) s += std::norm(at(c, b, g));
  return s;
}

TwoPhotonEngine::TwoPhotonEngine(Stack stack, PumpConfig pump, EngineOptions options)
    : stack_(std::move(stack)), pump_(pump), options_(options) {
  validate(pump_);
  if (stack_.size() == 0) fail(ErrorCode::InvalidArgument, "empty stack");

  std::map<const Material*, std::size_t> group_of;
  std::vector<MaterialPtr> group_material;
  for (std::size_t k = 0; k < stack_.size(); ++k) {
    const auto& layer = stack_.layer(k);
    if (!layer.material->is_nonlinear) continue;
    auto [it, fresh] = group_of.try_emplace(layer.material.get(), group_material.size());
    if (fresh) group_material.push_back(layer.material);
    nl_.push_back({k, it->second, layer.length});
  }
  std::stable_sort(nl_.begin(), nl_.end(),
                   [](const NlLayer& a, const NlLayer& b) { return a.group < b.group; });
  for (std::size_t j = 0; j < nl_.size(); ++j) {
    if (groups_.empty() || groups_.back().material != group_material[nl_[j].group]) {
      groups_.push_back({group_material[nl_[j].group], j, j});
    }
    groups_.back().end = j + 1;
    lengths_.push_back(nl_[j].length);
    reference_sum_ += group_material[nl_[j].group]->max_abs_d() * nl_[j].length;
  }

  const double beta = std::sin(pump_.theta_p);
  const TransferChain chain(
      resolve_profile(stack_, pump_.omega0, pump_.polarization, beta, options_.index_model),
      pump_.omega0, beta, pump_.polarization);
  const auto amp = chain.solve_incident(1.0, 0.0);
  for (auto* v : {&pump_re_[0], &pump_re_[1], &pump_im_[0], &pump_im_[1]}) {
    v->resize(nl_.size());
  }
  for (std::size_t j = 0; j < nl_.size(); ++j) {
    const std::size_t r = nl_[j].stack_index + 1;
    pump_re_[0][j] = amp.forward[r].real();
    pump_im_[0][j] = amp.forward[r].imag();
    pump_re_[1][j] = amp.backward[r].real();
    pump_im_[1][j] = amp.backward[r].imag();
    pump_kz_.push_back(chain.kz(r));
    pump_sin_.push_back(chain.sin_theta(r));
    pump_cos_.push_back(chain.cos_theta(r));
  }
}

ModeSolution TwoPhotonEngine::solve_mode(double omega, double abs_sin_theta) const {
  ModeSolution m;
  solve_mode(omega, abs_sin_theta, m);
  return m;
}

void TwoPhotonEngine::solve_mode(double omega, double abs_sin_theta,
                                 ModeSolution& out) const {
  const std::size_t n = nl_.size();
  out.omega = omega;
  out.abs_sin_theta = abs_sin_theta;
  out.cos_theta_out = std::sqrt(std::max(0.0, 1.0 - abs_sin_theta * abs_sin_theta));
  out.layers = n;
  thread_local TransferChain chain;
  thread_local std::vector<cdouble> fw, bw;
  for (int pol = 0; pol < 2; ++pol) {
    const auto p = static_cast<Polarization>(pol);
    chain.compute(resolve_profile(stack_, omega, p, abs_sin_theta, options_.index_model),
                  omega, abs_sin_theta, p);
    out.kz[pol].resize(n);
    out.sin_int[pol].resize(n);
    out.cos_int[pol].resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t r = nl_[j].stack_index + 1;
      out.kz[pol][j] = chain.kz(r);
      out.sin_int[pol][j] = chain.sin_theta(r);
      out.cos_int[pol][j] = chain.cos_theta(r);
    }
    fw.resize(chain.regions());
    bw.resize(chain.regions());
    for (int o = 0; o < 2; ++o) {
      chain.outgoing_mode(static_cast<Direction>(o), fw, bw);
      for (int d = 0; d < 2; ++d) {
        auto& re = out.u_re[pol][o][d];
        auto& im = out.u_im[pol][o][d];
        re.resize(n);
        im.resize(n);
        const auto& src = d == 0 ? fw : bw;
        for (std::size_t j = 0; j < n; ++j) {
          const cdouble u = src[nl_[j].stack_index + 1];
          re[j] = u.real();
          im[j] = -u.imag();
        }
      }
    }
  }
}

void TwoPhotonEngine::layer_sums(const ModeSolution& s, const ModeSolution& i,
                                 LayerSums& out) const {
  const std::size_t n = nl_.size();
  out.groups = groups_.size();
  out.h.assign(out.groups * LayerSums::per_group, cdouble{});
  if (n == 0) return;

  const auto& kern = simd::kernels();
  thread_local std::vector<double> dk, ire, iim, pre, pim;
  dk.resize(n);
  ire.resize(n);
  iim.resize(n);
  pre.resize(n);
  pim.resize(n);
  const bool pol_independent = options_.index_model == IndexModel::Isotropic;

  for (int a = 0; a < 2; ++a) {
    const double sa = a == 0 ? 1.0 : -1.0;
    for (int bs = 0; bs < 2; ++bs) {
      const double sb = bs == 0 ? 1.0 : -1.0;
      for (int gi = 0; gi < 2; ++gi) {
        const double sg = gi == 0 ? 1.0 : -1.0;
        for (int beta = 0; beta < 2; ++beta) {
          for (int gamma = 0; gamma < 2; ++gamma) {
            if (!pol_independent || (beta == 0 && gamma == 0)) {
              for (std::size_t j = 0; j < n; ++j) {
                dk[j] = sa * pump_kz_[j] - sb * s.kz[beta][j] - sg * i.kz[gamma][j];
              }
              kern.phase_integrals(n, dk.data(), lengths_.data(), ire.data(), iim.data());
            }
            const auto& ar = pump_re_[a];
            const auto& ai = pump_im_[a];
            for (std::size_t j = 0; j < n; ++j) {
              pre[j] = ar[j] * ire[j] - ai[j] * iim[j];
              pim[j] = ar[j] * iim[j] + ai[j] * ire[j];
            }
            for (std::size_t g = 0; g < groups_.size(); ++g) {
              const std::size_t b0 = groups_[g].begin, len = groups_[g].end - b0;
              for (Channel ch : kChannels) {
                if (!(options_.channel_mask & channel_bit(ch))) continue;
                const int so = static_cast<int>(signal_direction(ch));
                const int io = static_cast<int>(idler_direction(ch));
                double hr, hi;
                kern.complex_triple_dot(len, pre.data() + b0, pim.data() + b0,
                                        s.u_re[beta][so][bs].data() + b0,
                                        s.u_im[beta][so][bs].data() + b0,
                                        i.u_re[gamma][io][gi].data() + b0,
                                        i.u_im[gamma][io][gi].data() + b0, &hr, &hi);
                out.h[LayerSums::index(g, a, bs, gi, beta, gamma,
                                       static_cast<int>(ch))] = {hr, hi};
              }
            }
          }
        }
      }
    }
  }
}

ChannelAmplitudes TwoPhotonEngine::contract(const LayerSums& h, const ModeSolution& s,
                                            double sign_s, double psi_s,
                                            const ModeSolution& i, double sign_i,
                                            double psi_i) const {
  ChannelAmplitudes out;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const std::size_t j = groups_[g].begin;
    const DTensor& d = groups_[g].material->d;
    Vec3 ep[2], es[2][2], ei[2][2];
    for (int a = 0; a < 2; ++a) {
      ep[a] = polarization_vector(pump_.polarization, static_cast<Direction>(a), pump_sin_[j],
                                  pump_cos_[j], pump_.psi_p);
    }
    for (int pol = 0; pol < 2; ++pol) {
      for (int dir = 0; dir < 2; ++dir) {
        es[pol][dir] =
            polarization_vector(static_cast<Polarization>(pol), static_cast<Direction>(dir),
                                sign_s * s.sin_int[pol][j], s.cos_int[pol][j], psi_s);
        ei[pol][dir] =
            polarization_vector(static_cast<Polarization>(pol), static_cast<Direction>(dir),
                                sign_i * i.sin_int[pol][j], i.cos_int[pol][j], psi_i);
      }
    }
    for (int a = 0; a < 2; ++a) {
      double m[3][3] = {};
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
          for (int z = 0; z < 3; ++z) m[y][z] += d[x][y][z] * ep[a][x];
      for (int beta = 0; beta < 2; ++beta) {
        for (int bs = 0; bs < 2; ++bs) {
          double v[3] = {};
          for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 3; ++z) v[z] += m[y][z] * es[beta][bs][y];
          for (int gamma = 0; gamma < 2; ++gamma) {
            for (int gi = 0; gi < 2; ++gi) {
              const auto& e = ei[gamma][gi];
              const double G = v[0] * e[0] + v[1] * e[1] + v[2] * e[2];
              if (G == 0.0) continue;
              for (Channel ch : kChannels) {
                if (!(options_.channel_mask & channel_bit(ch))) continue;
                out.at(ch, beta, gamma) +=
                    G * h.h[LayerSums::index(g, a, bs, gi, beta, gamma, static_cast<int>(ch))];
              }
            }
          }
        }
      }
    }
  }
  return out;
}

ChannelAmplitudes TwoPhotonEngine::structure_sum(double omega_s, double theta_s,
                                                 double psi_s, double theta_i,
                                                 double psi_i) const {
  const double omega_i = pump_.omega0 - omega_s;
  if (!(omega_s > 0.0) || !(omega_i > 0.0)) {
    fail(ErrorCode::InvalidArgument, "signal frequency outside (0, omega_p)");
  }
  const double ss = std::sin(theta_s), si = std::sin(theta_i);
  const auto s = solve_mode(omega_s, std::abs(ss));
  const auto i = solve_mode(omega_i, std::abs(si));
  LayerSums h;
  layer_sums(s, i, h);
  return contract(h, s, ss < 0.0 ? -1.0 : 1.0, psi_s, i, si < 0.0 ? -1.0 : 1.0, psi_i);
}

double TwoPhotonEngine::frequency_weight(double omega_s) const {
  const double omega_i = pump_.omega0 - omega_s;
  return std::pow(4.0 * omega_s * omega_i / (pump_.omega0 * pump_.omega0), 2.5);
}

double TwoPhotonEngine::pump_jacobian() const { return 1.0 / std::cos(pump_.theta_p); }

double TwoPhotonEngine::prefactor(double omega_s, double theta_s, double psi_s,
                                  double theta_i, double psi_i) const {
  double f = pump_.xi * frequency_weight(omega_s) * pump_jacobian();
  if (!pump_.collimated()) {
    const double omega_i = pump_.omega0 - omega_s;
    const auto ks = transverse_k(omega_s, theta_s, psi_s);
    const auto ki = transverse_k(omega_i, theta_i, psi_i);
    const auto kp = transverse_k(pump_.omega0, pump_.theta_p, pump_.psi_p);
    f *= TransverseEnvelope(pump_.r_p)(ks[0] + ki[0] - kp[0], ks[1] + ki[1] - kp[1]);
  }
  return f;
}

ChannelAmplitudes TwoPhotonEngine::amplitude(double omega_s, double theta_s, double psi_s,
                                             double theta_i, double psi_i) const {
  auto s = structure_sum(omega_s, theta_s, psi_s, theta_i, psi_i);
  const double f = prefactor(omega_s, theta_s, psi_s, theta_i, psi_i);
  for (auto& v : s.v) v *= f;
  return detector_rotation(s, theta_s, psi_s, theta_i, psi_i);
}

ChannelAmplitudes detector_rotation(const ChannelAmplitudes& in, double theta_s,
                                    double psi_s, double theta_i, double psi_i) {
  const double zs = detector_angle(theta_s, psi_s);
  const double zi = detector_angle(theta_i, psi_i);
  ChannelAmplitudes out;
  for (Channel ch : kChannels) {
    cdouble tmp[2][2];
    for (int g = 0; g < 2; ++g) {
      const auto r = to_detector_basis(in.at(ch, 0, g), in.at(ch, 1, g), zs);
      tmp[0][g] = r[0];
      tmp[1][g] = r[1];
    }
    for (int b = 0; b < 2; ++b) {
      const auto r = to_detector_basis(tmp[b][0], tmp[b][1], zi);
      out.at(ch, b, 0) = r[0];
      out.at(ch, b, 1) = r[1];
    }
  }
  return out;
}

std::size_t TwoPhotonAmplitude::index(std::size_t w, std::size_t t, std::size_t p,
                                      std::size_t ti, std::size_t pi) const {
  const std::size_t base = (w * grid.theta_s.size() + t) * grid.psi_s.size() + p;
  if (collimated) return base;
  return (base * grid.theta_i.size() + ti) * grid.psi_i.size() + pi;
}

namespace {

void check_grid(const AmplitudeGrid& g, double omega_p, bool collimated) {
  if (g.omega_s.empty() || g.theta_s.empty() || g.psi_s.empty()) {
    fail(ErrorCode::InvalidArgument, "empty signal grid");
  }
  if (!collimated && (g.theta_i.empty() || g.psi_i.empty())) {
    fail(ErrorCode::InvalidArgument, "focused pump needs idler grids");
  }
  for (double w : g.omega_s) {
    if (!(w > 0.0 && w < omega_p)) {
      fail(ErrorCode::InvalidArgument, "signal frequency outside (0, omega_p)");
    }
  }
  auto angles = [](const std::vector<double>& v) {
    for (double a : v) {
      if (!(std::abs(a) < kPi / 2)) {
        fail(ErrorCode::InvalidArgument, "angles must lie in (-pi/2, pi/2)");
      }
    }
  };
  angles(g.theta_s);
  angles(g.theta_i);
  for (double a : g.psi_s)
    if (!(std::abs(a) <= kPi / 2)) fail(ErrorCode::InvalidArgument, "psi out of range");
  for (double a : g.psi_i)
    if (!(std::abs(a) <= kPi / 2)) fail(ErrorCode::InvalidArgument, "psi out of range");
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

TwoPhotonAmplitude assemble_phi(const TwoPhotonEngine& engine, const AmplitudeGrid& grid,
                                int threads) {
  const auto& pump = engine.pump();
  TwoPhotonAmplitude out;
  out.grid = grid;
  out.collimated = pump.collimated();
  out.stack_hash = engine.stack().hash();
  out.pump = pump;
  check_grid(grid, pump.omega0, out.collimated);
  out.warnings = sampling_warnings(engine, grid);

  const std::size_t nw = grid.omega_s.size(), nt = grid.theta_s.size(),
                    np = grid.psi_s.size();
  const std::size_t nti = out.collimated ? 1 : grid.theta_i.size();
  const std::size_t npi = out.collimated ? 1 : grid.psi_i.size();
  out.values.resize(nw * nt * np * nti * npi);
  if (out.collimated) out.idler.resize(nw * nt * np);

  parallel_for(nw * nt, threads, [&](std::size_t row) {
    const std::size_t w = row / nt, t = row % nt;
    const double ws = grid.omega_s[w], wi = pump.omega0 - ws;
    const double ts = grid.theta_s[t];
    ModeSolution sm, im;
    LayerSums h;
    engine.solve_mode(ws, std::abs(std::sin(ts)), sm);
    if (out.collimated) {
      double cached_sin = -1.0;
      for (std::size_t p = 0; p < np; ++p) {
        const double ps = grid.psi_s[p];
        const auto dir = idler_direction(pump.omega0, pump.theta_p, pump.psi_p, ws, ts, ps);
        const std::size_t k = out.index(w, t, p);
        out.idler[k] = dir;
        if (dir.evanescent) continue;
        const double si = std::abs(std::sin(dir.theta));
        if (si != cached_sin) {
          engine.solve_mode(wi, si, im);
          engine.layer_sums(sm, im, h);
          cached_sin = si;
        }
        auto s = engine.contract(h, sm, sign_of(std::sin(ts)), ps, im,
                                 sign_of(std::sin(dir.theta)), dir.psi);
        const double f = engine.prefactor(ws, ts, ps, dir.theta, dir.psi);
        for (auto& v : s.v) v *= f;
        out.values[k] = detector_rotation(s, ts, ps, dir.theta, dir.psi);
      }
      return;
    }
    for (std::size_t ti = 0; ti < nti; ++ti) {
      const double thi = grid.theta_i[ti];
      engine.solve_mode(wi, std::abs(std::sin(thi)), im);
      engine.layer_sums(sm, im, h);
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t pi = 0; pi < npi; ++pi) {
          const double ps = grid.psi_s[p], psi = grid.psi_i[pi];
          const double f = engine.prefactor(ws, ts, ps, thi, psi);
          auto& dst = out.values[out.index(w, t, p, ti, pi)];
          if (f == 0.0) continue;
          auto s = engine.contract(h, sm, sign_of(std::sin(ts)), ps, im,
                                   sign_of(std::sin(thi)), psi);
          for (auto& v : s.v) v *= f;
          dst = detector_rotation(s, ts, ps, thi, psi);
        }
      }
    }
  });
  return out;
}

std::vector<std::string> sampling_warnings(const TwoPhotonEngine& engine,
                                           const AmplitudeGrid& grid) {
  std::vector<std::string> warnings;
  if (engine.nonlinear_layers() == 0) return warnings;
  const auto& pump = engine.pump();
  const double total = engine.stack().total_length();
  auto mismatch = [&](double ws, double ts) {
    const auto dir = idler_direction(pump.omega0, pump.theta_p, pump.psi_p, ws, ts, 0.0);
    if (dir.evanescent) return std::nan("");
    const auto s = engine.solve_mode(ws, std::abs(std::sin(ts)));
    const auto i = engine.solve_mode(pump.omega0 - ws, std::abs(std::sin(dir.theta)));
    // F-F-F mismatch in the first nonlinear layer
    const auto p = engine.solve_mode(pump.omega0, std::abs(std::sin(pump.theta_p)));
    return (p.kz[static_cast<int>(pump.polarization)][0] - s.kz[0][0] - i.kz[0][0]) * total;
  };
  auto scan = [&](const std::vector<double>& axis, auto&& eval, const char* name) {
    if (axis.size() < 2) return;
    double prev = eval(axis[0]);
    for (std::size_t k = 1; k < axis.size(); ++k) {
      const double cur = eval(axis[k]);
      if (std::isfinite(prev) && std::isfinite(cur) && std::abs(cur - prev) > kPi) {
        std::ostringstream os;
        os << "GridTooCoarse: phase mismatch changes by " << std::abs(cur - prev)
           << " rad between adjacent " << name << " samples " << k - 1 << " and " << k;
        warnings.push_back(os.str());
        return;
      }
      prev = cur;
    }
  };
  const double ws_mid = grid.omega_s[grid.omega_s.size() / 2];
  const double ts_mid = grid.theta_s[grid.theta_s.size() / 2];
  scan(grid.omega_s, [&](double w) { return mismatch(w, ts_mid); }, "omega_s");
  scan(grid.theta_s, [&](double t) { return mismatch(ws_mid, t); }, "theta_s");
  return warnings;
}

}  // namespace spdc
