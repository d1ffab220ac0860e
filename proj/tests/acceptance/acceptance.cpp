// Acceptance suite: one line per check, PASS/FAIL at the stated tolerance.
// Checks listed in kExpectedFailures are known to fail with the shipped
// material data; they print XFAIL (or XPASS) and do not change the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "spdc/config.hpp"
#include "spdc/constants.hpp"
#include "spdc/designer.hpp"
#include "spdc/error.hpp"
#include "spdc/export_schema.hpp"
#include "spdc/geometry.hpp"
#include "spdc/linear_optics.hpp"
#include "spdc/observables.hpp"
#include "spdc/two_photon.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace spdc;

namespace {

const fs::path kConfigDir = SPDC_ACCEPTANCE_CONFIG_DIR;
const fs::path kDataDir = SPDC_ACCEPTANCE_DATA_DIR;
const char* const kConfigs[] = {"n11", "n51", "n101"};
const char* const kScenarios[] = {"transmission", "spectrum", "profile", "corr-area", "design-sweep"};

const std::set<std::string> kExpectedFailures = {
    "antisymmetry/n51-mirror",
    "corr-area/n11",
    "corr-area/n101",
    "sweep/n101-isolated",
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Report {
 public:
  explicit Report(std::FILE* copy) : copy_(copy) {}

  void check(const std::string& id, bool pass, const std::string& detail) {
    const bool expected = kExpectedFailures.count(id) > 0;
    const char* tag = pass ? (expected ? "XPASS" : "PASS") : (expected ? "XFAIL" : "FAIL");
    if (pass) ++passed_;
    if (!pass && expected) ++xfail_;
    if (!pass && !expected) ++failed_;
    if (pass && expected) ++xpass_;
    line("%-5s  %-26s %s\n", tag, id.c_str(), detail.c_str());
  }

  // Runs a check body; an exception counts as a failure of `id`.
  void guard(const std::string& id, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(id, false, std::string("error: ") + e.what());
    }
  }

  int summary() const {
    line("\n%d passed (%d unexpectedly), %d expected failures, %d unexpected failures\n", passed_, xpass_,
         xfail_, failed_);
    return failed_ == 0 ? 0 : 1;
  }

 template <typename... Args>
  void line(const char* f, Args... args) const {
    for (std::FILE* out : {stdout, copy_}) {
      if (!out) continue;
      std::fprintf(out, f, args...);
      std::fflush(out);
    }
  }

 private:
  std::FILE* copy_;
  int passed_ = 0, failed_ = 0, xfail_ = 0, xpass_ = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int hardware_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

class Workspace {
 public:
  Workspace() {
    std::random_device rd;
    root_ = fs::temp_directory_path() / ("spdc-acceptance-" + std::to_string(rd()));
    fs::create_directories(root_);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }
  const fs::path& root() const { return root_; }

  // Shipped config with the material path made absolute and regex edits applied.
  fs::path variant(const std::string& name, const std::string& tag,
                   const std::vector<std::pair<std::string, std::string>>& edits = {}) const {
    auto text = slurp(kConfigDir / (name + ".cfg"));
    text = std::regex_replace(text, std::regex(R"(materials:\s*\S+)"),
                              "materials: " + (kDataDir / "materials.yaml").string());
    for (const auto& [pattern, repl] : edits) {
      const std::regex re(pattern);
      if (!std::regex_search(text, re)) throw std::runtime_error("config edit did not apply: " + pattern);
      text = std::regex_replace(text, re, repl);
    }
    const auto path = root_ / (tag + ".cfg");
    std::ofstream(path, std::ios::binary) << text;
    return path;
  }

  fs::path run(const std::string& command, const fs::path& cfg, const std::string& out_tag,
               std::vector<std::string> extra = {}) const {
    const auto out = root_ / out_tag;
    fs::create_directories(out);
    std::vector<std::string> args = {command, "--config", cfg.string(), "--out", out.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (code != 0) throw std::runtime_error(command + " exited " + std::to_string(code) + ": " + e.str());
    return out;
  }

 private:
  fs::path root_;
};

// ---------------------------------------------------------------- linear optics

void unitarity(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> count(1, 101);
  std::uniform_real_distribution<double> index(1.2, 3.5), length(20e-9, 400e-9), lambda(400e-9, 1200e-9);
  double worst_energy = 0.0, worst_recip = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Layer> layers;
    const int n = trial == 0 ? 101 : count(rng);
    for (int i = 0; i < n; ++i) layers.push_back({make_isotropic("m" + std::to_string(i), index(rng)), length(rng)});
    const Stack forward(layers);
    std::reverse(layers.begin(), layers.end());
    const Stack backward(layers);
    const double omega = omega_from_wavelength(lambda(rng));
    for (double deg : {0.0, 15.0, 30.0, 45.0, 60.0}) {
      const double beta = std::sin(deg * kDeg);
      for (auto pol : kPolarizations) {
        const TransferChain lr(resolve_profile(forward, omega, pol, beta), omega, beta, pol);
        const TransferChain rl(resolve_profile(backward, omega, pol, beta), omega, beta, pol);
        worst_energy = std::max({worst_energy, std::abs(lr.transmittance() + lr.reflectance() - 1.0),
                                 std::abs(rl.transmittance() + rl.reflectance() - 1.0)});
        worst_recip = std::max(worst_recip, std::abs(lr.t() - rl.t()));
      }
    }
  }
  const double secs = seconds_since(t0);
  r.check("unitarity", worst_energy < 1e-10 && worst_recip < 1e-10 && secs < 10.0,
          fmt("max|T+R-1| %.2e, max|t_LR-t_RL| %.2e, %.2f s", worst_energy, worst_recip, secs));
}

void scaling_law(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto stack = build_ab_stack(make_isotropic("a", 2.4), make_isotropic("b", 2.1), 21, 85e-9, 70e-9);
  const double w0 = omega_from_wavelength(600e-9);
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(w0 * (0.5 + i / 2000.0));
  double worst = 0.0;
  for (double s : {0.5, 2.0}) {
    std::vector<double> stretched;
    for (double w : grid) stretched.push_back(w * s);
    const auto scaled = scale_stack(stack, s);
    for (double deg : {0.0, 35.0}) {
      const auto a = transmission_spectrum(scaled, deg * kDeg, grid);
      const auto b = transmission_spectrum(stack, deg * kDeg, stretched);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        worst = std::max({worst, std::abs(a.t_te[k] - b.t_te[k]), std::abs(a.t_tm[k] - b.t_tm[k])});
      }
    }
  }
  const double secs = seconds_since(t0);
  r.check("scaling-law", worst < 1e-9 && secs < 5.0, fmt("max|T_s(w)-T(ws)| %.2e, %.2f s", worst, secs));
}

void fresnel(Report& r) {
  OpticalProfile p;
  p.n_in = 1.0;
  p.n_out = 2.0;
  const double omega = omega_from_wavelength(800e-9);
  double worst = 0.0;
  for (auto pol : kPolarizations) {
    worst = std::max(worst, std::abs(TransferChain(p, omega, 0.0, pol).transmittance() - 8.0 / 9.0));
  }
  r.check("fresnel", worst < 1e-14, fmt("|T-8/9| %.2e", worst));
}

// ------------------------------------------------------------------ kinematics

void kinematics(Report& r) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w_lo = omega_from_wavelength(1000e-9), w_hi = omega_from_wavelength(250e-9);
  double worst = 0.0;
  int evanescent = 0, misflagged = 0;
  for (int k = 0; k < 10000; ++k) {
    const double wp = w_lo + (w_hi - w_lo) * u(rng);
    const double ws = wp * (0.02 + 0.96 * u(rng));
    const double ts = (u(rng) - 0.5) * kPi * 0.999;
    const double ps = (u(rng) - 0.5) * kPi;
    const auto idl = idler_direction(wp, 0.0, 0.0, ws, ts, ps);
    const bool should_vanish = ws / (wp - ws) * std::abs(std::sin(ts)) > 1.0;
    if (idl.evanescent != should_vanish) ++misflagged;
    if (idl.evanescent) {
      ++evanescent;
      continue;
    }
    const auto kp = transverse_k(wp, 0.0, 0.0);
    const auto kS = transverse_k(ws, ts, ps);
    const auto kI = transverse_k(wp - ws, idl.theta, idl.psi);
    const double scale = wp / PhysicalConstants::c;
    for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(kp[c] - kS[c] - kI[c]) / scale);
  }
  r.check("kinematics", worst < 1e-12 && misflagged == 0,
          fmt("max relative residual %.2e over %d propagating draws, %d misflagged", worst, 10000 - evanescent,
              misflagged));

  int broken = 0;
  for (int k = 0; k < 10000; ++k) {
    const double wp = w_lo + (w_hi - w_lo) * u(rng);
    const double ts = (u(rng) - 0.5) * kPi * 0.999;
    const double ps = (u(rng) - 0.5) * kPi;
    const auto idl = idler_direction(wp, 0.0, 0.0, wp / 2, ts, ps);
    if (idl.evanescent || idl.theta != -ts || idl.psi != ps) ++broken;
  }
  r.check("kinematics/degenerate", broken == 0, fmt("%d of 10000 degenerate draws not mirrored exactly", broken));
}

// ----------------------------------------------------------------- two-photon

void bulk_limit(Report& r) {
  DContracted d{};
  d[0][0] = 1.0;
  const double L = 3e-6;
  PumpConfig pump;
  pump.omega0 = omega_from_wavelength(400e-9);
  const TwoPhotonEngine engine(Stack({{make_isotropic("matched", 1.0, d), L}}), pump);
  const double c = PhysicalConstants::c;
  const double ws = 0.47 * pump.omega0, wi = pump.omega0 - ws;
  const auto at0 = engine.structure_sum(ws, 0.0, 0.0, 0.0, 0.0).at(Channel::FF, 0, 0);
  const cdouble scale = at0 / std::polar(L, (ws + wi) / c * L);
  double worst = 0.0, max_h = 0.0;
  for (int k = 1; k <= 400; ++k) {
    const double ts = k * 0.003;
    const auto idl = idler_direction(pump.omega0, 0, 0, ws, ts, 0.0);
    const double ks = ws / c * std::cos(ts), ki = wi / c * std::cos(idl.theta);
    const double h = (pump.omega0 / c - ks - ki) * L / 2;
    const cdouble expected = scale * std::polar(L * std::sin(h) / h, (ks + ki) * L + h);
    const auto got = engine.structure_sum(ws, ts, 0.0, idl.theta, idl.psi).at(Channel::FF, 0, 0);
    worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    max_h = std::max(max_h, std::abs(h));
  }
  r.check("bulk-sinc", worst < 1e-6, fmt("max relative error %.2e, |dK L/2| up to %.1f", worst, max_h));
}

void symmetric_zero(Report& r) {
  for (const char* name : kConfigs) {
    const auto cfg = load_config(kConfigDir / (std::string(name) + ".cfg"));
    const auto& sp = *cfg.spectrum;
    EngineOptions opt;
    opt.index_model = cfg.index_model;
    const TwoPhotonEngine engine(cfg.structure, cfg.pump, opt);
    const double wp = cfg.pump.omega0, psi = sp.psi_deg * kDeg;
    AmplitudeGrid g;
    for (std::size_t k = 0; k < sp.n_omega; ++k) {
      g.omega_s.push_back(wp / 2 * (sp.two_omega.lo + (sp.two_omega.hi - sp.two_omega.lo) * k / (sp.n_omega - 1)));
    }
    for (std::size_t k = 0; k < sp.n_theta; ++k) {
      g.theta_s.push_back(kDeg * (sp.theta_deg.lo + (sp.theta_deg.hi - sp.theta_deg.lo) * k / (sp.n_theta - 1)));
    }
    g.psi_s = {psi};
    const auto phi = assemble_phi(engine, g, hardware_threads());
    double grid_max = 0.0;
    for (const auto& a : phi.values)
      for (auto v : a.v) grid_max = std::max(grid_max, std::abs(v));
    double worst = 0.0;
    for (double ts : g.theta_s) {
      const auto a = engine.amplitude(wp / 2, ts, psi, -ts, psi);
      for (int p = 0; p < 2; ++p) {
        worst = std::max({worst, std::abs(a.at(Channel::FF, p, p)), std::abs(a.at(Channel::BB, p, p))});
      }
    }
    const double ratio = worst / grid_max;
    r.check(std::string("symmetric-zero/") + name, grid_max > 0.0 && ratio < 1e-10,
            fmt("max|phi_pp| / grid max %.2e", ratio));
  }
}

// ------------------------------------------------------------------ scenarios

struct Runs {
  std::map<std::string, fs::path> first;  // config -> output directory
};

std::vector<double> ring_angles(const fs::path& dir) {
  std::vector<double> out;
  const auto doc = json::parse(slurp(dir / "rings.json"));
  for (const auto& ring : doc.at("rings")) out.push_back(ring.at("theta_deg"));
  return out;
}

void ring_counts(Report& r, const Runs& runs) {
  const std::map<std::string, std::size_t> want = {{"n11", 1}, {"n51", 2}, {"n101", 5}};
  for (const char* name : kConfigs) {
    const auto rings = ring_angles(runs.first.at(name));
    std::string where;
    for (double t : rings) where += fmt(" %.1f", t);
    r.check(std::string("rings/") + name, rings.size() == want.at(name),
            fmt("%zu rings (want %zu) at", rings.size(), want.at(name)) + where + " deg");
  }
}

void antisymmetry(Report& r, const Runs& runs) {
  const auto cfg = load_config(kConfigDir / "n51.cfg");
  const double theta = ring_angles(runs.first.at("n51")).at(0) * kDeg;
  const double wp = cfg.pump.omega0;
  EngineOptions opt;
  opt.index_model = cfg.index_model;
  opt.channel_mask = cfg.spectrum->selection.channel_mask;
  const TwoPhotonEngine engine(cfg.structure, cfg.pump, opt);
  const std::size_t n = 8001;
  AmplitudeGrid g;
  for (std::size_t k = 0; k < n; ++k) g.omega_s.push_back(wp / 2 * (0.8 + 0.4 * k / (n - 1)));
  g.omega_s[n / 2] = wp / 2;
  g.theta_s = {theta};
  g.psi_s = {cfg.spectrum->psi_deg * kDeg};
  const auto ns = signal_density(pair_density(assemble_phi(engine, g, hardware_threads())), cfg.spectrum->selection);
  const auto eta = relative_density(ns, reference_density(engine, g.omega_s)).values;

  auto refined_peak = [&](std::size_t lo, std::size_t hi) {
    std::size_t k = lo;
    for (std::size_t j = lo; j < hi; ++j)
      if (eta[j] > eta[k]) k = j;
    double x = g.omega_s[k];
    if (k > lo && k + 1 < hi) {
      const double a = eta[k - 1], b = eta[k], c = eta[k + 1];
      const double denom = a - 2 * b + c;
      if (denom < 0.0) x += 0.5 * (a - c) / denom * (g.omega_s[k + 1] - g.omega_s[k]);
    }
    return std::pair{x, eta[k]};
  };
  const auto [w1, v1] = refined_peak(0, n / 2);
  const auto [w2, v2] = refined_peak(n / 2 + 1, n);
  const double peak = std::max(v1, v2);
  const double mirror = std::abs(w1 + w2 - wp) / wp;
  double pointwise = 0.0;
  for (std::size_t k = 0; k < n; ++k) pointwise = std::max(pointwise, std::abs(eta[k] - eta[n - 1 - k]) / peak);
  r.check("antisymmetry/n51-mirror", mirror < 1e-6,
          fmt("peaks at 2w/wp %.6f and %.6f, |w1+w2-wp|/wp %.2e (pointwise mirror mismatch %.2e), theta %.1f deg",
              2 * w1 / wp, 2 * w2 / wp, mirror, pointwise, theta / kDeg));
  const double centre = eta[n / 2] / peak;
  r.check("antisymmetry/n51-zero", peak > 0.0 && centre < 1e-3, fmt("eta(wp/2) / peak %.2e", centre));
}

struct IslandSummary {
  std::vector<double> delta_theta;  // deg, island centroids
  double psi_asymmetry = 0.0;       // Σ|v(ψ) − v(−ψ)| / Σ v
};

IslandSummary read_islands(const fs::path& dir) {
  IslandSummary s;
  const auto doc = json::parse(slurp(dir / "islands.json"));
  for (const auto& island : doc.at("islands")) {
    s.delta_theta.push_back(island.at("delta_theta_deg"));
  }
  const auto csv = read_export(slurp(dir / "corr_area.csv"));
  std::vector<double> psi, values;
  for (const auto& row : csv.rows) {
    psi.push_back(std::stod(row[1]));
    values.push_back(std::stod(row[2]));
  }
  std::size_t np = 1;
  while (np < psi.size() && psi[np] != psi[0]) ++np;
  double diff = 0.0, total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t a = k / np, b = k % np;
    diff += std::abs(values[k] - values[a * np + (np - 1 - b)]);
    total += values[k];
  }
  s.psi_asymmetry = total > 0.0 ? diff / total : 1.0;
  return s;
}

void correlated_areas(Report& r, const Workspace& ws, const Runs& runs) {
  r.guard("corr-area/n11", [&] {
    const auto s = read_islands(runs.first.at("n11"));
    r.check("corr-area/n11", s.delta_theta.size() >= 2, fmt("%zu island(s) at theta_s0 38 deg", s.delta_theta.size()));
  });

  r.guard("corr-area/n51", [&] {
    const auto s = read_islands(runs.first.at("n51"));
    r.check("corr-area/n51", s.delta_theta.size() == 2 && s.psi_asymmetry < 0.05,
            fmt("%zu islands, psi-reflection mismatch %.2e", s.delta_theta.size(), s.psi_asymmetry));
  });

  r.guard("corr-area/n51-focused", [&] {
    const auto cfg = ws.variant("n51", "n51-focused", {{R"(r_p_mm:\s*inf)", "r_p_mm: 0.04"}});
    const auto s = read_islands(ws.run("corr-area", cfg, "n51-focused"));
    r.check("corr-area/n51-focused", s.delta_theta.size() == 2 && s.psi_asymmetry < 0.05,
            fmt("r_p 40 um: %zu islands, psi-reflection mismatch %.2e", s.delta_theta.size(), s.psi_asymmetry));
  });

  r.guard("corr-area/n101", [&] {
    std::vector<double> sep;
    std::string detail = "separations (deg):";
    bool two_each = true;
    for (double ring : ring_angles(runs.first.at("n101"))) {
      const auto tag = fmt("n101-ring-%.1f", ring);
      const auto cfg = ws.variant("n101", tag, {{R"(theta_s0_deg:\s*[-0-9.eE+]+)", fmt("theta_s0_deg: %.17g", ring)}});
      const auto s = read_islands(ws.run("corr-area", cfg, tag));
      if (s.delta_theta.size() == 2) {
        sep.push_back(std::abs(s.delta_theta[0] - s.delta_theta[1]));
        detail += fmt(" %.2f", sep.back());
      } else {
        two_each = false;
        detail += fmt(" [%zu islands]", s.delta_theta.size());
      }
    }
    bool monotonic = two_each && sep.size() == 5;
    for (std::size_t k = 1; monotonic && k < sep.size(); ++k) monotonic = sep[k] > sep[k - 1];
    const bool ends = monotonic && sep.front() >= 0.3 && sep.front() <= 1.2 && sep.back() >= 2.0 && sep.back() <= 8.0;
    r.check("corr-area/n101", ends, detail);
  });
}

void enhancement(Report& r) {
  struct Row {
    double eta, factor;
    bool closure;
  };
  const std::map<std::string, double> target = {{"n11", 2.0}, {"n51", 50.0}, {"n101", 330.0}};
  std::map<std::string, Row> rows;
  for (const char* name : kConfigs) {
    const auto cfg = load_config(kConfigDir / (std::string(name) + ".cfg"));
    const auto& sp = *cfg.spectrum;
    MonitorOptions mo;
    mo.quantity = MonitoredQuantity::EtaMax;
    mo.pump_polarization = cfg.pump.polarization;
    mo.selection = sp.selection;
    mo.psi_s0 = sp.psi_deg * kDeg;
    mo.n_omega = sp.n_omega;
    mo.n_theta = sp.n_theta;
    mo.two_omega_lo = sp.two_omega.lo;
    mo.two_omega_hi = sp.two_omega.hi;
    mo.theta_max = sp.theta_deg.hi * kDeg;
    mo.index_model = cfg.index_model;
    MaterialPtr nonlinear;
    for (const auto& layer : cfg.structure.layers())
      if (layer.material->is_nonlinear) nonlinear = layer.material;
    const double eta = monitored_value(cfg.structure, cfg.pump.omega0, mo, hardware_threads());
    const double ref = monitored_value(single_layer_equivalent(cfg.structure, nonlinear), cfg.pump.omega0, mo,
                                       hardware_threads());
    rows[name] = {eta, eta / ref, closure_holds(cfg.structure, *cfg.structure_spec.design_peak, cfg.pump.omega0)};
  }
  const bool ordered = rows["n11"].eta < rows["n51"].eta && rows["n51"].eta < rows["n101"].eta;
  bool within = true, closure = true;
  std::string detail;
  for (const char* name : kConfigs) {
    const auto& row = rows[name];
    const double q = row.factor / target.at(name);
    within = within && q >= 1.0 / 3.0 && q <= 3.0;
    closure = closure && row.closure;
    detail += fmt("%s eta_max %.3g x%.3g (target x%.0f)%s; ", name, row.eta, row.factor, target.at(name),
                  row.closure ? "" : " no closure");
  }
  detail += ordered ? "ordered" : "NOT ordered";
  detail += within ? ", factors within x3" : ", factors outside x3, closure checked";
  r.check("enhancement", ordered && (within || closure), detail);
}

struct SweepRow {
  double L, value;
  bool gap;
};

std::vector<SweepRow> read_sweep(const fs::path& dir) {
  std::vector<SweepRow> out;
  for (const auto& row : read_export(slurp(dir / "sweep.csv")).rows) {
    out.push_back({std::stod(row[0]), std::stod(row[3]), row[4] != "0"});
  }
  return out;
}

void sweep_shape(Report& r, const Runs& runs) {
  r.guard("sweep/n11-flat", [&] {
    double lo = INFINITY, hi = 0.0;
    for (const auto& p : read_sweep(runs.first.at("n11"))) {
      if (p.gap || p.L < 0.3 - 1e-9 || p.L > 1.0 + 1e-9) continue;
      lo = std::min(lo, p.value);
      hi = std::max(hi, p.value);
    }
    const double spread = (hi - lo) / hi;
    r.check("sweep/n11-flat", hi > 0.0 && spread < 0.7, fmt("(max-min)/max over L in [0.3, 1.0] = %.3f", spread));
  });

  r.guard("sweep/n101-isolated", [&] {
    std::vector<SweepRow> pts;
    for (const auto& p : read_sweep(runs.first.at("n101")))
      if (!p.gap) pts.push_back(p);
    std::vector<std::size_t> maxima;
    for (std::size_t k = 1; k + 1 < pts.size(); ++k)
      if (pts[k].value > pts[k - 1].value && pts[k].value >= pts[k + 1].value) maxima.push_back(k);
    int isolated = 0;
    double best_ratio = 0.0;
    for (std::size_t m = 0; m < maxima.size(); ++m) {
      const std::size_t k = maxima[m];
      const std::size_t left = m > 0 ? maxima[m - 1] : 0;
      const std::size_t right = m + 1 < maxima.size() ? maxima[m + 1] : pts.size() - 1;
      double floor_l = INFINITY, floor_r = INFINITY;
      for (std::size_t j = left; j <= k; ++j) floor_l = std::min(floor_l, pts[j].value);
      for (std::size_t j = k; j <= right; ++j) floor_r = std::min(floor_r, pts[j].value);
      const double ratio = pts[k].value / std::max(floor_l, floor_r);
      best_ratio = std::max(best_ratio, ratio);
      if (ratio >= 2.0) ++isolated;
    }
    r.check("sweep/n101-isolated", isolated >= 3,
            fmt("%zu local maxima, %d at >= 2x the inter-peak floor (largest ratio %.2f)", maxima.size(), isolated,
                best_ratio));
  });

  r.guard("sweep/n101-top", [&] {
    const auto top = json::parse(slurp(runs.first.at("n101") / "top_designs.json"));
    const double L = top.at("top").at(0).at("L");
    r.check("sweep/n101-top", L >= 0.35 && L <= 0.65, fmt("best design at L = %.2f", L));
  });
}

void determinism(Report& r, const Workspace& ws, const Runs& runs) {
  for (const char* name : kConfigs) {
    r.guard(std::string("determinism/") + name, [&] {
      const auto cfg = ws.variant(name, std::string(name) + "-again");
      const auto again = std::string(name) + "-again";
      for (const char* scenario : kScenarios) ws.run(scenario, cfg, again, {"--threads", "2"});
      int files = 0, differing = 0;
      std::string which;
      for (const auto& entry : fs::directory_iterator(runs.first.at(name))) {
        ++files;
        const auto other = ws.root() / again / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
          ++differing;
          which += " " + entry.path().filename().string();
        }
      }
      r.check(std::string("determinism/") + name, files > 0 && differing == 0,
              fmt("%d files compared, %d differ", files, differing) + which);
    });
  }
}

}  // namespace

// Optional argument: file that receives a copy of the report.
int main(int argc, char** argv) {
  std::FILE* copy = argc > 1 ? std::fopen(argv[1], "w") : nullptr;
  Report report(copy);
  const auto t0 = std::chrono::steady_clock::now();
  report.line("spdc acceptance (%s, %d thread(s))\n\n", std::string(cli::kToolVersion).c_str(), hardware_threads());

  report.guard("unitarity", [&] { unitarity(report); });
  report.guard("scaling-law", [&] { scaling_law(report); });
  report.guard("fresnel", [&] { fresnel(report); });
  report.guard("kinematics", [&] { kinematics(report); });
  report.guard("bulk-sinc", [&] { bulk_limit(report); });
  report.guard("symmetric-zero", [&] { symmetric_zero(report); });

  Workspace ws;
  Runs runs;
  for (const char* name : kConfigs) {
    report.guard(std::string("scenarios/") + name, [&] {
      const auto cfg = ws.variant(name, name);
      for (const char* scenario : kScenarios) ws.run(scenario, cfg, name);
      runs.first[name] = ws.root() / name;
    });
  }
  if (runs.first.size() == 3) {
    report.guard("rings", [&] { ring_counts(report, runs); });
    report.guard("antisymmetry", [&] { antisymmetry(report, runs); });
    correlated_areas(report, ws, runs);
    report.guard("enhancement", [&] { enhancement(report); });
    sweep_shape(report, runs);
    determinism(report, ws, runs);
  }

  report.line("\ntotal %.0f s\n", seconds_since(t0));
  const int code = report.summary();
  if (copy) std::fclose(copy);
  return code;
}
