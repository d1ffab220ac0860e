#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>

#include "CLI11.hpp"
#include "json.hpp"
#include "spdc/config.hpp"
#include "spdc/designer.hpp"
#include "spdc/error.hpp"
#include "spdc/export_schema.hpp"
#include "spdc/io.hpp"
#include "spdc/linear_optics.hpp"
#include "spdc/observables.hpp"
#include "spdc/parallel.hpp"
#include "spdc/simd/kernels.hpp"
#include "spdc/two_photon.hpp"

namespace spdc::cli {

namespace {

using json = nlohmann::ordered_json;
using Meta = std::vector<std::pair<std::string, std::string>>;
namespace fs = std::filesystem;

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> threads;
  std::optional<std::pair<std::size_t, std::size_t>> grid;
  std::string simd;
};

struct Context {
  Options opt;
  RunConfig cfg;
  int threads = 1;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> degrees_to_rad(const std::vector<double>& deg) {
  std::vector<double> r(deg.size());
  std::transform(deg.begin(), deg.end(), r.begin(), [](double d) { return d * kDeg; });
  return r;
}

Meta header(const Context& ctx, const std::string& schema) {
  return {{"tool", "spdc"},
          {"version", kToolVersion},
          {"schema", schema},
          {"schema_version", std::string(kSchemaVersion)},
          {"scenario", ctx.opt.command},
          {"config_hash", hash_hex(ctx.cfg.hash)},
          {"stack_hash", hash_hex(ctx.cfg.structure.hash())}};
}

json header_json(const Context& ctx) {
  json j;
  j["tool"] = "spdc";
  j["version"] = kToolVersion;
  j["scenario"] = ctx.opt.command;
  j["config_hash"] = hash_hex(ctx.cfg.hash);
  j["stack_hash"] = hash_hex(ctx.cfg.structure.hash());
  return j;
}

void write_output(const Context& ctx, const std::string& name, const std::string& content) {
  write_file_atomic(fs::path(ctx.opt.out_dir) / name, content);
}

void report_warnings(const Context& ctx, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) *ctx.err << json{{"warning", w}}.dump() << "\n";
}

[[noreturn]] void needs_collimated(const std::string& scenario) {
  throw ConfigError("pump.r_p_mm", "'" + scenario + "' samples the signal hemisphere with a collimated pump; set pump.r_p_mm: inf");
}

TwoPhotonEngine make_engine(const Context& ctx, unsigned mask) {
  EngineOptions eo;
  eo.index_model = ctx.cfg.index_model;
  eo.channel_mask = mask;
  return TwoPhotonEngine(ctx.cfg.structure, ctx.cfg.pump, eo);
}

json band_json(const BandAnalysis& a, double scale) {
  json bands = json::array();
  auto peaks = [&](const std::vector<TransmissionPeak>& ps) {
    json arr = json::array();
    for (const auto& p : ps) arr.push_back({{"x", p.x * scale}, {"T", p.value}});
    return arr;
  };
  for (const auto& b : a.bands) {
    bands.push_back({{"index", b.index},
                     {"x_lo", b.x_lo * scale},
                     {"x_hi", b.x_hi * scale},
                     {"min_T", b.min_value},
                     {"lower_peaks", peaks(b.lower_peaks)},
                     {"upper_peaks", peaks(b.upper_peaks)}});
  }
  return {{"threshold", a.threshold}, {"bands", bands}};
}

int cmd_transmission(Context& ctx) {
  const auto t = ctx.cfg.transmission.value_or(TransmissionSettings{});
  std::size_t points = t.points;
  if (ctx.opt.grid) points = ctx.opt.grid->first;
  TransmissionSpectrum spec;
  double scale = 1.0;
  std::string schema;
  if (t.variable == SpectrumVariable::Theta) {
    const auto thetas = degrees_to_rad(linspace(t.theta_deg.lo, t.theta_deg.hi, points));
    spec = transmission_vs_angle(ctx.cfg.structure, omega_from_wavelength(t.wavelength_nm * 1e-9), thetas,
                                 ctx.cfg.index_model, ctx.threads);
    scale = 1.0 / kDeg;
    schema = "transmission";
  } else {
    auto wl = linspace(t.wavelength_nm_range.lo, t.wavelength_nm_range.hi, points);
    std::vector<double> omegas(wl.size());
    // ascending ω
    for (std::size_t i = 0; i < wl.size(); ++i) omegas[i] = omega_from_wavelength(wl[wl.size() - 1 - i] * 1e-9);
    spec = transmission_spectrum(ctx.cfg.structure, t.theta_deg.lo * kDeg, omegas, ctx.cfg.index_model,
                                 ctx.threads);
    schema = "transmission-omega";
  }
  auto meta = header(ctx, schema);
  write_output(ctx, "transmission.csv", spectrum_csv(spec, meta));

  json j;
  j["meta"] = header_json(ctx);
  j["x_unit"] = t.variable == SpectrumVariable::Theta ? "deg" : "rad/s";
  for (auto pol : kPolarizations) {
    try {
      j[to_string(pol)] = band_json(find_bands_and_peaks(spec.x, spec.values(pol)), scale);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotFound) throw;
      j[to_string(pol)] = {{"bands", json::array()}};
    }
  }
  write_output(ctx, "bands.json", j.dump(2) + "\n");
  return kOk;
}

struct SignalRun {
  SignalDensity ns;
  double omega_p0;
  std::vector<std::string> warnings;
};

SignalRun signal_run(const Context& ctx, const AmplitudeGrid& grid, const ChannelSelection& sel) {
  const auto engine = make_engine(ctx, sel.channel_mask);
  auto phi = assemble_phi(engine, grid, ctx.threads);
  const auto pd = pair_density(phi);
  return {signal_density(pd, sel), ctx.cfg.pump.omega0, phi.warnings};
}

int cmd_spectrum(Context& ctx) {
  if (!ctx.cfg.pump.collimated()) needs_collimated("spectrum");
  auto s = ctx.cfg.spectrum.value_or(SpectrumSettings{});
  if (ctx.opt.grid) std::tie(s.n_omega, s.n_theta) = *ctx.opt.grid;
  const double wp = ctx.cfg.pump.omega0;
  AmplitudeGrid g;
  for (double x : linspace(s.two_omega.lo, s.two_omega.hi, s.n_omega)) g.omega_s.push_back(x * wp / 2.0);
  g.theta_s = degrees_to_rad(linspace(s.theta_deg.lo, s.theta_deg.hi, s.n_theta));
  g.psi_s = {s.psi_deg * kDeg};
  const auto engine = make_engine(ctx, s.selection.channel_mask);
  auto run = signal_run(ctx, g, s.selection);
  const auto eta = relative_density(run.ns, reference_density(engine, g.omega_s));
  report_warnings(ctx, run.warnings);
  auto meta = header(ctx, "spectrum");
  meta.emplace_back("selection", to_string(s.selection));
  write_output(ctx, "spectrum.csv", spectrum_map_csv(eta, 0, wp, meta));
  return kOk;
}

int cmd_profile(Context& ctx) {
  if (!ctx.cfg.pump.collimated()) needs_collimated("profile");
  auto s = ctx.cfg.profile.value_or(ProfileSettings{});
  if (ctx.opt.grid) std::tie(s.n_omega, s.n_theta) = *ctx.opt.grid;
  const double wp = ctx.cfg.pump.omega0;
  AmplitudeGrid g;
  for (double x : linspace(s.two_omega.lo, s.two_omega.hi, s.n_omega)) g.omega_s.push_back(x * wp / 2.0);
  g.theta_s = degrees_to_rad(linspace(s.theta_deg.lo, s.theta_deg.hi, s.n_theta));
  g.psi_s = degrees_to_rad(linspace(-90.0, 90.0, s.n_psi));
  auto run = signal_run(ctx, g, s.selection);
  report_warnings(ctx, run.warnings);
  auto tp = transverse_profile(run.ns);
  if (s.normalize) normalize_quadrant(tp);
  const auto radial = radial_profile(tp);
  const auto rings = find_rings(tp.theta_s, radial, s.rings);

  auto meta = header(ctx, "profile");
  meta.emplace_back("selection", to_string(s.selection));
  meta.emplace_back("normalized", s.normalize ? "quadrant" : "none");
  write_output(ctx, "profile.csv", profile_csv(tp, meta));

  json j;
  j["meta"] = header_json(ctx);
  j["rule"] = {{"min_height", s.rings.min_height}, {"min_prominence", s.rings.min_prominence}};
  j["count"] = rings.size();
  j["rings"] = json::array();
  for (const auto& r : rings) {
    j["rings"].push_back({{"theta_deg", r.theta / kDeg}, {"value", r.value}, {"prominence", r.prominence}});
  }
  write_output(ctx, "rings.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_corr_area(Context& ctx) {
  if (!ctx.cfg.corr_area) throw ConfigError("corr_area", "'corr-area' needs a corr_area section");
  auto s = *ctx.cfg.corr_area;
  if (ctx.opt.grid) std::tie(s.n_theta, s.n_psi) = *ctx.opt.grid;
  const double wp = ctx.cfg.pump.omega0;
  std::vector<double> omegas;
  for (double x : linspace(s.two_omega.lo, s.two_omega.hi, s.n_omega)) omegas.push_back(x * wp / 2.0);
  IdlerWindow win;
  win.half_theta = s.half_theta_deg * kDeg;
  win.half_psi = s.half_psi_deg * kDeg;
  win.n_theta = s.n_theta;
  win.n_psi = s.n_psi;
  const double ts = s.theta_s0_deg * kDeg, ps = s.psi_s0_deg * kDeg;

  const auto engine = make_engine(ctx, s.selection.channel_mask);
  CorrelatedArea ca;
  if (ctx.cfg.pump.collimated()) {
    AmplitudeGrid g;
    g.omega_s = omegas;
    g.theta_s = {ts};
    g.psi_s = {ps};
    auto phi = assemble_phi(engine, g, ctx.threads);
    report_warnings(ctx, phi.warnings);
    ca = correlated_area(pair_density(phi), ts, ps, win, s.selection);
  } else {
    std::vector<std::string> warnings;
    ca = focused_correlated_area(engine, omegas, ts, ps, win, s.selection, ctx.threads, &warnings);
    report_warnings(ctx, warnings);
  }
  ca.islands = find_islands(ca.values, ca.delta_theta.size(), ca.delta_psi.size(), ca.delta_theta,
                            ca.delta_psi, s.island_threshold);

  auto meta = header(ctx, "corr-area");
  meta.emplace_back("selection", to_string(s.selection));
  meta.emplace_back("pump", ctx.cfg.pump.collimated() ? "collimated" : "focused");
  write_output(ctx, "corr_area.csv", corr_area_csv(ca, meta));

  json j;
  j["meta"] = header_json(ctx);
  j["theta_s0_deg"] = s.theta_s0_deg;
  j["psi_s0_deg"] = s.psi_s0_deg;
  j["theta_i0_deg"] = ca.theta_i0 / kDeg;
  j["psi_i0_deg"] = ca.psi_i0 / kDeg;
  j["threshold"] = s.island_threshold;
  j["azimuthal_spread_deg"] = azimuthal_spread(ca) / kDeg;
  j["count"] = ca.islands.size();
  j["islands"] = json::array();
  for (const auto& isl : ca.islands) {
    j["islands"].push_back({{"weight", isl.weight},
                            {"peak", isl.peak},
                            {"delta_theta_deg", isl.theta_centroid / kDeg},
                            {"delta_psi_deg", isl.psi_centroid / kDeg},
                            {"cells", isl.cells}});
  }
  write_output(ctx, "islands.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_design_sweep(Context& ctx) {
  auto s = ctx.cfg.design_sweep.value_or(SweepSettings{});
  if (!ctx.cfg.design_sweep && ctx.cfg.structure_spec.shorthand) {
    s.material_a = ctx.cfg.structure_spec.material_a;
    s.material_b = ctx.cfg.structure_spec.material_b;
    s.n_layers = ctx.cfg.structure_spec.n_layers;
    s.monitor.pump_polarization = ctx.cfg.pump.polarization;
    s.monitor.index_model = ctx.cfg.index_model;
  }
  if (ctx.opt.grid) std::tie(s.monitor.n_omega, s.monitor.n_theta) = *ctx.opt.grid;
  const auto& db = ctx.cfg.materials;
  const auto sweep = efficiency_sweep(db.get(s.material_a), db.get(s.material_b), s.n_layers, s.L_grid,
                                      s.side, ctx.cfg.pump.omega0, s.monitor, s.pin, ctx.threads);
  auto meta = header(ctx, "sweep");
  meta.emplace_back("selection", to_string(s.monitor.selection));
  write_output(ctx, "sweep.csv", sweep_csv(sweep, meta));

  json j;
  j["meta"] = header_json(ctx);
  const auto top = json::parse(top_designs_json(sweep, s.top_k));
  for (const auto& [k, v] : top.items()) j[k] = v;
  write_output(ctx, "top_designs.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_validate(Context& ctx) {
  const auto& st = ctx.cfg.structure;
  json j;
  j["valid"] = true;
  j["config_hash"] = hash_hex(ctx.cfg.hash);
  j["stack_hash"] = hash_hex(st.hash());
  j["n_layers"] = st.size();
  j["total_length_nm"] = st.total_length() * 1e9;
  j["nonlinear_length_nm"] = st.nonlinear_length() * 1e9;
  j["pump_wavelength_nm"] = wavelength_from_omega(ctx.cfg.pump.omega0) * 1e9;
  j["pump"] = ctx.cfg.pump.collimated() ? "collimated" : "focused";
  json scen = json::array();
  if (ctx.cfg.transmission) scen.push_back("transmission");
  if (ctx.cfg.spectrum) scen.push_back("spectrum");
  if (ctx.cfg.profile) scen.push_back("profile");
  if (ctx.cfg.corr_area) scen.push_back("corr-area");
  if (ctx.cfg.design_sweep) scen.push_back("design-sweep");
  j["scenarios"] = scen;
  int code = kOk;
  if (ctx.cfg.structure_spec.design_peak) {
    const bool ok = closure_holds(st, *ctx.cfg.structure_spec.design_peak, ctx.cfg.pump.omega0);
    j["closure"] = ok;
    if (!ok) {
      j["valid"] = false;
      code = kComputation;
    }
  }
  *ctx.out << j.dump(2) << "\n";
  return code;
}

std::optional<std::pair<std::size_t, std::size_t>> parse_grid(const std::string& text) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ConfigError("--grid", "--grid expects WxH, got '" + text + "'");
  const auto w = std::stoul(m[1]), h = std::stoul(m[2]);
  if (w < 2 || h < 1) throw ConfigError("--grid", "--grid needs W >= 2 and H >= 1");
  return std::make_pair(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config:
      return kConfig;
    case ErrorCode::Io:
      return kIo;
    default:
      return kComputation;
  }
}

int report_error(std::ostream& err, int code, std::string_view type, const std::string& key,
                 const std::string& message) {
  json j;
  j["error"] = {{"type", type}, {"key", key}, {"message", message}};
  j["exit_code"] = code;
  err << j.dump() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-pair generation in layered nonlinear structures", "spdc"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  int threads = -1;
  std::string grid;
  app.add_option("--config", opt.config_path, "run configuration (YAML)")->required();
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--threads", threads, "worker cap, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--grid", grid, "grid override WxH");
  app.add_option("--simd", opt.simd, "kernel set")->check(CLI::IsMember({"scalar", "avx2"}));
  for (const char* name : {"transmission", "spectrum", "profile", "corr-area", "design-sweep", "validate"}) {
    app.add_subcommand(name)->callback([&opt, name] { opt.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report_error(err, kConfig, "usage", "", e.what());
  }

  Context ctx;
  ctx.opt = opt;
  ctx.out = &out;
  ctx.err = &err;
  try {
    if (!grid.empty()) ctx.opt.grid = parse_grid(grid);
    if (!opt.simd.empty()) simd::set_isa(simd::isa_from_string(opt.simd));
    ctx.cfg = load_config(opt.config_path);
    ctx.threads = resolve_threads(threads >= 0 ? threads : ctx.cfg.threads);
    if (opt.command != "validate") {
      std::error_code ec;
      fs::create_directories(opt.out_dir, ec);
      if (ec) fail(ErrorCode::Io, "cannot create output directory " + opt.out_dir + ": " + ec.message());
    }
    if (opt.command == "transmission") return cmd_transmission(ctx);
    if (opt.command == "spectrum") return cmd_spectrum(ctx);
    if (opt.command == "profile") return cmd_profile(ctx);
    if (opt.command == "corr-area") return cmd_corr_area(ctx);
    if (opt.command == "design-sweep") return cmd_design_sweep(ctx);
    return cmd_validate(ctx);
  } catch (const ConfigError& e) {
    return report_error(err, kConfig, "config", e.key(), e.what());
  } catch (const Error& e) {
    return report_error(err, exit_code_for(e.code()), to_string(e.code()), "", e.what());
  } catch (const std::exception& e) {
    return report_error(err, kInternal, "internal", "", e.what());
  }
}

}  // namespace spdc::cli
