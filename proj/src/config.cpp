#include "spdc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spdc/constants.hpp"
#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

namespace {

// A YAML mapping whose keys must all be consumed before finish().
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) throw ConfigError(path_, "'" + path_ + "' must be a mapping");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return node_ && node_[key];
  }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    return node_ ? node_[key] : YAML::Node();
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  double number(const std::string& key, double fallback, bool required = false) {
    const auto n = raw(key);
    if (!n) {
      if (required) throw ConfigError(key_path(key), "missing required key '" + key_path(key) + "'");
      return fallback;
    }
    return to_number(n, key_path(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 1) {
    const auto n = raw(key);
    if (!n) return fallback;
    const double v = to_number(n, key_path(key));
    if (!(v >= static_cast<double>(min)) || v != std::floor(v) || v > 1e8) {
      throw ConfigError(key_path(key), "'" + key_path(key) + "' must be an integer >= " + std::to_string(min));
    }
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& fallback, bool required = false) {
    const auto n = raw(key);
    if (!n) {
      if (required) throw ConfigError(key_path(key), "missing required key '" + key_path(key) + "'");
      return fallback;
    }
    if (!n.IsScalar()) throw ConfigError(key_path(key), "'" + key_path(key) + "' must be a string");
    return n.as<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    const auto n = raw(key);
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key), "'" + key_path(key) + "' must be true or false");
    }
  }

  Range range(const std::string& key, Range fallback) {
    const auto n = raw(key);
    if (!n) return fallback;
    if (!n.IsSequence() || n.size() != 2) {
      throw ConfigError(key_path(key), "'" + key_path(key) + "' must be [lo, hi]");
    }
    Range r{to_number(n[0], key_path(key)), to_number(n[1], key_path(key))};
    if (!(r.hi >= r.lo)) throw ConfigError(key_path(key), "'" + key_path(key) + "' needs lo <= hi");
    return r;
  }

  void finish() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigError(key_path(key), "unknown key '" + key_path(key) + "'");
    }
  }

  static double to_number(const YAML::Node& n, const std::string& where) {
    if (!n.IsScalar()) throw ConfigError(where, "'" + where + "' must be a number");
    const auto s = n.Scalar();
    if (s == "inf" || s == ".inf") return std::numeric_limits<double>::infinity();
    try {
      const double v = n.as<double>();
      if (std::isnan(v)) throw ConfigError(where, "'" + where + "' is NaN");
      return v;
    } catch (const YAML::Exception&) {
      throw ConfigError(where, "'" + where + "' must be a number");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

ChannelSelection selection_of(Section& s) {
  const auto text = s.text("selection", "FF");
  try {
    return parse_selection(text);
  } catch (const Error& e) {
    throw ConfigError(s.key_path("selection"), e.what());
  }
}

void check_two_omega(const Range& r, const std::string& key) {
  require(r.lo > 0.0 && r.hi < 2.0 && r.lo < r.hi, key, "'" + key + "' must satisfy 0 < lo < hi < 2");
}

void check_theta(const Range& r, const std::string& key) {
  require(r.lo >= 0.0 && r.hi < 90.0, key, "'" + key + "' must lie in [0, 90) degrees");
}

StructureSpec structure_from(Section& s) {
  StructureSpec spec;
  const bool ab = s.has("ab");
  const bool list = s.has("layers");
  require(ab != list, s.key_path("ab"), "structure needs exactly one of 'ab' or 'layers'");
  if (ab) {
    auto a = s.child("ab");
    spec.shorthand = true;
    spec.material_a = a.text("a", "", true);
    spec.material_b = a.text("b", "", true);
    const double n = a.number("n_layers", 0, true);
    require(n >= 1 && n == std::floor(n) && static_cast<long>(n) % 2 == 1, a.key_path("n_layers"),
            "'structure.ab.n_layers' must be a positive odd integer");
    spec.n_layers = static_cast<int>(n);
    spec.l_a_nm = a.number("l_a_nm", 0, true);
    spec.l_b_nm = a.number("l_b_nm", 0, true);
    require(spec.l_a_nm > 0 && std::isfinite(spec.l_a_nm), a.key_path("l_a_nm"), "layer length must be positive");
    require(spec.l_b_nm > 0 && std::isfinite(spec.l_b_nm), a.key_path("l_b_nm"), "layer length must be positive");
    a.finish();
  } else {
    const auto node = s.raw("layers");
    require(node.IsSequence() && node.size() > 0, s.key_path("layers"), "'structure.layers' must be a non-empty list");
    for (std::size_t i = 0; i < node.size(); ++i) {
      Section l(node[i], s.key_path("layers") + "[" + std::to_string(i) + "]");
      const auto name = l.text("material", "", true);
      const double len = l.number("length_nm", 0, true);
      require(len > 0 && std::isfinite(len), l.key_path("length_nm"), "layer length must be positive");
      l.finish();
      spec.layers_nm.emplace_back(name, len);
    }
  }
  if (s.has("design_peak")) {
    try {
      spec.design_peak = peak_side_from_string(s.text("design_peak", ""));
    } catch (const Error& e) {
      throw ConfigError(s.key_path("design_peak"), e.what());
    }
  }
  return spec;
}

}  // namespace

Stack build_structure(const StructureSpec& spec, const MaterialDb& db) {
  auto get = [&](const std::string& name, const std::string& key) {
    if (!db.contains(name)) throw ConfigError(key, "unknown material '" + name + "'");
    return db.get(name);
  };
  if (spec.shorthand) {
    return build_ab_stack(get(spec.material_a, "structure.ab.a"), get(spec.material_b, "structure.ab.b"),
                          spec.n_layers, spec.l_a_nm * 1e-9, spec.l_b_nm * 1e-9);
  }
  std::vector<Layer> layers;
  for (std::size_t i = 0; i < spec.layers_nm.size(); ++i) {
    layers.push_back({get(spec.layers_nm[i].first, "structure.layers[" + std::to_string(i) + "].material"),
                      spec.layers_nm[i].second * 1e-9});
  }
  return Stack(std::move(layers));
}

std::string emit_structure(const StructureSpec& spec) {
  std::ostringstream os;
  if (spec.shorthand) {
    os << "ab:\n  a: " << spec.material_a << "\n  b: " << spec.material_b
       << "\n  n_layers: " << spec.n_layers << "\n  l_a_nm: " << format_shortest(spec.l_a_nm)
       << "\n  l_b_nm: " << format_shortest(spec.l_b_nm) << "\n";
  } else {
    os << "layers:\n";
    for (const auto& [m, l] : spec.layers_nm) {
      os << "  - {material: " << m << ", length_nm: " << format_shortest(l) << "}\n";
    }
  }
  if (spec.design_peak) os << "design_peak: " << to_string(*spec.design_peak) << "\n";
  return os.str();
}

StructureSpec parse_structure(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("structure", std::string("YAML error: ") + e.what());
  }
  Section s(root, "structure");
  auto spec = structure_from(s);
  s.finish();
  return spec;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("YAML error: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("", "config must be a YAML mapping");
  Section top(root, "");
  RunConfig cfg;
  Fnv1a h;
  h.update(text);
  cfg.hash = h.value();

  const auto mat = top.text("materials", "", true);
  cfg.materials_path = std::filesystem::path(mat).is_absolute() ? std::filesystem::path(mat) : base_dir / mat;
  try {
    cfg.materials = MaterialDb::load(cfg.materials_path);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw ConfigError("materials", e.what());
  }

  const auto model = top.text("index_model", "isotropic");
  if (model == "isotropic") {
    cfg.index_model = IndexModel::Isotropic;
  } else if (model == "uniaxial") {
    cfg.index_model = IndexModel::Uniaxial;
  } else {
    throw ConfigError("index_model", "'index_model' must be 'isotropic' or 'uniaxial'");
  }
  const double threads = top.number("threads", 0);
  require(threads >= 0 && threads == std::floor(threads), "threads", "'threads' must be a non-negative integer");
  cfg.threads = static_cast<int>(threads);

  {
    auto s = top.child("structure");
    require(top.has("structure"), "structure", "missing required key 'structure'");
    cfg.structure_spec = structure_from(s);
    s.finish();
    cfg.structure = build_structure(cfg.structure_spec, cfg.materials);
  }

  {
    require(top.has("pump"), "pump", "missing required key 'pump'");
    auto s = top.child("pump");
    const double wl = s.number("wavelength_nm", 0, true);
    require(wl > 0 && std::isfinite(wl), "pump.wavelength_nm", "'pump.wavelength_nm' must be positive");
    cfg.pump.omega0 = omega_from_wavelength(wl * 1e-9);
    const auto pol = s.text("polarization", "TE");
    require(pol == "TE" || pol == "TM", "pump.polarization", "'pump.polarization' must be TE or TM");
    cfg.pump.polarization = pol == "TE" ? Polarization::TE : Polarization::TM;
    const double rp = s.number("r_p_mm", kCollimated);
    require(rp > 0, "pump.r_p_mm", "'pump.r_p_mm' must be positive or inf");
    cfg.pump.r_p = std::isinf(rp) ? kCollimated : rp * 1e-3;
    cfg.pump.detection_half_interval = s.number("detection_half_interval_s", kPi);
    require(cfg.pump.detection_half_interval > 0, "pump.detection_half_interval_s",
            "'pump.detection_half_interval_s' must be positive");
    cfg.pump.theta_p = s.number("theta_deg", 0.0) * kDeg;
    cfg.pump.psi_p = s.number("psi_deg", 0.0) * kDeg;
    require(std::abs(cfg.pump.theta_p) < kPi / 2, "pump.theta_deg", "'pump.theta_deg' must lie in (-90, 90)");
    require(std::abs(cfg.pump.psi_p) <= kPi / 2, "pump.psi_deg", "'pump.psi_deg' must lie in [-90, 90]");
    cfg.pump.xi = s.number("xi", 1.0);
    require(cfg.pump.xi > 0, "pump.xi", "'pump.xi' must be positive");
    s.finish();
  }

  if (top.has("transmission")) {
    auto s = top.child("transmission");
    TransmissionSettings t;
    const auto var = s.text("variable", "theta");
    require(var == "theta" || var == "omega", "transmission.variable", "'transmission.variable' must be theta or omega");
    t.variable = var == "theta" ? SpectrumVariable::Theta : SpectrumVariable::Omega;
    t.theta_deg = s.range("theta_deg", t.theta_deg);
    check_theta(t.theta_deg, "transmission.theta_deg");
    t.wavelength_nm = s.number("wavelength_nm", t.wavelength_nm);
    require(t.wavelength_nm > 0, "transmission.wavelength_nm", "'transmission.wavelength_nm' must be positive");
    t.wavelength_nm_range = s.range("wavelength_nm_range", t.wavelength_nm_range);
    require(t.wavelength_nm_range.lo > 0, "transmission.wavelength_nm_range", "wavelengths must be positive");
    t.points = s.count("points", t.points, 2);
    s.finish();
    cfg.transmission = t;
  }

  if (top.has("spectrum")) {
    auto s = top.child("spectrum");
    SpectrumSettings t;
    t.two_omega = s.range("two_omega", t.two_omega);
    check_two_omega(t.two_omega, "spectrum.two_omega");
    t.theta_deg = s.range("theta_deg", t.theta_deg);
    check_theta(t.theta_deg, "spectrum.theta_deg");
    t.psi_deg = s.number("psi_deg", t.psi_deg);
    require(std::abs(t.psi_deg) <= 90, "spectrum.psi_deg", "'spectrum.psi_deg' must lie in [-90, 90]");
    t.n_omega = s.count("n_omega", t.n_omega, 2);
    t.n_theta = s.count("n_theta", t.n_theta, 2);
    t.selection = selection_of(s);
    s.finish();
    cfg.spectrum = t;
  }

  if (top.has("profile")) {
    auto s = top.child("profile");
    ProfileSettings t;
    t.two_omega = s.range("two_omega", t.two_omega);
    check_two_omega(t.two_omega, "profile.two_omega");
    t.n_omega = s.count("n_omega", t.n_omega, 2);
    t.theta_deg = s.range("theta_deg", t.theta_deg);
    check_theta(t.theta_deg, "profile.theta_deg");
    t.n_theta = s.count("n_theta", t.n_theta, 3);
    t.n_psi = s.count("n_psi", t.n_psi, 2);
    t.selection = selection_of(s);
    t.normalize = s.flag("normalize", t.normalize);
    t.rings.min_height = s.number("ring_min_height", t.rings.min_height);
    t.rings.min_prominence = s.number("ring_min_prominence", t.rings.min_prominence);
    s.finish();
    cfg.profile = t;
  }

  if (top.has("corr_area")) {
    auto s = top.child("corr_area");
    CorrAreaSettings t;
    t.theta_s0_deg = s.number("theta_s0_deg", 0, true);
    require(std::abs(t.theta_s0_deg) < 90, "corr_area.theta_s0_deg", "'corr_area.theta_s0_deg' must lie in (-90, 90)");
    t.psi_s0_deg = s.number("psi_s0_deg", 0);
    require(std::abs(t.psi_s0_deg) <= 90, "corr_area.psi_s0_deg", "'corr_area.psi_s0_deg' must lie in [-90, 90]");
    t.two_omega = s.range("two_omega", t.two_omega);
    check_two_omega(t.two_omega, "corr_area.two_omega");
    t.n_omega = s.count("n_omega", t.n_omega, 2);
    t.half_theta_deg = s.number("half_theta_deg", t.half_theta_deg);
    t.half_psi_deg = s.number("half_psi_deg", t.half_psi_deg);
    require(t.half_theta_deg > 0, "corr_area.half_theta_deg", "window half widths must be positive");
    require(t.half_psi_deg > 0, "corr_area.half_psi_deg", "window half widths must be positive");
    t.n_theta = s.count("n_theta", t.n_theta, 2);
    t.n_psi = s.count("n_psi", t.n_psi, 1);
    t.selection = selection_of(s);
    t.island_threshold = s.number("island_threshold", t.island_threshold);
    require(t.island_threshold > 0 && t.island_threshold < 1, "corr_area.island_threshold",
            "'corr_area.island_threshold' must lie in (0, 1)");
    s.finish();
    cfg.corr_area = t;
  }

  if (top.has("design_sweep")) {
    auto s = top.child("design_sweep");
    SweepSettings t;
    t.material_a = s.text("a", cfg.structure_spec.shorthand ? cfg.structure_spec.material_a : t.material_a);
    t.material_b = s.text("b", cfg.structure_spec.shorthand ? cfg.structure_spec.material_b : t.material_b);
    for (const auto* m : {&t.material_a, &t.material_b}) {
      if (!cfg.materials.contains(*m)) throw ConfigError("design_sweep", "unknown material '" + *m + "'");
    }
    const double n = s.number("n_layers", cfg.structure_spec.shorthand ? cfg.structure_spec.n_layers : 11);
    require(n >= 3 && n == std::floor(n) && static_cast<long>(n) % 2 == 1, "design_sweep.n_layers",
            "'design_sweep.n_layers' must be an odd integer >= 3");
    t.n_layers = static_cast<int>(n);
    try {
      t.side = peak_side_from_string(s.text("peak_side", "lower"));
    } catch (const Error& e) {
      throw ConfigError("design_sweep.peak_side", e.what());
    }
    if (s.has("L")) {
      auto l = s.child("L");
      const double from = l.number("from", 0.1), to = l.number("to", 2.0), step = l.number("step", 0.01);
      require(from > 0 && to >= from && step > 0, "design_sweep.L", "'design_sweep.L' needs 0 < from <= to, step > 0");
      l.finish();
      t.L_grid.clear();
      const auto steps = static_cast<long>(std::floor((to - from) / step + 1e-9));
      for (long i = 0; i <= steps; ++i) t.L_grid.push_back(from + step * static_cast<double>(i));
    }
    auto& m = t.monitor;
    try {
      m.quantity = monitored_quantity_from_string(s.text("monitor", "eta_max"));
    } catch (const Error& e) {
      throw ConfigError("design_sweep.monitor", e.what());
    }
    m.pump_polarization = cfg.pump.polarization;
    m.index_model = cfg.index_model;
    const auto sel_text = s.text("selection", "FF:perp,par");
    try {
      m.selection = parse_selection(sel_text);
    } catch (const Error& e) {
      throw ConfigError("design_sweep.selection", e.what());
    }
    m.psi_s0 = s.number("psi_s0_deg", 0.0) * kDeg;
    const auto tw = s.range("two_omega", {m.two_omega_lo, m.two_omega_hi});
    check_two_omega(tw, "design_sweep.two_omega");
    m.two_omega_lo = tw.lo;
    m.two_omega_hi = tw.hi;
    m.n_omega = s.count("n_omega", m.n_omega, 2);
    m.n_theta = s.count("n_theta", m.n_theta, 2);
    const double tmax = s.number("theta_max_deg", m.theta_max / kDeg);
    require(tmax > 0 && tmax < 90, "design_sweep.theta_max_deg", "'design_sweep.theta_max_deg' must lie in (0, 90)");
    m.theta_max = tmax * kDeg;
    t.top_k = s.count("top_k", t.top_k, 1);
    s.finish();
    cfg.design_sweep = t;
  }

  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  auto cfg = parse_config(os.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace spdc
