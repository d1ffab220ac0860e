#include "spdc/materials.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spdc/constants.hpp"
#include "spdc/error.hpp"

namespace spdc {

DispersionModel::DispersionModel(double a0, std::vector<SellmeierTerm> terms,
                                 double min_um, double max_um)
    : a0_(a0), terms_(std::move(terms)), min_um_(min_um), max_um_(max_um) {
  if (!(min_um_ > 0.0) || !(max_um_ > min_um_)) {
    fail(ErrorCode::InvalidArgument, "dispersion model: invalid wavelength range");
  }
  for (const auto& t : terms_) {
    if (t.resonance_um >= min_um_ && t.resonance_um <= max_um_) {
      fail(ErrorCode::InvalidArgument,
           "dispersion model: resonance inside the validity range");
    }
  }
}

DispersionModel DispersionModel::constant(double n) {
  if (!(n >= 1.0)) fail(ErrorCode::InvalidArgument, "constant index must be >= 1");
  DispersionModel m;
  m.a0_ = n * n;
  return m;
}

double DispersionModel::index_at_wavelength_um(double lambda_um) const {
  if (!in_range_um(lambda_um)) {
    std::ostringstream os;
    os << "wavelength " << lambda_um << " um outside validity range [" << min_um_
       << ", " << max_um_ << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }
  if (terms_.empty()) return std::sqrt(a0_);
  const double l2 = lambda_um * lambda_um;
  double n2 = a0_;
  for (const auto& t : terms_) {
    n2 += t.strength * l2 / (l2 - t.resonance_um * t.resonance_um);
  }
  if (!(n2 >= 1.0)) {
    fail(ErrorCode::OutOfRange, "dispersion model evaluates below unity");
  }
  return std::sqrt(n2);
}

double DispersionModel::index_at_omega(double omega) const {
  if (!(omega > 0.0)) fail(ErrorCode::OutOfRange, "non-positive frequency");
  // Dispersion-free models are valid at every frequency.
  if (terms_.empty()) return std::sqrt(a0_);
  return index_at_wavelength_um(wavelength_from_omega(omega) * 1e6);
}

DTensor expand_contracted(const DContracted& d) {
  // Voigt pairs: 1=xx 2=yy 3=zz 4=yz 5=xz 6=xy
  static constexpr int voigt[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  DTensor t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) t[i][j][k] = d[i][voigt[j][k]];
  return t;
}

double Material::max_abs_d() const {
  double m = 0.0;
  for (const auto& row : d_contracted)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

MaterialPtr make_material(std::string name, DispersionModel n_o,
                          DispersionModel n_e, const DContracted& d) {
  auto m = std::make_shared<Material>();
  m->name = std::move(name);
  m->n_ordinary = std::move(n_o);
  m->n_extraordinary = std::move(n_e);
  m->d_contracted = d;
  m->d = expand_contracted(d);
  m->is_nonlinear = m->max_abs_d() > 0.0;
  return m;
}

MaterialPtr make_isotropic(std::string name, double n, const DContracted& d) {
  return make_material(std::move(name), DispersionModel::constant(n),
                       DispersionModel::constant(n), d);
}

MaterialPtr air() {
  static const MaterialPtr a = make_isotropic("air", 1.0);
  return a;
}

double refractive_index(const Material& m, Axis axis, double omega) {
  return axis == Axis::Ordinary ? m.n_ordinary.index_at_omega(omega)
                                : m.n_extraordinary.index_at_omega(omega);
}

double effective_tm_index(double n_o, double n_e, double theta) {
  if (!(std::abs(theta) < kPi / 2 + 1e-15)) {
    fail(ErrorCode::OutOfRange, "internal angle must satisfy |theta| <= pi/2");
  }
  if (n_o == n_e) return n_o;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return 1.0 / std::sqrt(c * c / (n_o * n_o) + s * s / (n_e * n_e));
}

double effective_tm_index(const Material& m, double omega, double theta) {
  return effective_tm_index(m.n_ordinary.index_at_omega(omega),
                            m.n_extraordinary.index_at_omega(omega), theta);
}

// ---------------------------------------------------------------------------
// YAML loading

namespace {

void reject_unknown(const YAML::Node& node, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.contains(key)) {
      throw ConfigError(where + "." + key, "unknown key '" + key + "' in " + where);
    }
  }
}

DispersionModel parse_dispersion(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsMap()) {
    throw ConfigError(where, "missing dispersion model '" + where + "'");
  }
  reject_unknown(node, {"constant", "sellmeier", "range_um"}, where);
  double lo = 0.1, hi = 100.0;
  if (node["range_um"]) {
    const auto r = node["range_um"].as<std::vector<double>>();
    if (r.size() != 2) throw ConfigError(where + ".range_um", "range_um needs 2 values");
    lo = r[0];
    hi = r[1];
  }
  if (node["constant"]) {
    const double n = node["constant"].as<double>();
    if (!(n >= 1.0)) throw ConfigError(where + ".constant", "index must be >= 1");
    return DispersionModel(n * n, {}, lo, hi);
  }
  const auto s = node["sellmeier"];
  if (!s) throw ConfigError(where, "dispersion needs 'constant' or 'sellmeier'");
  reject_unknown(s, {"A", "terms"}, where + ".sellmeier");
  std::vector<SellmeierTerm> terms;
  for (const auto& t : s["terms"]) {
    const auto v = t.as<std::vector<double>>();
    if (v.size() != 2) throw ConfigError(where + ".sellmeier.terms", "term needs [B, C_um]");
    terms.push_back({v[0], v[1]});
  }
  try {
    return DispersionModel(s["A"].as<double>(), std::move(terms), lo, hi);
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

MaterialPtr parse_material(const YAML::Node& doc) {
  reject_unknown(doc, {"name", "source", "ordinary", "extraordinary",
                       "d_contracted_pm_per_V", "nonlinear"},
                 "material");
  if (!doc["name"]) throw ConfigError("material.name", "material without name");
  const auto name = doc["name"].as<std::string>();
  const auto n_o = parse_dispersion(doc["ordinary"], name + ".ordinary");
  const auto n_e = doc["extraordinary"]
                       ? parse_dispersion(doc["extraordinary"], name + ".extraordinary")
                       : n_o;
  DContracted d{};
  if (const auto dn = doc["d_contracted_pm_per_V"]) {
    if (!dn.IsSequence() || dn.size() != 3) {
      throw ConfigError(name + ".d_contracted_pm_per_V", "expected 3 rows of 6");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const auto row = dn[i].as<std::vector<double>>();
      if (row.size() != 6) {
        throw ConfigError(name + ".d_contracted_pm_per_V", "expected 3 rows of 6");
      }
      std::copy(row.begin(), row.end(), d[i].begin());
    }
  }
  auto m = make_material(name, n_o, n_e, d);
  if (doc["nonlinear"] && doc["nonlinear"].as<bool>() != m->is_nonlinear) {
    throw ConfigError(name + ".nonlinear", "nonlinear flag disagrees with d tensor");
  }
  return m;
}

}  // namespace

MaterialDb::MaterialDb() { add(air()); }

MaterialDb MaterialDb::from_yaml_string(const std::string& text) {
  MaterialDb db;
  std::vector<YAML::Node> docs;
  try {
    docs = YAML::LoadAll(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("materials", std::string("material file parse error: ") + e.what());
  }
  for (const auto& doc : docs) {
    if (doc.IsNull()) continue;
    try {
      db.add(parse_material(doc));
    } catch (const YAML::Exception& e) {
      throw ConfigError("materials", std::string("material file: ") + e.what());
    }
  }
  return db;
}

MaterialDb MaterialDb::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open material file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_yaml_string(ss.str());
}

void MaterialDb::add(MaterialPtr m) { by_name_[m->name] = std::move(m); }

MaterialPtr MaterialDb::get(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw ConfigError("material", "unknown material '" + name + "'");
  }
  return it->second;
}

bool MaterialDb::contains(const std::string& name) const {
  return by_name_.contains(name);
}

std::vector<std::string> MaterialDb::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : by_name_) out.push_back(k);
  return out;
}

}  // namespace spdc
