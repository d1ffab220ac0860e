#include <cmath>

#include "doctest.h"
#include "spdc/constants.hpp"
#include "spdc/error.hpp"
#include "spdc/observables.hpp"
#include "spdc/two_photon.hpp"
#include "support.hpp"

using namespace spdc;

namespace {

const double kWp = omega_from_wavelength(400e-9);

PumpConfig pump(Polarization pol, double r_p = kCollimated) {
  PumpConfig p;
  p.omega0 = kWp;
  p.polarization = pol;
  p.r_p = r_p;
  return p;
}

MaterialPtr chi2(const std::string& name, double n, double scale = 1.0) {
  DContracted d{};
  d[0][0] = 1.0 * scale;  // d_xxx
  d[0][4] = 0.7 * scale;  // d_xxz
  d[2][0] = 0.4 * scale;  // d_zxx
  d[2][2] = -1.3 * scale;
  d[0][1] = 0.3 * scale;  // d_xyy
  d[1][5] = 0.5 * scale;  // d_yxy
  d[1][3] = 0.6 * scale;  // d_yyz
  return make_isotropic(name, n, d);
}

Stack small_stack(double dscale = 1.0) {
  return build_ab_stack(chi2("nl", 2.3, dscale), make_isotropic("lin", 2.05), 7, 95e-9, 70e-9);
}

}  // namespace

TEST_CASE("bulk limit: index-matched layer gives L sinc(ΔK L/2)") {
  const double L = 3e-6;
  const TwoPhotonEngine engine(Stack({{chi2("matched", 1.0), L}}), pump(Polarization::TE));
  const double ws = 0.47 * kWp, wi = kWp - ws;
  const double c = PhysicalConstants::c;
  const auto reference = engine.structure_sum(ws, 0.0, 0.0, 0.0, 0.0).at(Channel::FF, 0, 0);
  REQUIRE(std::abs(reference) > 0.0);
  const double phase0 = (ws + wi) / c * L;
  const cdouble scale = reference / std::polar(L, phase0);
  for (int k = 1; k <= 40; ++k) {
    const double ts = k * 0.02;
    const auto idl = idler_direction(kWp, 0, 0, ws, ts, 0.0);
    const double ks = ws / c * std::cos(ts), ki = wi / c * std::cos(idl.theta);
    const double dk = kWp / c - ks - ki;
    const double h = dk * L / 2;
    const cdouble expected = scale * std::polar(L * std::sin(h) / h, (ks + ki) * L + h);
    const auto got = engine.structure_sum(ws, ts, 0.0, idl.theta, idl.psi).at(Channel::FF, 0, 0);
    CHECK(std::abs(got - expected) < 1e-6 * std::abs(scale) * L);
  }
}

TEST_CASE("amplitude is linear in the nonlinear tensor") {
  const TwoPhotonEngine e1(small_stack(1.0), pump(Polarization::TE));
  const TwoPhotonEngine e3(small_stack(3.0), pump(Polarization::TE));
  const double ws = 0.53 * kWp;
  const auto idl = idler_direction(kWp, 0, 0, ws, 0.4, 0.2);
  const auto a = e1.amplitude(ws, 0.4, 0.2, idl.theta, idl.psi);
  const auto b = e3.amplitude(ws, 0.4, 0.2, idl.theta, idl.psi);
  for (std::size_t k = 0; k < a.v.size(); ++k) CHECK(std::abs(b.v[k] - 3.0 * a.v[k]) <= 1e-12 * std::abs(b.v[k]) + 1e-300);
}

TEST_CASE("exchanging signal and idler swaps polarizations and directions") {
  for (auto pol : kPolarizations) {
    const TwoPhotonEngine engine(small_stack(), pump(pol));
    const double ws = 0.44 * kWp, wi = kWp - ws;
    const double ts = 0.5, ps = 0.3;
    const auto idl = idler_direction(kWp, 0, 0, ws, ts, ps);
    const auto a = engine.amplitude(ws, ts, ps, idl.theta, idl.psi);
    const auto b = engine.amplitude(wi, idl.theta, idl.psi, ts, ps);
    double vmax = 0.0;
    for (auto v : a.v) vmax = std::max(vmax, std::abs(v));
    REQUIRE(vmax > 0.0);
    for (int s = 0; s < 2; ++s) {
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(a.at(Channel::FF, s, i) - b.at(Channel::FF, i, s)) < 1e-12 * vmax);
        CHECK(std::abs(a.at(Channel::BB, s, i) - b.at(Channel::BB, i, s)) < 1e-12 * vmax);
        CHECK(std::abs(a.at(Channel::FB, s, i) - b.at(Channel::BF, i, s)) < 1e-12 * vmax);
      }
    }
  }
}

TEST_CASE("symmetric stack: degenerate mirror pairs with equal polarizations vanish") {
  const TwoPhotonEngine engine(small_stack(), pump(Polarization::TM));
  double vmax = 0.0;
  for (double ts : {0.2, 0.6, 1.0}) {
    for (double f : {0.45, 0.5, 0.55}) {
      const double ws = f * kWp;
      const auto idl = idler_direction(kWp, 0, 0, ws, ts, 0.0);
      for (auto v : engine.amplitude(ws, ts, 0.0, idl.theta, idl.psi).v) vmax = std::max(vmax, std::abs(v));
    }
  }
  REQUIRE(vmax > 0.0);
  for (double ts : {0.2, 0.6, 1.0}) {
    const auto a = engine.amplitude(kWp / 2, ts, 0.0, -ts, 0.0);
    for (int p = 0; p < 2; ++p) {
      CHECK(std::abs(a.at(Channel::FF, p, p)) < 1e-10 * vmax);
      CHECK(std::abs(a.at(Channel::BB, p, p)) < 1e-10 * vmax);
    }
  }
}

TEST_CASE("focused amplitude at the phase-matched idler carries the envelope peak") {
  const double rp = 40e-6;
  const TwoPhotonEngine col(small_stack(), pump(Polarization::TE));
  const TwoPhotonEngine foc(small_stack(), pump(Polarization::TE, rp));
  const double ws = 0.48 * kWp;
  const auto idl = idler_direction(kWp, 0, 0, ws, 0.35, -0.2);
  const auto a = col.amplitude(ws, 0.35, -0.2, idl.theta, idl.psi);
  const auto b = foc.amplitude(ws, 0.35, -0.2, idl.theta, idl.psi);
  const double peak = rp / std::sqrt(2 * kPi);
  for (std::size_t k = 0; k < a.v.size(); ++k) CHECK(std::abs(b.v[k] - peak * a.v[k]) <= 1e-12 * std::abs(b.v[k]) + 1e-300);
}

TEST_CASE("focused signal density converges to the collimated one") {
  const double ts = 30 * kDeg;
  const std::vector<double> omegas = {kWp / 2};
  AmplitudeGrid cg;
  cg.omega_s = omegas;
  cg.theta_s = {ts};
  cg.psi_s = {0.0};
  const TwoPhotonEngine col(small_stack(), pump(Polarization::TE));
  const auto ns_col = signal_density(pair_density(assemble_phi(col, cg)));

  IdlerWindow win;
  win.half_theta = 1.2 * kDeg;
  win.half_psi = 2.5 * kDeg;
  win.n_theta = 121;
  win.n_psi = 121;
  const TwoPhotonEngine foc(small_stack(), pump(Polarization::TE, 50e-6));
  const auto ns_foc = signal_density(pair_density(assemble_phi(foc, idler_window_grid(omegas, ts, 0.0, win))));
  REQUIRE(ns_col.values[0] > 0.0);
  CHECK(ns_foc.values[0] == doctest::Approx(ns_col.values[0]).epsilon(0.01));
}

TEST_CASE("tighter focusing widens the azimuthal spread of the correlated area") {
  const double ts = 30 * kDeg;
  std::vector<double> omegas;
  for (int k = 0; k < 9; ++k) omegas.push_back(kWp * (0.498 + 0.0005 * k));
  IdlerWindow win;
  win.half_theta = 2.0 * kDeg;
  win.half_psi = 4.0 * kDeg;
  win.n_theta = 41;
  win.n_psi = 81;
  double previous = 1e9;
  for (double rp : {15e-6, 30e-6, 80e-6}) {
    const TwoPhotonEngine engine(small_stack(), pump(Polarization::TE, rp));
    const auto pd = pair_density(assemble_phi(engine, idler_window_grid(omegas, ts, 0.0, win)));
    const double spread = azimuthal_spread(correlated_area(pd, ts, 0.0, win));
    CHECK(spread < previous);
    previous = spread;
  }
}

TEST_CASE("grid checks and sampling warnings") {
  const TwoPhotonEngine engine(build_ab_stack(chi2("nl", 2.3), make_isotropic("lin", 2.05), 101, 95e-9, 70e-9),
                               pump(Polarization::TE));
  AmplitudeGrid bad;
  bad.omega_s = {kWp / 2};
  bad.theta_s = {1.6};
  bad.psi_s = {0.0};
  CHECK_THROWS_AS(assemble_phi(engine, bad), Error);

  AmplitudeGrid coarse;
  coarse.omega_s = {0.45 * kWp, 0.55 * kWp};
  coarse.theta_s = {0.0, 0.8};
  coarse.psi_s = {0.0};
  CHECK_FALSE(sampling_warnings(engine, coarse).empty());
}

TEST_CASE("collimated assembly stores the kinematic idler") {
  const TwoPhotonEngine engine(small_stack(), pump(Polarization::TE));
  AmplitudeGrid g;
  g.omega_s = {0.4 * kWp, 0.5 * kWp};
  g.theta_s = {0.1, 0.9};
  g.psi_s = {-0.5, 0.5};
  const auto phi = assemble_phi(engine, g, 2);
  REQUIRE(phi.values.size() == 8);
  const auto idl = phi.idler[phi.index(0, 1, 0)];
  const auto expect = idler_direction(kWp, 0, 0, 0.4 * kWp, 0.9, -0.5);
  CHECK(idl.theta == expect.theta);
  CHECK(idl.psi == expect.psi);
  const auto direct = engine.amplitude(0.4 * kWp, 0.9, -0.5, expect.theta, expect.psi);
  const auto stored = phi.values[phi.index(0, 1, 0)];
  for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(direct.v[k] - stored.v[k]) <= 1e-12 * std::abs(direct.v[k]) + 1e-300);
}

TEST_CASE("thread count does not change the amplitudes") {
  const TwoPhotonEngine engine(small_stack(), pump(Polarization::TM));
  AmplitudeGrid g;
  for (int k = 0; k < 6; ++k) g.omega_s.push_back(kWp * (0.45 + 0.02 * k));
  for (int k = 0; k < 5; ++k) g.theta_s.push_back(0.25 * k);
  g.psi_s = {0.0, 0.7};
  const auto a = assemble_phi(engine, g, 1);
  const auto b = assemble_phi(engine, g, 4);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i].v == b.values[i].v);
}

TEST_CASE("reference sum uses the largest tensor element") {
  const auto stack = small_stack();
  const TwoPhotonEngine engine(stack, pump(Polarization::TE));
  CHECK(engine.nonlinear_layers() == 4);
  CHECK(engine.reference_sum() == doctest::Approx(1.3 * 4 * 95e-9).epsilon(1e-14));
  CHECK(engine.frequency_weight(kWp / 2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("channel names") {
  for (auto c : kChannels) CHECK(channel_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(channel_from_string("XY"), Error);
}

TEST_CASE("chunked focused correlated area matches the full-grid assembly") {
  const double ts = 30 * kDeg;
  std::vector<double> omegas;
  for (int k = 0; k < 150; ++k) omegas.push_back(kWp * (0.49 + 0.0001 * k));
  IdlerWindow win;
  win.half_theta = 2.0 * kDeg;
  win.half_psi = 3.0 * kDeg;
  win.n_theta = 64;
  win.n_psi = 64;
  REQUIRE(omegas.size() > kFocusedChunkRecords / (win.n_theta * win.n_psi));
  const TwoPhotonEngine engine(small_stack(), pump(Polarization::TE, 30e-6));
  const auto full = correlated_area(pair_density(assemble_phi(engine, idler_window_grid(omegas, ts, 0.0, win))),
                                    ts, 0.0, win);
  const auto chunked = focused_correlated_area(engine, omegas, ts, 0.0, win, {}, 2);
  REQUIRE(full.values.size() == chunked.values.size());
  double vmax = 0.0;
  for (double v : full.values) vmax = std::max(vmax, v);
  for (std::size_t j = 0; j < full.values.size(); ++j) CHECK(std::abs(full.values[j] - chunked.values[j]) <= 1e-12 * vmax);
  CHECK(chunked.islands.size() == full.islands.size());
  CHECK(chunked.total_weight == doctest::Approx(full.total_weight).epsilon(1e-12));
}
