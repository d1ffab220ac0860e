#include <cmath>

#include "doctest.h"
#include "spdc/constants.hpp"
#include "spdc/error.hpp"
#include "spdc/materials.hpp"
#include "support.hpp"

using namespace spdc;

TEST_CASE("GaN ordinary index matches a hand-evaluated Sellmeier sum") {
  const auto gan = test::shipped_db().get("GaN");
  const double l = 0.8;
  const double n2 = 3.6 + 1.75 * l * l / (l * l - 0.256 * 0.256) + 4.1 * l * l / (l * l - 17.86 * 17.86);
  CHECK(gan->n_ordinary.index_at_wavelength_um(l) == doctest::Approx(std::sqrt(n2)).epsilon(1e-14));
  CHECK(refractive_index(*gan, Axis::Ordinary, omega_from_wavelength(0.8e-6)) ==
        doctest::Approx(std::sqrt(n2)).epsilon(1e-12));
}

TEST_CASE("AlN extraordinary index matches a hand-evaluated Sellmeier sum") {
  const auto aln = test::shipped_db().get("AlN");
  const double l = 0.4;
  const double n2 = 3.0729 + 1.6173 * l * l / (l * l - 0.1746 * 0.1746) + 4.139 * l * l / (l * l - 15.03 * 15.03);
  CHECK(aln->n_extraordinary.index_at_wavelength_um(l) == doctest::Approx(std::sqrt(n2)).epsilon(1e-14));
}

TEST_CASE("evaluation outside the validity window throws") {
  const auto gan = test::shipped_db().get("GaN");
  try {
    gan->n_ordinary.index_at_wavelength_um(0.2);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
  CHECK_NOTHROW(gan->n_ordinary.index_at_wavelength_um(0.36));
}

TEST_CASE("constant dispersion model") {
  const auto m = DispersionModel::constant(2.5);
  CHECK(m.is_constant());
  CHECK(m.index_at_wavelength_um(0.3) == 2.5);
  CHECK(m.index_at_wavelength_um(3.0) == 2.5);
}

TEST_CASE("contracted d expands symmetrically in the last two indices") {
  DContracted dc{};
  dc[0][4] = 1.0;   // d15 -> d_xxz
  dc[2][2] = -2.0;  // d33
  dc[1][3] = 3.0;   // d24 -> d_yyz
  dc[2][5] = 4.0;   // d36 -> d_zxy
  const auto d = expand_contracted(dc);
  CHECK(d[0][0][2] == 1.0);
  CHECK(d[0][2][0] == 1.0);
  CHECK(d[2][2][2] == -2.0);
  CHECK(d[1][1][2] == 3.0);
  CHECK(d[1][2][1] == 3.0);
  CHECK(d[2][0][1] == 4.0);
  CHECK(d[2][1][0] == 4.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(d[i][j][k] == d[i][k][j]);
}

TEST_CASE("shipped GaN is nonlinear, AlN is linear") {
  const auto& db = test::shipped_db();
  CHECK(db.get("GaN")->is_nonlinear);
  CHECK(db.get("GaN")->max_abs_d() == 5.0);
  CHECK_FALSE(db.get("AlN")->is_nonlinear);
  CHECK(db.contains("air"));
}

TEST_CASE("effective TM index interpolates between the principal indices") {
  CHECK(effective_tm_index(2.0, 2.2, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(effective_tm_index(2.0, 2.2, kPi / 2) == doctest::Approx(2.2).epsilon(1e-15));
  const double mid = effective_tm_index(2.0, 2.2, kPi / 4);
  CHECK(mid > 2.0);
  CHECK(mid < 2.2);
}

TEST_CASE("material file errors name the offending key") {
  const std::string bad = R"(name: X
ordinary: {constant: 2.0}
colour: blue
)";
  try {
    MaterialDb::from_yaml_string(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key().find("colour") != std::string::npos);
  }
}

TEST_CASE("unknown material lookup") {
  CHECK_THROWS_AS(test::shipped_db().get("Unobtainium"), Error);
}
