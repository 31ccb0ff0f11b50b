#include <doctest.h>

#include <cmath>

#include "ionlink/optics.hpp"

using namespace ionlink;

namespace {

CollectionGeometry geom(double na, int qp = 128) {
  CollectionGeometry g;
  g.numerical_aperture = na;
  g.quadrature_points = qp;
  return g;
}

// Optimal coupling of a uniform disk into a full-plane Gaussian:
// max over u of 2 (1 - e^{-u})^2 / u (the paraxial mode-matching limit).
double disk_gaussian_limit() {
  double best = 0.0;
  for (double u = 0.5; u < 3.0; u += 1e-5)
    best = std::max(best, 2.0 * std::pow(1.0 - std::exp(-u), 2) / u);
  return best;
}

}  // namespace

TEST_SUITE("optics") {

TEST_CASE("dipole fields: angular patterns and normalization") {
  // pi channel: zero along z, maximal perpendicular to z
  const auto along_z = dipole_field(EmissionChannel::pi, {0.0, 0.0, 1.0});
  double i_along = 0.0;
  for (const cd& v : along_z) i_along += std::norm(v);
  CHECK(i_along == doctest::Approx(0.0).epsilon(1e-15));

  const auto perp = dipole_field(EmissionChannel::pi, {1.0, 0.0, 0.0});
  double i_perp = 0.0;
  for (const cd& v : perp) i_perp += std::norm(v);
  CHECK(i_perp > 0.0);

  // sigma+ intensity perpendicular to z is half its value along z
  const auto s_perp = dipole_field(EmissionChannel::sigma_plus, {1.0, 0.0, 0.0});
  const auto s_along = dipole_field(EmissionChannel::sigma_plus, {0.0, 0.0, 1.0});
  double is_perp = 0.0, is_along = 0.0;
  for (const cd& v : s_perp) is_perp += std::norm(v);
  for (const cd& v : s_along) is_along += std::norm(v);
  CHECK(is_perp == doctest::Approx(0.5 * is_along).epsilon(1e-12));
  // and pi has twice the sigma+ intensity perpendicular to z
  CHECK(i_perp == doctest::Approx(2.0 * is_perp).epsilon(1e-12));

  // full-sphere intensity integral = 1 per channel (midpoint rule)
  for (EmissionChannel ch : {EmissionChannel::sigma_plus, EmissionChannel::pi}) {
    double total = 0.0;
    const int nt = 2500, np = 180;
    for (int i = 0; i < nt; ++i) {
      const double t = M_PI * (i + 0.5) / nt;
      for (int j = 0; j < np; ++j) {
        const double p = 2.0 * M_PI * (j + 0.5) / np;
        const auto e = dipole_field(
            ch, {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)});
        double inten = 0.0;
        for (const cd& v : e) inten += std::norm(v);
        total += inten * std::sin(t) * (M_PI / nt) * (2.0 * M_PI / np);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }

  CHECK_THROWS_AS(dipole_field(EmissionChannel::pi, {0.0, 0.0, 2.0}), ValidationError);
}

TEST_CASE("free-space collection: limits and monotonicity") {
  CHECK(free_space_collection(geom(1e-3)) == doctest::Approx(0.0).epsilon(1e-6));
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double eff = free_space_collection(geom(0.045 * i));
    CHECK(eff > prev);
    prev = eff;
  }
  // half-sphere is half the emission
  CHECK(free_space_collection(geom(1.0 - 1e-9)) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("free-space collection at NA 0.6 is 10.0%") {
  CHECK(free_space_collection(geom(0.6)) == doctest::Approx(0.100).epsilon(2e-3));
}

TEST_CASE("fiber anchors at NA 0.6: 8.0% absolute, 80% of free space") {
  const double fiber = fiber_coupled_collection(geom(0.6, 192));
  const double fs = free_space_collection(geom(0.6, 192));
  CHECK(std::abs(fiber - 0.080) < 0.004);
  CHECK(std::abs(fiber / fs - 0.80) < 0.04);
}

TEST_CASE("small-NA fiber coupling approaches the disk-Gaussian mode-matching limit") {
  // no polarization mixing survives at small NA: the fiber/free-space
  // ratio reduces to the scalar uniform-disk -> Gaussian coupling optimum
  const double ratio =
      fiber_coupled_collection(geom(0.05, 96)) / free_space_collection(geom(0.05, 96));
  CHECK(std::abs(ratio - disk_gaussian_limit()) < 0.02 * disk_gaussian_limit());
}

TEST_CASE("waist optimization beats a 50-point scan") {
  const double auto_eff = fiber_coupled_collection(geom(0.4, 96));
  double scan_best = 0.0;
  for (int k = 0; k < 50; ++k) {
    CollectionGeometry g = geom(0.4, 96);
    g.gaussian_waist = 0.10 + 2.4 * k / 49.0;
    scan_best = std::max(scan_best, fiber_coupled_collection(g));
  }
  CHECK(auto_eff >= scan_best - 1e-4);
}

TEST_CASE("free-space fidelity falls with NA; fiber filtering restores unity") {
  CHECK(free_space_fidelity(geom(0.01)) == doctest::Approx(1.0).epsilon(1e-5));
  const double f03 = free_space_fidelity(geom(0.3));
  const double f06 = free_space_fidelity(geom(0.6));
  CHECK(f06 < f03);
  CHECK(f03 < 1.0);
  for (double na : {0.2, 0.4, 0.6, 0.8})
    CHECK(std::abs(fiber_filtered_fidelity(geom(na)) - 1.0) < 1e-9);
}

TEST_CASE("curve scan invariants and CSV emission") {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
  const std::vector<CurveRow> rows = curve_scan(grid, 96);
  REQUIRE(rows.size() == 9);
  for (const CurveRow& r : rows) {
    CHECK(r.fiber_eff < r.free_space_eff);
    CHECK(r.fiber_eff > 0.0);
    CHECK(r.free_space_eff <= 1.0);
    CHECK(r.free_space_fidelity <= 1.0 + 1e-12);
  }
  const CurveRow& at06 = rows[5];
  CHECK(std::abs(at06.fiber_eff - 0.080) < 0.004);
  CHECK(std::abs(at06.fiber_eff / at06.free_space_eff - 0.80) < 0.04);

  const std::string csv = curve_csv(rows);
  CHECK(csv.find("na,free_space_eff,fiber_eff,free_space_fidelity\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("quadrature convergence: doubling the grid moves results < 1e-4") {
  for (double na : {0.25, 0.6}) {
    const double c1 = free_space_collection(geom(na, 96));
    const double c2 = free_space_collection(geom(na, 192));
    CHECK(std::abs(c2 - c1) < 1e-4);
    CollectionGeometry g1 = geom(na, 96), g2 = geom(na, 192);
    g1.gaussian_waist = 0.9;
    g2.gaussian_waist = 0.9;
    CHECK(std::abs(fiber_coupled_collection(g2) - fiber_coupled_collection(g1)) < 1e-4);
  }
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(free_space_collection(geom(0.0)), ValidationError);
  CHECK_THROWS_AS(free_space_collection(geom(1.2)), ValidationError);
  CHECK_THROWS_AS(free_space_collection(geom(0.5, 16)), ValidationError);
}

}  // TEST_SUITE
