#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/states.hpp"
#include "fisher_hydro/stresstests.hpp"

using namespace fisher_hydro;

namespace {
const PhysicalConstants kUnit{1.0, 1.0, 0.5};
constexpr double kPi = std::numbers::pi;

SuperpositionConfig small_config() {
  SuperpositionConfig sc;
  sc.n_base = 1024;
  sc.dt_base = 0.005;
  return sc;
}

std::vector<ComplexifierState> complexifier_states(const Grid& g) {
  RealField V = harmonic_potential(g, 1.0, 1.0), V0(g.size(), 0.0);
  return {complexifier_state("trapped", gaussian_packet(g, 1.0, 1.0, 0.7), V, 1e-4, kUnit),
          complexifier_state("free", gaussian_packet(g, -1.0, 0.8, 1.1), V0, 1e-4, kUnit)};
}
}  // namespace

TEST_CASE("closed-form phase beats random phases") {
  Grid g = make_grid(1, 256, 10.0);
  std::mt19937 rng(41);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 4; ++trial) {
    ComplexField a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = {nd(rng), nd(rng)}, b[i] = {nd(rng), nd(rng)};
    auto best = projective_residual(a, b, g);
    CHECK(best.residual == doctest::Approx(projective_residual_at(a, b, g, best.theta)).epsilon(1e-14));
    for (int k = 0; k < 64; ++k) CHECK(best.residual <= projective_residual_at(a, b, g, u(rng)) + 1e-15);
  }
  SUBCASE("a rotated copy is recovered exactly") {
    ComplexField a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = {nd(rng), nd(rng)};
    ComplexField b = a;
    for (auto& z : b) z *= std::polar(3.7, -0.9);
    auto r = projective_residual(a, b, g);
    CHECK(r.residual <= 1e-14);
    CHECK(r.theta == doctest::Approx(0.9).epsilon(1e-12));
  }
  CHECK_THROWS_AS(projective_residual(ComplexField(g.size(), 0.0), ComplexField(g.size(), 1.0), g), NumericalError);
}

TEST_CASE("superposition residual") {
  auto sc = small_config();
  SUBCASE("linear flow superposes on rays") {
    CHECK(superposition_residual(sc, 0.0).residual <= 1e-10);
  }
  SUBCASE("nonlinear flow breaks superposition") {
    const double r = superposition_residual(sc, 0.02).residual;
    MESSAGE("beta 0.02 residual " << r);
    CHECK(r >= 1e-3);
    CHECK(r <= std::sqrt(2.0) + 1e-12);
  }
  SUBCASE("identical packets give no residual") {
    Grid g = make_grid(1, 1024, 40.0);
    auto psi = gaussian_packet(g, -2.0, 1.0, 0.4);
    auto V = harmonic_potential(g, 1.0, 1.0);
    for (double beta : {0.0, 0.05}) {
      auto r = superposition_residual(psi, psi, V, BetaNonlinear{beta, 1e-6}, 0.005, 0.5, kUnit);
      CHECK(r.residual <= 1e-12);
    }
  }
  SUBCASE("overlapping packets are refused") {
    sc.x1 = -2.0;
    sc.x2 = 2.0;
    CHECK_THROWS_AS(superposition_residual(sc, 0.0), ConfigError);
  }
  SUBCASE("negative beta is refused") {
    sc.betas = {0.0, -0.01};
    CHECK_THROWS_AS(sc.validate(), ConfigError);
  }
}

TEST_CASE("superposition curve") {
  auto sc = small_config();
  sc.betas = {0.0, 0.01, 0.05};
  auto curve = superposition_curve(sc, 2);
  REQUIRE(curve.rows.size() == 3);
  CHECK(curve.monotone);
  CHECK(curve.refinement_stable);
  CHECK(curve.rows[0].base <= 1e-10);
  CHECK(curve.rows[0].refined <= 1e-10);
  for (std::size_t i = 0; i < curve.rows.size(); ++i) CHECK(curve.rows[i].beta == sc.betas[i]);
  // Serial and threaded runs do the same arithmetic per cell.
  auto serial = superposition_curve(sc, 1);
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].base == curve.rows[i].base);
    CHECK(serial.rows[i].refined == curve.rows[i].refined);
  }
}

TEST_CASE("complexifier scan singles out the polar map") {
  Grid g = make_grid(1, 2048, 40.0);
  auto states = complexifier_states(g);
  CHECK(complexifier_defect(states[0], 0.5, 1.0 / kUnit.hbar, kUnit) <= 1e-6);
  CHECK(complexifier_defect(states[0], 1.0, 1.0 / kUnit.hbar, kUnit) >= 1e-2);
  CHECK_THROWS_AS(complexifier_defect(states[0], 0.0, 1.0, kUnit), ConfigError);
  CHECK_THROWS_AS(complexifier_defect(states[0], 0.5, -1.0, kUnit), ConfigError);

  std::vector<double> ps{0.3, 0.4, 0.5, 0.6, 0.7}, ss{0.8, 0.9, 1.0, 1.1, 1.2};
  auto r = complexifier_scan(ps, ss, states, kUnit);
  CHECK(r.informative);
  CHECK(r.unique_min);
  CHECK(r.best_p == 0.5);
  CHECK(r.best_s == 1.0);
  CHECK(r.alpha_recovered == doctest::Approx(kUnit.alpha_star()).epsilon(1e-12));
  CHECK(r.min_defect <= 1e-6);
  CHECK(r.defect.size() == ps.size());
  CHECK_THROWS_AS(complexifier_scan({}, ss, states, kUnit), ConfigError);

  SUBCASE("a featureless state is uninformative") {
    WaveField flat(g, ComplexField(g.size(), 1.0 / std::sqrt(40.0)));
    RealField V0(g.size(), 0.0);
    auto u = complexifier_scan(ps, ss, {complexifier_state("uniform", flat, V0, 1e-4, kUnit)}, kUnit);
    CHECK_FALSE(u.informative);
    CHECK_FALSE(u.unique_min);
  }
}

TEST_CASE("time reversal involution") {
  Grid g = make_grid(1, 1024, 40.0);
  auto V = harmonic_potential(g, 1.0, 1.0);
  auto psi = gaussian_packet(g, 1.0, 1.0, 0.5);
  const double rev = involution_defect(psi, V, 2.0, 0.01, 0.0, kUnit);
  CHECK(rev <= 1e-10);
  CHECK(involution_defect(psi, V, 0.0, 0.01, 0.05, kUnit) == 0.0);

  auto r = time_reversal_defect(psi, V, 2.0, 0.01, 0.05, kUnit);
  CHECK(r.steps == 200);
  CHECK(r.defect_reversible == rev);
  CHECK(r.floor_ratio >= 1e3);
  CHECK(r.defect >= 1e-3);

  SUBCASE("reversible defect grows at most linearly") {
    const double twice = involution_defect(psi, V, 4.0, 0.01, 0.0, kUnit);
    CHECK(twice <= 4.0 * std::max(rev, 1e-15));
  }
  CHECK_THROWS_AS(involution_defect(psi, V, 1.005, 0.01, 0.0, kUnit), ConfigError);
  CHECK_THROWS_AS(involution_defect(psi, V, 1.0, 0.0, 0.0, kUnit), ConfigError);
}

TEST_CASE("circulation is quantised") {
  Grid g = make_grid(2, 256, 20.0);
  SUBCASE("single vortex") {
    auto r = circulation(vortex_state(g, 1, 2.0), 2.5, 0.0, 0.0, kUnit);
    CHECK(std::abs(r.n_estimate - 1.0) <= 1e-8);
    CHECK(std::abs(r.line_value - 2 * kPi * kUnit.hbar) <= 1e-8);
    CHECK(r.half_side_cells == 32);
  }
  SUBCASE("node-free Gaussian") {
    auto r = circulation(vortex_state(g, 0, 2.0), 2.5, 0.0, 0.0, kUnit);
    CHECK(std::abs(r.n_estimate) <= 1e-12);
    CHECK(std::abs(r.area_value) <= 1e-12);
  }
  SUBCASE("double vortex, line against area") {
    auto r = circulation(vortex_state(g, 2, 2.0), 2.5, 0.0, 0.0, kUnit);
    CHECK(std::abs(r.n_estimate - 2.0) <= 1e-6);
    CHECK(std::abs(r.line_value - r.area_value) <= 1e-6);
  }
  SUBCASE("loop deformation keeps the winding") {
    auto psi = vortex_state(g, -1, 2.0);
    auto a = circulation(psi, 1.0, 0.0, 0.0, kUnit), b = circulation(psi, 4.0, 0.3, -0.2, kUnit);
    CHECK(std::round(a.n_estimate) == -1.0);
    CHECK(std::round(a.n_estimate) == std::round(b.n_estimate));
    CHECK(std::abs(a.n_estimate - b.n_estimate) <= 1e-8);
  }
  SUBCASE("scaled hbar") {
    const PhysicalConstants c{0.5, 1.0, 0.125};
    CHECK(std::abs(circulation(vortex_state(g, 1, 2.0), 2.5, 0.0, 0.0, c).line_value - 2 * kPi * 0.5) <= 1e-8);
  }
  SUBCASE("invalid loops") {
    auto psi = vortex_state(g, 1, 2.0);
    CHECK_THROWS_AS(circulation(psi, 2.5, 2.5, 0.0, kUnit), NumericalError);
    CHECK_THROWS_AS(circulation(psi, 0.1, 0.0, 0.0, kUnit), ConfigError);
    CHECK_THROWS_AS(circulation(psi, 11.0, 0.0, 0.0, kUnit), ConfigError);
  }
}
