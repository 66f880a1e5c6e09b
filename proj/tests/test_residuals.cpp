#include <cmath>

#include "doctest.h"
#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/residuals.hpp"
#include "fisher_hydro/states.hpp"

using namespace fisher_hydro;

namespace {
const PhysicalConstants kUnit{1.0, 1.0, 0.5};

ResidualOptions spectral() {
  ResidualOptions o;
  o.estimator = PhaseRateEstimator::kSpectral;
  return o;
}

struct Free {
  Grid grid;
  RealField V;
  Trajectory traj;
};

Free free_run(const PhysicalConstants& c, double k0 = 0.0, std::size_t n = 1024) {
  Grid g = make_grid(1, n, 40.0);
  RealField V(g.size(), 0.0);
  EvolutionSpec s;
  s.dt = 0.01;
  s.t_final = 1.0;
  s.record_stride = 10;
  return {g, V, evolve(gaussian_packet(g, 0.0, 1.0, k0), V, s, c)};
}
}  // namespace

TEST_CASE("eigenstate residuals sit at the floor") {
  Grid g = make_grid(1, 2048, 20.0);
  auto V = harmonic_potential(g, 1.0, 1.0);
  auto psi = harmonic_eigenstate(g, 0, kUnit, 1.0);
  auto triple = make_triple(psi, V, 0.01, LinearKind{}, kUnit);
  auto d = compute_diagnostics(triple, V, kUnit, spectral());
  CHECK(continuity_residual(d) <= 1e-12);
  CHECK(hj_residual(d, kUnit.alpha_star()) <= 1e-8);
  const double classical = hj_residual(d, 0.0);
  CHECK(classical >= 1e-2);
  CHECK(classical <= 1.0);
  CHECK(d.mask_fraction > 0.0);
  CHECK(d.mask_fraction <= 1.0);
  CHECK(hj_residual(psi, V, kUnit.alpha_star(), kUnit, spectral()) <= 1e-8);
}

TEST_CASE("diffusion breaks the continuity residual") {
  Grid g = make_grid(1, 2048, 40.0);
  RealField V(g.size(), 0.0);
  auto psi = gaussian_packet(g, 0.0, 1.0, 1.0);
  auto lin = make_triple(psi, V, 0.01, LinearKind{}, kUnit);
  auto dg = make_triple(psi, V, 0.01, DgDiffusion{0.05}, kUnit);
  CHECK(continuity_residual(lin, kUnit, 1e-6) <= 1e-6);
  CHECK(continuity_residual(dg, kUnit, 1e-6) >= 1e-3);
}

TEST_CASE("free-packet scan pins alpha_star") {
  auto run = free_run(kUnit);
  auto ratios = ratio_grid(0.5, 1.5, 41);
  auto r = alpha_scan(run.traj, run.V, ratios, kUnit);
  CHECK(r.argmin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(r.inconclusive);
  CHECK(r.alphas == ratios);
  SUBCASE("continuity does not depend on alpha") {
    for (double v : r.continuity) CHECK(std::abs(v - r.continuity[0]) <= 1e-14);
  }
  SUBCASE("single minimum") {
    std::size_t local_minima = 0;
    for (std::size_t i = 1; i + 1 < r.residuals.size(); ++i)
      if (r.residuals[i] < r.residuals[i - 1] && r.residuals[i] < r.residuals[i + 1]) ++local_minima;
    CHECK(local_minima == 1);
  }
  SUBCASE("smoothing the phase rate leaves the minimum in place") {
    ResidualOptions o;
    o.smooth_phase_rate = true;
    auto s = alpha_scan(run.traj, run.V, ratios, kUnit, o);
    CHECK(s.argmin == r.argmin);
    CHECK(std::abs(s.min_value - r.min_value) <= 0.05 * r.min_value);
  }
  for (const auto& smp : r.samples) {
    CHECK(smp.r_hj >= 0.0);
    CHECK(smp.r_hj <= 1.0);
    CHECK(smp.alpha_used == doctest::Approx(kUnit.alpha_star()));
  }
}

TEST_CASE("boosting the data leaves the scan curve unchanged") {
  auto rest = free_run(kUnit, 0.0);
  auto moving = free_run(kUnit, 1.5);
  auto ratios = ratio_grid(0.5, 1.5, 21);
  auto a = alpha_scan(rest.traj, rest.V, ratios, kUnit);
  auto b = alpha_scan(moving.traj, moving.V, ratios, kUnit);
  CHECK(a.argmin == b.argmin);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    CHECK(std::abs(a.residuals[i] - b.residuals[i]) <= 1e-10);
    CHECK(std::abs(a.continuity[i] - b.continuity[i]) <= 1e-10);
  }
  SUBCASE("snapshot boost of a single state") {
    Grid g = make_grid(1, 2048, 20.0);
    auto V = harmonic_potential(g, 1.0, 1.0);
    auto psi = harmonic_eigenstate(g, 0, kUnit, 1.0);
    auto boosted = galilean_boost(psi, 0.8, kUnit);
    CHECK(hj_residual(boosted, V, 0.0, kUnit, spectral()) > 0.0);
    CHECK(boosted.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("scan follows alpha_star when hbar and m are rescaled") {
  const PhysicalConstants c{2.0, 2.0, 1.0};
  auto run = free_run(c);
  auto r = alpha_scan(run.traj, run.V, ratio_grid(0.5, 1.5, 41), c);
  CHECK(r.argmin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.samples.front().alpha_used == doctest::Approx(c.alpha_star()));
}

TEST_CASE("scan boundary minimum is flagged") {
  auto run = free_run(kUnit);
  auto r = alpha_scan(run.traj, run.V, ratio_grid(1.1, 1.5, 9), kUnit);
  CHECK(r.inconclusive);
  CHECK(r.argmin == doctest::Approx(1.1));
}

TEST_CASE("scan input validation") {
  auto run = free_run(kUnit);
  CHECK_THROWS_AS(ratio_grid(1.0, 0.5, 5), ConfigError);
  CHECK_THROWS_AS(ratio_grid(0.5, 1.5, 1), ConfigError);
  CHECK_THROWS_AS(alpha_scan(run.traj, run.V, {1.0, 0.9, 1.1}, kUnit), ConfigError);
  Trajectory short_traj = run.traj;
  short_traj.snapshots.erase(short_traj.snapshots.begin() + 2, short_traj.snapshots.end());
  CHECK_THROWS_AS(alpha_scan(short_traj, run.V, {0.9, 1.0, 1.1}, kUnit), std::invalid_argument);
  ResidualOptions empty;
  empty.eps_mask = 2.0;
  CHECK_THROWS_AS(compute_diagnostics(run.traj.snapshots[1], run.V, kUnit, empty), NumericalError);
}

TEST_CASE("mean subtraction is idempotent") {
  auto run = free_run(kUnit);
  auto triple = make_triple(run.traj.snapshots[3], run.V, 0.01, LinearKind{}, kUnit);
  auto d = compute_diagnostics(triple, run.V, kUnit, {});
  auto once = mean_subtracted(d.S_t, d);
  auto twice = mean_subtracted(once, d);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < once.size(); ++i) {
    worst = std::max(worst, std::abs(once[i] - twice[i]));
    scale = std::max(scale, std::abs(once[i]));
  }
  CHECK(worst <= 1e-14 * scale);
  CHECK(std::abs(weighted_mean(once, d)) <= 1e-14 * scale);
}

TEST_CASE("multi-mass scan has a common minimum") {
  Grid g = make_grid(1, 1024, 20.0);
  auto c_grid = ratio_grid(0.75, 1.25, 61);
  auto r = multi_mass_scan(c_grid, {0.5, 1.0, 3.0}, 1.0, 1.0, g);
  CHECK(r.common);
  CHECK_FALSE(r.inconclusive);
  CHECK(r.common_argmin == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& s : r.per_mass) CHECK(s.argmin == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("a biased component shifts to 1 / bias") {
    auto b = multi_mass_scan(c_grid, {0.5, 1.0, 3.0}, 1.0, 1.0, g, {1.0, 1.2, 1.0});
    CHECK(std::abs(b.per_mass[1].argmin - 1.0 / 1.2) <= 1e-9);
    CHECK(b.per_mass[0].argmin == doctest::Approx(1.0));
    CHECK_FALSE(b.common);
  }
  SUBCASE("single mass") {
    auto one = multi_mass_scan(c_grid, {1.0}, 1.0, 1.0, g);
    CHECK(one.common);
    CHECK(one.common_argmin == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(multi_mass_scan(c_grid, {}, 1.0, 1.0, g), ConfigError);
}

TEST_CASE("eigenstate defect vanishes at the true coefficient") {
  Grid g = make_grid(1, 2048, 20.0);
  auto V = harmonic_potential(g, 1.0, 1.0);
  auto rho = harmonic_eigenstate(g, 0, kUnit, 1.0).density();
  Mask mask = make_mask(rho, 1e-6);
  const double at = eigenstate_defect(rho, V, 0.5, 0.5, g, mask);
  CHECK(at <= 1e-8);
  CHECK(eigenstate_defect(rho, V, 0.5, 0.6, g, mask) > 1e3 * at);
}

TEST_CASE("momentum balance closes only at alpha_star") {
  // The floor is the centred time stencil for d_t(rho v): spatial terms are already converged at
  // n = 1024, so refinement (2n, dt/2) cuts it by the second-order factor 4 up to rounding.
  auto balance = [](std::size_t n, double ratio) {
    Grid g = make_grid(1, n, 40.0);
    RealField V(g.size(), 0.0);
    auto psi = gaussian_packet(g, 0.0, 1.0, 0.5);
    const double dt = 1.0 / static_cast<double>(n);
    SplitStepper st(g, V, dt, LinearKind{}, kUnit);
    for (std::size_t k = 0; k < n / 2; ++k) st.step(psi.values);
    auto triple = make_triple(psi, V, dt, LinearKind{}, kUnit);
    return momentum_balance_residual(triple, V, ratio * kUnit.alpha_star(), kUnit);
  };
  const double coarse = balance(1024, 1.0), fine = balance(2048, 1.0);
  MESSAGE("momentum balance at alpha_star " << coarse << " -> " << fine);
  CHECK(fine <= 1e-5);
  CHECK(coarse / fine >= 4.0 * (1.0 - 1e-3));
  CHECK(balance(2048, 1.2) >= 10.0 * fine);

  Grid g = make_grid(1, 256, 10.0);
  WaveField flat(g, ComplexField(g.size(), 1.0 / std::sqrt(10.0)));
  RealField V0(g.size(), 0.0);
  CHECK(momentum_balance_residual(make_triple(flat, V0, 1e-3, LinearKind{}, kUnit), V0, 0.5, kUnit) == 0.0);
}
