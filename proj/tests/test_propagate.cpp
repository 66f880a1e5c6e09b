#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/functionals.hpp"
#include "fisher_hydro/states.hpp"
#include "oracles.hpp"

using namespace fisher_hydro;

namespace {
const PhysicalConstants kUnit{1.0, 1.0, 0.5};

double l2_distance(const ComplexField& a, const ComplexField& b, const Grid& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * g.cell_volume());
}

WaveField run(WaveField psi, const RealField& V, double dt, std::size_t steps, const EvolutionKind& kind) {
  SplitStepper st(psi.grid, V, dt, kind, kUnit);
  for (std::size_t s = 0; s < steps; ++s) st.step(psi.values);
  return psi;
}
}  // namespace

TEST_CASE("evolution spec validation") {
  EvolutionSpec s;
  s.dt = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.dt = 0.1;
  s.t_final = -1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.t_final = 1.0;
  s.record_stride = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.record_stride = 1;
  s.kind = DgDiffusion{-0.1};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.kind = BetaNonlinear{0.1, 0.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.kind = LinearKind{};
  CHECK_NOTHROW(s.validate());
  CHECK(s.steps() == 10);
}

TEST_CASE("zero steps keeps only the initial snapshot") {
  Grid g = make_grid(1, 64, 10.0);
  EvolutionSpec s;
  s.t_final = 0.0;
  auto traj = evolve(gaussian_packet(g, 0.0, 1.0, 0.0), RealField(64, 0.0), s, kUnit);
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(traj.snapshots[0].time == 0.0);
}

TEST_CASE("linear evolution is unitary and conserves energy") {
  Grid g = make_grid(1, 1024, 40.0);
  auto drift_of = [&](const RealField& V, double dt, bool check_norm) {
    EvolutionSpec s;
    s.dt = dt;
    s.t_final = 3.0;
    s.record_stride = static_cast<std::size_t>(std::lround(0.3 / dt));
    auto traj = evolve(gaussian_packet(g, 2.0, 0.8, 1.0), V, s, kUnit);
    CHECK(traj.snapshots.size() == 11);
    CHECK(traj.snapshots.back().time == doctest::Approx(3.0));
    const double e0 = energy(polar_decompose(traj.snapshots[0], 1e-12, kUnit), V, kUnit.alpha_star(), kUnit).total;
    double drift = 0.0;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      const auto& w = traj.snapshots[k];
      if (k > 0) CHECK(w.time > traj.snapshots[k - 1].time);
      if (check_norm) CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
      const double e = energy(polar_decompose(w, 1e-12, kUnit), V, kUnit.alpha_star(), kUnit).total;
      drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
    }
    return drift;
  };
  // Free flow: the kinetic substep is exact, so the Hamiltonian is conserved to round-off.
  CHECK(drift_of(RealField(g.size(), 0.0), 0.01, true) <= 1e-9);
  // In a trap Strang conserves a modified Hamiltonian; the true one oscillates at O(dt^2).
  auto V = harmonic_potential(g, 1.0, 0.5);
  const double coarse = drift_of(V, 0.01, true), fine = drift_of(V, 0.005, false);
  MESSAGE("trapped energy drift " << coarse << " -> " << fine);
  CHECK(coarse / fine >= 3.6);
  CHECK(coarse / fine <= 4.4);
}

TEST_CASE("free packet follows the analytic solution") {
  Grid g = make_grid(1, 1024, 80.0);
  const PhysicalConstants c{0.8, 1.7, 0.8 * 0.8 / 3.4};
  const double s0 = 1.2, k0 = 1.5, x0 = -5.0;
  RealField V(g.size(), 0.0);
  EvolutionSpec spec;
  spec.dt = 0.05;
  spec.t_final = 4.0;
  spec.record_stride = 20;
  auto traj = evolve(gaussian_packet(g, x0, s0, k0), V, spec, c);
  auto x = oracle::coordinates(g.n(), g.length());
  for (const auto& w : traj.snapshots) {
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::max(err, std::abs(w.values[i] - oracle::free_gaussian(x[i], w.time, x0, s0, k0, c.hbar, c.mass)));
    CHECK(err <= 1e-10);
    // Density variance is half the amplitude width squared.
    const double var = oracle::variance(w.density(), x, g.spacing());
    CHECK(std::abs(2 * var / oracle::free_width_squared(s0, w.time, c.hbar, c.mass) - 1.0) <= 1e-6);
    double mean = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mean += w.density()[i] * x[i] * g.spacing();
    CHECK(mean == doctest::Approx(x0 + c.hbar * k0 / c.mass * w.time).epsilon(1e-9));
  }
}

TEST_CASE("Strang splitting is second order") {
  Grid g = make_grid(1, 512, 30.0);
  auto V = harmonic_potential(g, 1.0, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) V[i] += 0.3 * std::cos(g.coordinate(i));
  auto psi0 = gaussian_packet(g, 1.5, 1.0, 0.5);
  const double dt = 0.05;
  auto ref = run(psi0, V, dt / 8, 8 * 20, LinearKind{});
  const double e1 = l2_distance(run(psi0, V, dt, 20, LinearKind{}).values, ref.values, g);
  const double e2 = l2_distance(run(psi0, V, dt / 2, 40, LinearKind{}).values, ref.values, g);
  CHECK(e1 / e2 >= 3.6);
  CHECK(e1 / e2 <= 4.4);
}

TEST_CASE("linear steps are reversible") {
  Grid g = make_grid(1, 512, 30.0);
  auto V = harmonic_potential(g, 1.0, 0.7);
  auto psi0 = gaussian_packet(g, 2.0, 1.0, -0.4);
  auto fwd = run(psi0, V, 0.01, 300, LinearKind{});
  auto back = run(fwd, V, -0.01, 300, LinearKind{});
  CHECK(l2_distance(back.values, psi0.values, g) <= 1e-9);
}

TEST_CASE("ground state returns after one period") {
  Grid g = make_grid(1, 512, 20.0);
  auto V = harmonic_potential(g, 1.0, 1.0);
  auto psi0 = harmonic_eigenstate(g, 0, kUnit, 1.0);
  const std::size_t steps = 2000;
  auto out = run(psi0, V, 2 * std::numbers::pi / steps, steps, LinearKind{});
  Complex overlap = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) overlap += std::conj(psi0.values[i]) * out.values[i] * g.spacing();
  CHECK(std::norm(overlap) >= 1.0 - 1e-8);
}

TEST_CASE("DG and beta kinds reduce to the linear step") {
  Grid g = make_grid(1, 256, 20.0);
  auto V = harmonic_potential(g, 1.0, 1.0);
  auto psi = gaussian_packet(g, 1.0, 1.0, 0.3);
  auto lin = step_linear(psi, V, 0.01, kUnit);
  auto dg0 = step_dg(psi, V, 0.01, 0.0, kUnit);
  auto b0 = step_beta(psi, V, 0.01, 0.0, 1e-6, kUnit);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(dg0.values[i] == lin.values[i]);
    CHECK(b0.values[i] == lin.values[i]);
  }
  auto beta = step_beta(psi, V, 0.01, 0.05, 1e-6, kUnit);
  CHECK(std::abs(beta.norm() - 1.0) <= 1e-13);

  ComplexField flat(g.size(), 1.0 / std::sqrt(20.0));
  WaveField u(g, flat);
  RealField V0(g.size(), 0.0);
  auto lu = step_linear(u, V0, 0.01, kUnit);
  auto du = step_dg(u, V0, 0.01, 0.2, kUnit);
  auto bu = step_beta(u, V0, 0.01, 0.2, 1e-6, kUnit);
  CHECK(l2_distance(lu.values, du.values, g) <= 1e-14);
  CHECK(l2_distance(lu.values, bu.values, g) <= 1e-14);
  for (double v : beta_potential(u.density(), g, 0.3, 1e-6)) CHECK(std::abs(v) <= 1e-20);
}

TEST_CASE("DG density obeys the advection-diffusion equation") {
  Grid g = make_grid(1, 2048, 40.0);
  RealField V(g.size(), 0.0);
  const double D = 0.05;
  auto residual = [&](double delta) {
    auto psi = gaussian_packet(g, 0.0, 1.0, 0.8);
    for (int k = 0; k < 20; ++k) psi = step_dg(psi, V, 0.01, D, kUnit);
    auto mid = step_dg(psi, V, delta, D, kUnit);
    auto next = step_dg(mid, V, delta, D, kUnit);
    auto h = polar_decompose(mid, 1e-6, kUnit);
    auto div = spectral_derivative(h.current[0], g, 0);
    auto lap = spectral_laplacian(h.rho, g);
    auto r0 = psi.density(), r2 = next.density();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!h.mask[i]) continue;
      const double rate = (r2[i] - r0[i]) / (2 * delta);
      const double rhs = -div[i] + D * lap[i];
      num += (rate - rhs) * (rate - rhs);
      den += rhs * rhs;
    }
    return std::sqrt(num / den);
  };
  // The centred time stencil contributes O(delta^2); the spatial part is spectral.
  const double coarse = residual(1e-3), fine = residual(5e-4);
  MESSAGE("DG PDE residual " << coarse << " -> " << fine);
  CHECK(fine <= 1e-6);
  CHECK(coarse / fine >= 3.5);
  CHECK(coarse / fine <= 4.5);
}

TEST_CASE("density diffusion: heat kernel and entropy growth") {
  Grid g = make_grid(1, 512, 40.0);
  auto x = oracle::coordinates(g.n(), g.length());
  const double var0 = 0.5, D = 0.05;
  RealField rho0(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    rho0[i] = std::exp(-x[i] * x[i] / (2 * var0)) / std::sqrt(2 * std::numbers::pi * var0);
  EvolutionSpec spec;
  spec.kind = DensityDiffusion{D};
  spec.dt = 0.01;
  spec.t_final = 2.0;
  auto traj = evolve_density_diffusion(rho0, g, {}, D, spec);
  CHECK(traj.warnings.empty());
  Mask all(g.size(), 1);
  double prev = -1e300;
  for (std::size_t k = 0; k < traj.rho.size(); ++k) {
    const double var = oracle::variance(traj.rho[k], x, g.spacing());
    CHECK(std::abs(var / oracle::heat_variance(var0, D, traj.times[k]) - 1.0) <= 1e-6);
    CHECK(std::abs(oracle::sum_times(traj.rho[k], g.spacing()) - 1.0) <= 1e-10);
    const double S = shannon_entropy(traj.rho[k], g, make_mask(traj.rho[k], 1e-300));
    CHECK(S >= prev);
    prev = S;
  }
  CHECK(prev == doctest::Approx(oracle::gaussian_shannon(oracle::heat_variance(var0, D, 2.0))).epsilon(1e-8));

  EvolutionSpec still = spec;
  still.kind = DensityDiffusion{0.0};
  auto flat = evolve_density_diffusion(rho0, g, {}, 0.0, still);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(flat.rho.back()[i] == rho0[i]);
}

TEST_CASE("density diffusion warns beyond the explicit stability limit") {
  Grid g = make_grid(1, 256, 10.0);
  EvolutionSpec spec;
  spec.kind = DensityDiffusion{1.0};
  spec.dt = 0.01;
  spec.t_final = 0.01;
  auto traj = evolve_density_diffusion(RealField(g.size(), 0.1), g, {}, 1.0, spec);
  CHECK_FALSE(traj.warnings.empty());
}

TEST_CASE("evolve rejects non-finite states") {
  Grid g = make_grid(1, 64, 10.0);
  RealField V(g.size(), std::numeric_limits<double>::infinity());
  EvolutionSpec s;
  s.t_final = 0.02;
  CHECK_THROWS_AS(evolve(gaussian_packet(g, 0.0, 1.0, 0.0), V, s, kUnit), NumericalError);
}
