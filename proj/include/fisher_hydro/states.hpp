/// @file states.hpp
/// @brief Closed-form initial states and potentials used by the suites.
#pragma once

#include "fisher_hydro/fields.hpp"

namespace fisher_hydro {

/// (pi sigma^2)^(-1/4) exp(-(x-x0)^2 / 2 sigma^2 + i k0 (x - phase_origin)), normalised on the grid.
WaveField gaussian_packet(const Grid& g, double x0, double sigma, double k0, double phase_origin = 0.0);

/// n-th Hermite function for V = m w^2 (x-x0)^2 / 2, normalised on the grid.
WaveField harmonic_eigenstate(const Grid& g, int n, const PhysicalConstants& c, double omega, double x0 = 0.0);
double harmonic_energy(int n, const PhysicalConstants& c, double omega);

/// m w^2 |x - center|^2 / 2 (center along x only).
RealField harmonic_potential(const Grid& g, double mass, double omega, double center = 0.0);

/// 2D: (x + i y)^n exp(-r^2 / 2 sigma^2) about (cx, cy); n < 0 conjugates. Normalised.
WaveField vortex_state(const Grid& g, int winding, double sigma, double cx = 0.0, double cy = 0.0);

/// 1D Galilean boost of a snapshot at time t:
/// psi'(x) = exp(i (m v x - m v^2 t / 2) / hbar) psi(x - v t).
WaveField galilean_boost(const WaveField& psi, double velocity, const PhysicalConstants& c);

}  // namespace fisher_hydro
