/// @file fields.hpp
/// @brief Wavefunctions, Madelung polar map, hydrodynamic fields, node masks.
#pragma once

#include "fisher_hydro/grid.hpp"

namespace fisher_hydro {

/// hbar, mass and the curvature coefficient alpha. alpha_star() is always derived.
struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;
  double alpha = 0.5;

  double alpha_star() const { return hbar * hbar / (2.0 * mass); }
  /// Constants with alpha set to alpha_star.
  static PhysicalConstants schrodinger(double hbar, double mass);
  /// Throws ConfigError unless hbar > 0, mass > 0, alpha finite.
  void validate() const;
};

struct WaveField {
  WaveField(Grid grid, ComplexField values, double time = 0.0);

  Grid grid;
  ComplexField values;
  double time = 0.0;

  double norm() const { return norm_squared(values, grid); }
  RealField density() const;
};

/// Rescales psi so that the integral of |psi|^2 is one.
void normalize(WaveField& psi);

struct HydroFields {
  Grid grid;
  RealField rho;
  /// Unwrapped phase action, defined up to a global constant.
  RealField S;
  /// v = j / rho on the mask, zero elsewhere.
  VectorField velocity;
  /// j = (hbar/m) Im(conj(psi) grad psi).
  VectorField current;
  Mask mask;
  double eps_mask = 0.0;
  /// Largest masked |j/rho - grad S/m| over interior mask sites.
  double velocity_discrepancy = 0.0;
  /// 2D only: x-first and y-first unwraps agree on the mask (false around vortices).
  bool phase_consistent = true;
};

/// {rho > eps * max rho}.
Mask make_mask(const RealField& rho, double eps);
double mask_fraction(const Mask& mask);

/// psi = sqrt(rho) exp(i S / hbar). Throws ConfigError on rho < -1e-14.
WaveField polar_compose(const RealField& rho, const RealField& S, const Grid& g, double hbar, double time = 0.0);
HydroFields polar_decompose(const WaveField& psi, double eps_mask, const PhysicalConstants& c);

/// Cumulative 2 pi unwrap of wrapped phases along a line, anchored at index start.
std::vector<double> unwrap_line(const std::vector<double>& wrapped, std::size_t start);

/// -coeff * Lap(sqrt rho) / sqrt(rho) on the mask, zero off it.
RealField quantum_potential(const RealField& rho, double coeff, const Grid& g, const Mask& mask,
                            DerivativeScheme scheme = DerivativeScheme::kSpectral);

/// (-hbar^2/2m Lap + V) psi, spectral.
ComplexField apply_hamiltonian(const ComplexField& psi, const RealField& V, const Grid& g, const PhysicalConstants& c);

/// S_t = -Re(H psi / psi) on the mask, zero off it.
RealField phase_time_derivative(const WaveField& psi, const RealField& V, const PhysicalConstants& c, const Mask& mask);

}  // namespace fisher_hydro
