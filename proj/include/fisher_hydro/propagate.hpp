/// @file propagate.hpp
/// @brief Split-step propagators (linear, Doebner-Goldin, beta-nonlinear) and density diffusion.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fisher_hydro/fields.hpp"

namespace fisher_hydro {

struct LinearKind {};
/// Diffusive factor exp((D/2) integral of Lap rho / rho dt). Over a substep this factor equals
/// sqrt(rho_new / rho_old) with rho_new the heat-kernel evolution of rho and the phase frozen.
/// Both densities are offset by mask_eps * max rho, so the factor relaxes smoothly to 1 in the tails;
/// a hard cutoff seeds high modes that the kinetic step carries into the core.
struct DgDiffusion {
  double D = 0.0;
  double mask_eps = 1e-10;
};
/// Extra potential beta |grad rho|^2 / (rho + eps)^2 with eps = eps_reg * max rho.
struct BetaNonlinear {
  double beta = 0.0;
  double eps_reg = 1e-6;
};
struct DensityDiffusion {
  double D = 0.0;
};
using EvolutionKind = std::variant<LinearKind, DgDiffusion, BetaNonlinear, DensityDiffusion>;

struct EvolutionSpec {
  EvolutionKind kind = LinearKind{};
  double dt = 0.01;
  double t_final = 0.0;
  /// Steps between recorded snapshots.
  std::size_t record_stride = 1;

  /// Throws ConfigError on dt <= 0, t_final < 0, negative D/beta, eps_reg <= 0, stride 0.
  void validate() const;
  std::size_t steps() const;
};

struct Trajectory {
  std::vector<WaveField> snapshots;
  EvolutionSpec spec;
  std::string potential_id;
};

struct DensityTrajectory {
  Grid grid;
  std::vector<double> times;
  std::vector<RealField> rho;
  EvolutionSpec spec;
  std::vector<std::string> warnings;
};

/// Strang stepper with cached phase factors; dt may be negative.
class SplitStepper {
 public:
  SplitStepper(const Grid& g, const RealField& V, double dt, const EvolutionKind& kind, const PhysicalConstants& c);
  void step(ComplexField& psi) const;
  double dt() const { return dt_; }

 private:
  void linear(ComplexField& psi) const;
  void dg_factor(ComplexField& psi, double tau) const;
  void beta_kick(ComplexField& psi) const;

  Grid grid_;
  RealField V_;
  double dt_;
  EvolutionKind kind_;
  PhysicalConstants c_;
  ComplexField half_potential_;
  ComplexField kinetic_;
};

WaveField step_linear(const WaveField& psi, const RealField& V, double dt, const PhysicalConstants& c);
WaveField step_dg(const WaveField& psi, const RealField& V, double dt, double D, const PhysicalConstants& c,
                  double mask_eps = 1e-10);
WaveField step_beta(const WaveField& psi, const RealField& V, double dt, double beta, double eps_reg,
                    const PhysicalConstants& c);
/// One step of the given kind (DensityDiffusion is rejected).
WaveField step_kind(const WaveField& psi, const RealField& V, double dt, const EvolutionKind& kind,
                    const PhysicalConstants& c);

/// U_beta for a density field (fourth-order gradient).
RealField beta_potential(const RealField& rho, const Grid& g, double beta, double eps_reg);

/// Records t = 0, every record_stride steps, and the final step. Throws NumericalError on non-finite values.
Trajectory evolve(const WaveField& psi0, const RealField& V, const EvolutionSpec& spec, const PhysicalConstants& c,
                  std::string potential_id = "");

/// RK4 for rho_t = -div(rho v) + D Lap rho with a fixed velocity field (empty = zero).
DensityTrajectory evolve_density_diffusion(const RealField& rho0, const Grid& g, const VectorField& velocity, double D,
                                           const EvolutionSpec& spec);

}  // namespace fisher_hydro
