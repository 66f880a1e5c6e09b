/// @file stresstests.hpp
/// @brief Projective superposition, complexifier scan, time-reversal involution, circulation.
#pragma once

#include <string>
#include <vector>

#include "fisher_hydro/propagate.hpp"

namespace fisher_hydro {

/// Two displaced Gaussians in a harmonic trap, evolved under the beta-nonlinear flow.
struct SuperpositionConfig {
  double x1 = -3.0, x2 = 3.0;
  double p1 = 0.0, p2 = 0.0;
  double sigma = 1.0;
  std::vector<double> betas{0.0, 0.005, 0.01, 0.02, 0.05};
  double eps_reg = 1e-6;
  double omega = 1.0;
  double t_final = 1.5707963267948966;
  double length = 40.0;
  std::size_t n_base = 4096;
  double dt_base = 0.005;
  PhysicalConstants constants{};

  /// Throws ConfigError unless |x1 - x2| >= 6 sigma and the usual positivity holds.
  void validate() const;
};

struct SuperpositionResult {
  double residual = 0.0;
  /// Closed-form optimal global phase.
  double theta = 0.0;
  std::size_t n = 0;
  double dt = 0.0;
};

/// min over theta of || u - e^{i theta} w || for normalised u, w; theta = arg <w, u>.
SuperpositionResult projective_residual(const ComplexField& joint, const ComplexField& summed, const Grid& g);
/// Residual at an explicit phase (for optimality checks).
double projective_residual_at(const ComplexField& joint, const ComplexField& summed, const Grid& g, double theta);

/// Evolves psi1, psi2 and (psi1 + psi2)/sqrt 2 under the same flow; no disjointness check.
SuperpositionResult superposition_residual(const WaveField& psi1, const WaveField& psi2, const RealField& V,
                                           const EvolutionKind& kind, double dt, double t_final,
                                           const PhysicalConstants& c);
/// Config driver on the base grid (refined=false) or (2N, dt/2).
SuperpositionResult superposition_residual(const SuperpositionConfig& cfg, double beta, bool refined = false);

struct SuperpositionRow {
  double beta = 0.0;
  double base = 0.0;
  double refined = 0.0;
};

struct SuperpositionCurve {
  std::vector<SuperpositionRow> rows;
  /// Non-decreasing in beta (tolerance 1e-12) on both grids.
  bool monotone = true;
  /// refined >= 0.9 base for every beta > 0.
  bool refinement_stable = true;
};

/// All (beta, grid) cells; independent cells run concurrently up to `workers`.
SuperpositionCurve superposition_curve(const SuperpositionConfig& cfg, unsigned workers = 0);

/// Single-step Schrodinger test data at time t: (t - dt, t, t + dt).
struct ComplexifierState {
  std::string label;
  WaveField previous, current, next;
  double dt;
  RealField V;
};

ComplexifierState complexifier_state(std::string label, const WaveField& psi, const RealField& V, double dt,
                                     const PhysicalConstants& c);

struct ComplexifierResult {
  std::vector<double> p_grid;
  /// Phase slopes s (units 1/hbar).
  std::vector<double> s_grid;
  /// defect[ip][is], mean over test states.
  std::vector<std::vector<double>> defect;
  double best_p = 0.0, best_s = 0.0, min_defect = 0.0;
  /// kappa^2 / 2m at the minimum.
  double alpha_recovered = 0.0;
  bool unique_min = false;
  /// False when every test state is featureless (no density or phase gradients).
  bool informative = true;
};

/// Normalised masked defect of i kappa phi_t - (-kappa^2/2m Lap + V) phi for phi = rho^p e^{i s S}, kappa = 1/s.
double complexifier_defect(const ComplexifierState& st, double p, double s, const PhysicalConstants& c,
                           double eps_mask = 1e-6);
ComplexifierResult complexifier_scan(const std::vector<double>& p_grid, const std::vector<double>& s_grid,
                                     const std::vector<ComplexifierState>& states, const PhysicalConstants& c,
                                     double eps_mask = 1e-6);

struct TimeReversalResult {
  double defect = 0.0;
  /// Same protocol at D = 0 on the same grid.
  double defect_reversible = 0.0;
  /// defect / defect_reversible (defect_reversible floored at 1e-300).
  double floor_ratio = 0.0;
  std::size_t steps = 0;
};

/// || K U(T) K U(T) psi0 - psi0 || with U the DG flow at diffusion D.
double involution_defect(const WaveField& psi0, const RealField& V, double t_final, double dt, double D,
                         const PhysicalConstants& c);
TimeReversalResult time_reversal_defect(const WaveField& psi0, const RealField& V, double t_final, double dt, double D,
                                        const PhysicalConstants& c);

struct CirculationResult {
  double line_value = 0.0;
  double area_value = 0.0;
  double n_estimate = 0.0;
  std::size_t half_side_cells = 0;
};

/// Square lattice loop of half-side loop_radius around center; sums arg(psi_{k+1}/psi_k) hbar on the loop
/// and the plaquette circulations inside it.
CirculationResult circulation(const WaveField& psi, double loop_radius, double cx, double cy,
                              const PhysicalConstants& c, double eps_mask = 1e-6);

}  // namespace fisher_hydro
