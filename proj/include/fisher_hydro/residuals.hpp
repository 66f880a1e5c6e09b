/// @file residuals.hpp
/// @brief Continuity and Hamilton-Jacobi residuals, coefficient scans, momentum balance.
///
/// Diagnostics are evaluated in the zero-momentum frame of the snapshot and averaged
/// with weight taper(rho) * rho over the mask, which makes every residual invariant
/// under Galilean boosts of the input data.
#pragma once

#include <vector>

#include "fisher_hydro/propagate.hpp"

namespace fisher_hydro {

enum class PhaseRateEstimator {
  /// Centred difference of the unwrapped phase from the +-dt neighbours, co-moving with the packet.
  kComovingDifference,
  /// S_t = -Re(H psi / psi) at the central snapshot.
  kSpectral,
};

struct ResidualOptions {
  double eps_mask = 1e-6;
  PhaseRateEstimator estimator = PhaseRateEstimator::kComovingDifference;
  /// Window-5 quadratic local smoothing of S_t.
  bool smooth_phase_rate = false;
};

/// Three time-adjacent wavefields (t - dt, t, t + dt).
struct SnapshotTriple {
  WaveField previous;
  WaveField current;
  WaveField next;
  double dt;
};

/// Builds the neighbours by single forward/backward steps of the given kind.
SnapshotTriple make_triple(const WaveField& psi, const RealField& V, double dt, const EvolutionKind& kind,
                           const PhysicalConstants& c);

/// Frame-reduced 1D fields entering the residual quotients. All fields are zero off the mask.
struct DiagnosticFields {
  Grid grid;
  Mask mask;
  RealField weight;
  RealField rho;
  RealField rho_t;
  /// div(rho grad S / m) in the zero-momentum frame.
  RealField flux_divergence;
  RealField S_t;
  /// |grad S|^2 / 2m in the zero-momentum frame.
  RealField kinetic;
  RealField potential;
  /// Lap(sqrt rho) / sqrt(rho); the quantum potential is -alpha times this.
  RealField curvature;
  double frame_velocity = 0.0;
  double time = 0.0;
  double dt = 0.0;
  double mask_fraction = 0.0;
  /// Round-off floor added to the continuity denominator.
  double continuity_floor = 0.0;
};

DiagnosticFields compute_diagnostics(const SnapshotTriple& triple, const RealField& V, const PhysicalConstants& c,
                                     const ResidualOptions& opt);
/// Single-snapshot variant; uses the spectral S_t and leaves rho_t undefined (zero).
DiagnosticFields compute_diagnostics(const WaveField& psi, const RealField& V, const PhysicalConstants& c,
                                     const ResidualOptions& opt);

/// Weighted mean over the mask.
double weighted_mean(const RealField& f, const DiagnosticFields& d);
/// f minus its weighted mean on the mask, zero elsewhere.
RealField mean_subtracted(const RealField& f, const DiagnosticFields& d);

double continuity_residual(const DiagnosticFields& d);
/// Norm ratio in [0, 1]; zero when every term is constant on the mask.
double hj_residual(const DiagnosticFields& d, double alpha);

double continuity_residual(const SnapshotTriple& triple, const PhysicalConstants& c, double eps_mask);
double hj_residual(const WaveField& psi, const RealField& V, double alpha, const PhysicalConstants& c,
                   const ResidualOptions& opt = {});

struct ResidualSample {
  double time = 0.0;
  double r_cont = 0.0;
  double r_hj = 0.0;
  double alpha_used = 0.0;
  double mask_fraction = 0.0;
};

struct ScanResult {
  /// alpha / alpha_star, strictly increasing.
  std::vector<double> alphas;
  /// Time-mean R_HJ per alpha.
  std::vector<double> residuals;
  /// Time-mean R_cont per alpha (alpha-independent by construction).
  std::vector<double> continuity;
  double argmin = 0.0;
  double min_value = 0.0;
  /// argmin on the grid boundary.
  bool inconclusive = false;
  /// Per-snapshot samples at the argmin.
  std::vector<ResidualSample> samples;
};

/// Evenly spaced ratios lo..hi inclusive.
std::vector<double> ratio_grid(double lo, double hi, std::size_t count);

/// Averages over interior snapshots (endpoints excluded); needs at least three snapshots.
ScanResult alpha_scan(const Trajectory& traj, const RealField& V, const std::vector<double>& ratios,
                      const PhysicalConstants& c, const ResidualOptions& opt = {});

/// Picks argmin/min/inconclusive from a curve.
void locate_minimum(ScanResult& r);

/// || V + Q_coeff - E ||_{L2(rho)} over the mask for a stationary state, Q via fourth-order stencils.
double eigenstate_defect(const RealField& rho, const RealField& V, double energy, double coeff, const Grid& g,
                         const Mask& mask);

struct MultiMassResult {
  std::vector<double> masses;
  std::vector<ScanResult> per_mass;
  double common_argmin = 0.0;
  bool common = false;
  bool inconclusive = false;
};

/// Harmonic ground states of frequency omega per mass; component i uses alpha_i = c * bias_i * hbar^2 / 2 m_i.
MultiMassResult multi_mass_scan(const std::vector<double>& c_grid, const std::vector<double>& masses, double hbar,
                                double omega, const Grid& g, const std::vector<double>& bias = {},
                                double eps_mask = 1e-6);

/// || d_t(rho v) + d_x Pi + (rho/m) d_x V - (rho/m)(alpha - alpha_star) d_x(Lap R / R) || normalised by the
/// sum of the term norms, with Pi = rho v^2 - (hbar^2 / 2m^2)(R R'' - R'^2), R = sqrt(rho). 1D.
double momentum_balance_residual(const SnapshotTriple& triple, const RealField& V, double alpha,
                                 const PhysicalConstants& c, double eps_mask = 1e-6);

}  // namespace fisher_hydro
