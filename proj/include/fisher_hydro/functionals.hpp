/// @file functionals.hpp
/// @brief Energy, Shannon entropy, Fisher information, local regularisers and their EL derivatives.
#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "fisher_hydro/propagate.hpp"

namespace fisher_hydro {

struct FisherFamily {
  double C = 1.0;
};
/// f(rho) = C rho^p.
struct PowerFamily {
  double p = 0.0;
  double C = 1.0;
};
struct ConstantFamily {
  double C = 1.0;
};
struct CustomFamily {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  double C = 1.0;
  std::string label = "custom";
};
using RegulariserFamily = std::variant<FisherFamily, PowerFamily, ConstantFamily, CustomFamily>;

/// Local regulariser F[rho] = integral f(rho) |grad rho|^2.
struct RegulariserSpec {
  RegulariserFamily family;

  static RegulariserSpec fisher(double C) { return {FisherFamily{C}}; }
  static RegulariserSpec power(double p, double C) { return {PowerFamily{p, C}}; }
  static RegulariserSpec constant(double C) { return {ConstantFamily{C}}; }
  /// Piecewise-linear f and f' through the given nodes (rho strictly increasing).
  static RegulariserSpec tabulated(std::vector<double> rho, std::vector<double> f, std::vector<double> fprime,
                                   double C, std::string label);

  std::string name() const;
  double coefficient() const;
  double f(double rho) const;
  double fprime(double rho) const;
  bool is_fisher() const { return std::holds_alternative<FisherFamily>(family); }
  void validate() const;
};

struct EnergyReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double curvature = 0.0;
  double total = 0.0;
  double fisher_info = 0.0;
  double shannon = 0.0;
  /// Bound on the off-mask contribution to the Shannon entropy.
  double shannon_error_bar = 0.0;
};

/// Masked quadrature of rho|grad S|^2/2m (as |j|^2 m / 2 rho), V rho and alpha |grad sqrt rho|^2.
EnergyReport energy(const HydroFields& h, const RealField& V, double alpha, const PhysicalConstants& c);

/// Integral of |grad rho|^2 / rho over the mask.
double fisher_information(const RealField& rho, const Grid& g, const Mask& mask);
/// -integral of rho ln rho over the mask.
double shannon_entropy(const RealField& rho, const Grid& g, const Mask& mask);

struct EntropyRate {
  double time = 0.0;
  double measured = 0.0;
  double predicted = 0.0;
};

/// Centred difference of S_Sh at each interior snapshot against D * I_F there.
std::vector<EntropyRate> shannon_entropy_rate(const DensityTrajectory& traj, double D, double eps_mask = 1e-12);

struct EntropyBalance {
  double time = 0.0;
  /// dS_Sh/dt from neighbouring snapshots.
  double measured = 0.0;
  /// integral of rho div v = -integral of j . grad rho / rho.
  double advective = 0.0;
  /// D * I_F.
  double diffusive = 0.0;
  /// |measured - advective - diffusive| / |diffusive|.
  double relative_defect = 0.0;
};

/// Entropy budget at every interior snapshot of a DG trajectory. The rate comes from single
/// forward/backward steps of size diag_dt under the trajectory's own flow.
std::vector<EntropyBalance> entropy_balance(const Trajectory& traj, const RealField& V, const PhysicalConstants& c,
                                            double diag_dt = 1e-4, double eps_mask = 1e-14);

/// -2 f Lap rho - f' |grad rho|^2 on the mask, zero elsewhere (spectral derivatives).
RealField el_derivative(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask);
/// ||el + 4 C Lap sqrt(rho)/sqrt(rho)|| / ||4 C Lap sqrt(rho)/sqrt(rho)|| over the mask.
double fisher_el_defect(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask);
/// Same, with the reference -4C Lap R / R built from a signed smooth root (rho = root^2) instead of sqrt rho.
/// Needed across nodes, where sqrt rho has a kink that pollutes spectral derivatives globally.
double fisher_el_defect(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask,
                        const RealField& root);
/// integral over the mask of f(rho) |grad rho|^2.
double regulariser_value(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask);

/// {rho > eps max rho} minus the window |x - node| < halfwidth for each node (1D).
Mask node_window_mask(const RealField& rho, const Grid& g, double eps, const std::vector<double>& nodes,
                      double halfwidth);

struct DensitySample {
  std::string id;
  Grid grid;
  RealField rho;
  Mask mask;
  /// Optional signed root with root^2 = rho; empty means sqrt rho.
  RealField root;
};

struct ElRow {
  std::string rho_id;
  std::string family;
  double coefficient = 0.0;
  double residual = 0.0;
};

struct ElReport {
  std::vector<ElRow> rows;
  double fisher_max = 0.0;
  double non_fisher_min = 0.0;
  /// fisher rows <= fisher_tol and other rows >= other_tol.
  bool pass = false;
};

ElReport fisher_el_necessity_report(const std::vector<DensitySample>& library, const std::vector<RegulariserSpec>& specs,
                                    double fisher_tol = 1e-9, double other_tol = 1e-3);

}  // namespace fisher_hydro
