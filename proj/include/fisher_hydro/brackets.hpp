/// @file brackets.hpp
/// @brief Functional Poisson brackets on (rho, S) and Galilei/Bargmann closure checks.
#pragma once

#include <string>
#include <vector>

#include "fisher_hydro/fields.hpp"

namespace fisher_hydro {

struct FunctionalDerivs {
  Grid grid;
  RealField d_rho;
  RealField d_S;
  std::string label;
};

/// integral of (f.d_rho g.d_S - f.d_S g.d_rho). Throws std::invalid_argument on grid mismatch.
double poisson_bracket(const FunctionalDerivs& f, const FunctionalDerivs& g);

/// Everything the generators need: rho, grad S, positions relative to an origin, V, alpha, t.
struct GeneratorInputs {
  Grid grid;
  RealField rho;
  /// grad S per axis (m v on the mask).
  VectorField grad_S;
  Mask mask;
  RealField V;
  double alpha = 0.0;
  PhysicalConstants constants;
  double t = 0.0;
  /// Coordinates relative to origin, wrapped into [-L/2, L/2) per axis.
  VectorField x;
  std::vector<double> origin;
};

/// Circular (periodic) centroid of rho per axis.
std::vector<double> circular_centroid(const RealField& rho, const Grid& g);

/// From Madelung fields; grad S = m j / rho. Empty origin = circular centroid.
/// Throws ConfigError if more than 1e-12 of the mass sits within 5 cells of the wrap seam.
GeneratorInputs generator_inputs(const HydroFields& h, const RealField& V, double alpha, const PhysicalConstants& c,
                                 double t, std::vector<double> origin = {});
/// From raw (rho, S) with spectral grad S (S must be periodic).
GeneratorInputs generator_inputs(const RealField& rho, const RealField& S, const Grid& g, const RealField& V,
                                 double alpha, const PhysicalConstants& c, double t, std::vector<double> origin = {},
                                 double eps_mask = 1e-30);

enum class Generator { kH, kPx, kPy, kKx, kKy, kLz };
std::string generator_name(Generator gen);

FunctionalDerivs generator_derivs(Generator gen, const GeneratorInputs& in);
double generator_value(Generator gen, const GeneratorInputs& in);

struct AlgebraEntry {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct AlgebraReport {
  double t = 0.0;
  std::vector<AlgebraEntry> entries;
  /// Antisymmetry defect max |{f,g}+{g,f}| over the computed pairs.
  double antisymmetry = 0.0;
  bool pass = false;

  const AlgebraEntry& entry(const std::string& name) const;
};

/// {H,P} - integral rho dV, {H,K} + P, {P,K} + m integral rho for each axis.
AlgebraReport bargmann_check(const GeneratorInputs& in);

struct AngularReport {
  double h_lz = 0.0;
  double lz = 0.0;
  double px_lz_plus_py = 0.0;
  double py_lz_minus_px = 0.0;
  bool central = true;
  double tolerance = 1e-9;
  bool pass = false;
};

/// 2D: {H, L_z} for central V, L_z itself and its brackets with P.
AngularReport angular_momentum_check(const GeneratorInputs& in, double tolerance = 1e-9);

}  // namespace fisher_hydro
