#include "fisher_hydro/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fisher_hydro/errors.hpp"

namespace fisher_hydro {
namespace {

double wrap(double d, double L) {
  d -= L * std::floor((d + 0.5 * L) / L);
  return d;
}

void fill_positions(GeneratorInputs& in, std::vector<double> origin) {
  const Grid& g = in.grid;
  if (origin.empty()) origin = circular_centroid(in.rho, g);
  if (static_cast<int>(origin.size()) != g.dim()) throw ConfigError("origin must have one entry per axis");
  in.origin = origin;
  in.x.assign(g.dim(), RealField(g.size()));
  const double L = g.length(), h = g.spacing();
  double total = 0.0, near_seam = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool seam = false;
    for (int a = 0; a < g.dim(); ++a) {
      double r = wrap(g.x_of(i, a) - origin[a], L);
      in.x[a][i] = r;
      if (r < -0.5 * L + 5.0 * h || r > 0.5 * L - 5.0 * h) seam = true;
    }
    total += in.rho[i];
    if (seam) near_seam += in.rho[i];
  }
  if (near_seam > 1e-12 * total) {
    throw ConfigError("packet mass reaches the box edge; moment integrals would pick up periodic images");
  }
}

RealField masked_quantum_curvature(const GeneratorInputs& in) {
  return quantum_potential(in.rho, in.alpha, in.grid, in.mask);  // -alpha Lap R / R
}

double sq(const VectorField& v, std::size_t i) {
  double s = 0.0;
  for (const auto& c : v) s += c[i] * c[i];
  return s;
}

int axis_of(Generator gen) {
  switch (gen) {
    case Generator::kPy:
    case Generator::kKy:
      return 1;
    default:
      return 0;
  }
}

}  // namespace

double poisson_bracket(const FunctionalDerivs& f, const FunctionalDerivs& g) {
  if (f.grid != g.grid) throw std::invalid_argument("poisson_bracket: grid mismatch");
  const std::size_t n = f.grid.size();
  if (f.d_rho.size() != n || f.d_S.size() != n || g.d_rho.size() != n || g.d_S.size() != n)
    throw std::invalid_argument("poisson_bracket: field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f.d_rho[i] * g.d_S[i] - f.d_S[i] * g.d_rho[i];
  return s * f.grid.cell_volume();
}

std::vector<double> circular_centroid(const RealField& rho, const Grid& g) {
  std::vector<double> out;
  const double L = g.length();
  for (int a = 0; a < g.dim(); ++a) {
    Complex z(0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) z += rho[i] * std::polar(1.0, 2.0 * std::numbers::pi * g.x_of(i, a) / L);
    out.push_back(L * std::arg(z) / (2.0 * std::numbers::pi));
  }
  return out;
}

GeneratorInputs generator_inputs(const HydroFields& h, const RealField& V, double alpha, const PhysicalConstants& c,
                                 double t, std::vector<double> origin) {
  if (V.size() != h.grid.size()) throw std::invalid_argument("generator_inputs: potential size mismatch");
  GeneratorInputs in{h.grid, h.rho, {}, h.mask, V, alpha, c, t, {}, {}};
  for (int a = 0; a < h.grid.dim(); ++a) {
    RealField gs(h.grid.size(), 0.0);
    for (std::size_t i = 0; i < gs.size(); ++i)
      if (h.mask[i]) gs[i] = c.mass * h.current[a][i] / h.rho[i];
    in.grad_S.push_back(std::move(gs));
  }
  fill_positions(in, std::move(origin));
  return in;
}

GeneratorInputs generator_inputs(const RealField& rho, const RealField& S, const Grid& g, const RealField& V,
                                 double alpha, const PhysicalConstants& c, double t, std::vector<double> origin,
                                 double eps_mask) {
  if (rho.size() != g.size() || S.size() != g.size() || V.size() != g.size())
    throw std::invalid_argument("generator_inputs: shape mismatch");
  GeneratorInputs in{g, rho, spectral_gradient(S, g), make_mask(rho, eps_mask), V, alpha, c, t, {}, {}};
  fill_positions(in, std::move(origin));
  return in;
}

std::string generator_name(Generator gen) {
  switch (gen) {
    case Generator::kH: return "H";
    case Generator::kPx: return "P_x";
    case Generator::kPy: return "P_y";
    case Generator::kKx: return "K_x";
    case Generator::kKy: return "K_y";
    case Generator::kLz: return "L_z";
  }
  return "?";
}

FunctionalDerivs generator_derivs(Generator gen, const GeneratorInputs& in) {
  const Grid& g = in.grid;
  const std::size_t n = g.size();
  const double m = in.constants.mass;
  FunctionalDerivs d{g, RealField(n, 0.0), RealField(n, 0.0), generator_name(gen)};
  const int a = axis_of(gen);
  if (a >= g.dim() || (gen == Generator::kLz && g.dim() != 2))
    throw std::invalid_argument("generator " + d.label + " needs a higher-dimensional grid");

  switch (gen) {
    case Generator::kH: {
      RealField q = masked_quantum_curvature(in);
      VectorField flux(g.dim(), RealField(n));
      for (int b = 0; b < g.dim(); ++b)
        for (std::size_t i = 0; i < n; ++i) flux[b][i] = in.rho[i] * in.grad_S[b][i] / m;
      RealField div = spectral_divergence(flux, g);
      for (std::size_t i = 0; i < n; ++i) {
        d.d_rho[i] = sq(in.grad_S, i) / (2.0 * m) + in.V[i] + q[i];
        d.d_S[i] = -div[i];
      }
      break;
    }
    case Generator::kPx:
    case Generator::kPy: {
      RealField dr = spectral_derivative(in.rho, g, a);
      for (std::size_t i = 0; i < n; ++i) {
        d.d_rho[i] = in.grad_S[a][i];
        d.d_S[i] = -dr[i];
      }
      break;
    }
    case Generator::kKx:
    case Generator::kKy: {
      RealField dr = spectral_derivative(in.rho, g, a);
      for (std::size_t i = 0; i < n; ++i) {
        d.d_rho[i] = m * in.x[a][i] - in.t * in.grad_S[a][i];
        d.d_S[i] = in.t * dr[i];
      }
      break;
    }
    case Generator::kLz: {
      VectorField gr = spectral_gradient(in.rho, g);
      const RealField &x = in.x[0], &y = in.x[1];
      for (std::size_t i = 0; i < n; ++i) {
        d.d_rho[i] = x[i] * in.grad_S[1][i] - y[i] * in.grad_S[0][i];
        d.d_S[i] = -(x[i] * gr[1][i] - y[i] * gr[0][i]);
      }
      break;
    }
  }
  return d;
}

double generator_value(Generator gen, const GeneratorInputs& in) {
  const Grid& g = in.grid;
  const std::size_t n = g.size();
  const double m = in.constants.mass;
  const int a = axis_of(gen);
  RealField dens(n, 0.0);
  switch (gen) {
    case Generator::kH: {
      RealField R(n);
      for (std::size_t i = 0; i < n; ++i) R[i] = std::sqrt(std::max(in.rho[i], 0.0));
      VectorField gR = spectral_gradient(R, g);
      for (std::size_t i = 0; i < n; ++i)
        dens[i] = in.rho[i] * sq(in.grad_S, i) / (2.0 * m) + in.V[i] * in.rho[i] + in.alpha * sq(gR, i);
      break;
    }
    case Generator::kPx:
    case Generator::kPy:
      for (std::size_t i = 0; i < n; ++i) dens[i] = in.rho[i] * in.grad_S[a][i];
      break;
    case Generator::kKx:
    case Generator::kKy:
      for (std::size_t i = 0; i < n; ++i) dens[i] = in.rho[i] * (m * in.x[a][i] - in.t * in.grad_S[a][i]);
      break;
    case Generator::kLz:
      if (g.dim() != 2) throw std::invalid_argument("L_z needs a 2D grid");
      for (std::size_t i = 0; i < n; ++i)
        dens[i] = in.rho[i] * (in.x[0][i] * in.grad_S[1][i] - in.x[1][i] * in.grad_S[0][i]);
      break;
  }
  return integrate(dens, g);
}

const AlgebraEntry& AlgebraReport::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("no algebra entry " + name);
}

AlgebraReport bargmann_check(const GeneratorInputs& in) {
  const Grid& g = in.grid;
  AlgebraReport rep;
  rep.t = in.t;
  const double m = in.constants.mass;
  const double mass_total = integrate(in.rho, g);
  FunctionalDerivs H = generator_derivs(Generator::kH, in);
  bool all = true;
  for (int a = 0; a < g.dim(); ++a) {
    Generator pg = a == 0 ? Generator::kPx : Generator::kPy;
    Generator kg = a == 0 ? Generator::kKx : Generator::kKy;
    std::string ax = a == 0 ? "x" : "y";
    FunctionalDerivs P = generator_derivs(pg, in);
    FunctionalDerivs K = generator_derivs(kg, in);
    double p_val = generator_value(pg, in);

    // Fourth-order stencil keeps dV exact for polynomial traps of degree <= 4.
    RealField dV = fd_derivative4(in.V, g, a);
    RealField force(g.size());
    bool flat = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      force[i] = in.rho[i] * dV[i];
      flat = flat && in.V[i] == in.V[0];
    }
    double expected_hp = flat ? 0.0 : integrate(force, g);

    double hp = poisson_bracket(H, P);
    double hk = poisson_bracket(H, K);
    double pk = poisson_bracket(P, K);
    rep.antisymmetry = std::max({rep.antisymmetry, std::abs(hp + poisson_bracket(P, H)),
                                 std::abs(hk + poisson_bracket(K, H)), std::abs(pk + poisson_bracket(K, P))});

    AlgebraEntry e1{"{H,P_" + ax + "}", hp, expected_hp, std::abs(hp - expected_hp), flat ? 1e-10 : 1e-8, false,
                    flat ? "translation-invariant V" : "non-closure expected: equals integral rho dV"};
    AlgebraEntry e2{"{H,K_" + ax + "}+P_" + ax, hk + p_val, 0.0, std::abs(hk + p_val),
                    1e-8 * std::max(std::abs(p_val), 1e-300), false, ""};
    if (std::abs(p_val) < 1e-12) {
      e2.tolerance = 1e-10;
      e2.note = "P ~ 0: absolute tolerance";
    }
    AlgebraEntry e3{"{P_" + ax + ",K_" + ax + "}+m*int(rho)", pk + m * mass_total, 0.0, std::abs(pk + m * mass_total),
                    1e-10 * std::max(1.0, mass_total), false, ""};
    if (!flat) e2.note = "V not translation-invariant: {H,K} + P = t integral rho dV";
    if (!flat) {
      e2.expected = in.t * expected_hp;
      e2.deviation = std::abs(e2.value - e2.expected);
    }
    for (AlgebraEntry* e : {&e1, &e2, &e3}) {
      e->pass = e->deviation <= e->tolerance;
      all = all && e->pass;
      rep.entries.push_back(*e);
    }
  }
  rep.pass = all && rep.antisymmetry <= 1e-15 * std::max(1.0, mass_total);
  return rep;
}

AngularReport angular_momentum_check(const GeneratorInputs& in, double tolerance) {
  const Grid& g = in.grid;
  if (g.dim() != 2) throw std::invalid_argument("angular_momentum_check needs a 2D grid");
  AngularReport rep;
  rep.tolerance = tolerance;
  // Quarter-turn (x, y) -> (-y, x) maps the grid onto itself exactly.
  const std::size_t n = g.n();
  double vscale = 0.0;
  for (double v : in.V) vscale = std::max(vscale, std::abs(v));
  for (std::size_t i = 0; i < g.size() && rep.central; ++i) {
    std::size_t ix = g.ix(i), iy = g.iy(i);
    std::size_t j = g.index((n - iy) % n, ix);
    if (std::abs(in.V[i] - in.V[j]) > 1e-12 * std::max(vscale, 1.0)) rep.central = false;
  }
  FunctionalDerivs H = generator_derivs(Generator::kH, in);
  FunctionalDerivs L = generator_derivs(Generator::kLz, in);
  FunctionalDerivs Px = generator_derivs(Generator::kPx, in);
  FunctionalDerivs Py = generator_derivs(Generator::kPy, in);
  rep.h_lz = poisson_bracket(H, L);
  rep.lz = generator_value(Generator::kLz, in);
  rep.px_lz_plus_py = poisson_bracket(Px, L) + generator_value(Generator::kPy, in);
  rep.py_lz_minus_px = poisson_bracket(Py, L) - generator_value(Generator::kPx, in);
  rep.pass = rep.central && std::abs(rep.h_lz) <= tolerance;
  return rep;
}

}  // namespace fisher_hydro
