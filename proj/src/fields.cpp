#include "fisher_hydro/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fisher_hydro/errors.hpp"

namespace fisher_hydro {

PhysicalConstants PhysicalConstants::schrodinger(double hbar, double mass) {
  PhysicalConstants c{hbar, mass, 0.0};
  c.alpha = c.alpha_star();
  return c;
}

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
}

WaveField::WaveField(Grid g, ComplexField v, double t) : grid(std::move(g)), values(std::move(v)), time(t) {
  if (values.size() != grid.size()) throw std::invalid_argument("WaveField: size does not match grid");
  for (const auto& z : values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalError("WaveField: non-finite amplitude");
  }
}

RealField WaveField::density() const {
  RealField rho(values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(values[i]);
  return rho;
}

void normalize(WaveField& psi) {
  double n = psi.norm();
  if (!(n > 0.0)) throw NumericalError("cannot normalise a zero field");
  double s = 1.0 / std::sqrt(n);
  for (auto& z : psi.values) z *= s;
}

Mask make_mask(const RealField& rho, double eps) {
  double mx = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
  Mask m(rho.size());
  double thr = eps * mx;
  for (std::size_t i = 0; i < rho.size(); ++i) m[i] = rho[i] > thr ? 1 : 0;
  return m;
}

double mask_fraction(const Mask& mask) {
  if (mask.empty()) return 0.0;
  std::size_t k = 0;
  for (auto b : mask) k += b;
  return static_cast<double>(k) / static_cast<double>(mask.size());
}

WaveField polar_compose(const RealField& rho, const RealField& S, const Grid& g, double hbar, double time) {
  if (rho.size() != g.size() || S.size() != g.size()) throw std::invalid_argument("polar_compose: shape mismatch");
  ComplexField psi(g.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (rho[i] < -1e-14) throw ConfigError("polar_compose: negative density");
    psi[i] = std::polar(std::sqrt(std::max(rho[i], 0.0)), S[i] / hbar);
  }
  return WaveField(g, std::move(psi), time);
}

std::vector<double> unwrap_line(const std::vector<double>& wrapped, std::size_t start) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(wrapped.size());
  if (wrapped.empty()) return out;
  out[start] = wrapped[start];
  auto step = [&](std::size_t from, std::size_t to) {
    double d = wrapped[to] - wrapped[from];
    d -= two_pi * std::round(d / two_pi);
    out[to] = out[from] + d;
  };
  for (std::size_t i = start + 1; i < wrapped.size(); ++i) step(i - 1, i);
  for (std::size_t i = start; i-- > 0;) step(i + 1, i);
  return out;
}

namespace {

RealField unwrap_2d(const std::vector<double>& arg, const Grid& g, std::size_t i0, bool x_first) {
  const std::size_t n = g.n();
  const std::size_t ix0 = g.ix(i0), iy0 = g.iy(i0);
  RealField S(g.size());
  std::vector<double> line(n);
  // Unwrap the anchor line, then each transverse line from it.
  if (x_first) {
    for (std::size_t ix = 0; ix < n; ++ix) line[ix] = arg[g.index(ix, iy0)];
    auto base = unwrap_line(line, ix0);
    for (std::size_t ix = 0; ix < n; ++ix) {
      for (std::size_t iy = 0; iy < n; ++iy) line[iy] = arg[g.index(ix, iy)];
      line[iy0] = base[ix];
      auto col = unwrap_line(line, iy0);
      for (std::size_t iy = 0; iy < n; ++iy) S[g.index(ix, iy)] = col[iy];
    }
  } else {
    for (std::size_t iy = 0; iy < n; ++iy) line[iy] = arg[g.index(ix0, iy)];
    auto base = unwrap_line(line, iy0);
    for (std::size_t iy = 0; iy < n; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) line[ix] = arg[g.index(ix, iy)];
      line[ix0] = base[iy];
      auto row = unwrap_line(line, ix0);
      for (std::size_t ix = 0; ix < n; ++ix) S[g.index(ix, iy)] = row[ix];
    }
  }
  return S;
}

}  // namespace

HydroFields polar_decompose(const WaveField& psi, double eps_mask, const PhysicalConstants& c) {
  c.validate();
  const Grid& g = psi.grid;
  HydroFields h{g, psi.density(), {}, {}, {}, {}, eps_mask, 0.0, true};
  h.mask = make_mask(h.rho, eps_mask);
  const std::size_t i0 = static_cast<std::size_t>(std::max_element(h.rho.begin(), h.rho.end()) - h.rho.begin());

  std::vector<double> arg(g.size());
  for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = std::arg(psi.values[i]);
  if (g.dim() == 1) {
    h.S = unwrap_line(arg, i0);
  } else {
    h.S = unwrap_2d(arg, g, i0, true);
    RealField alt = unwrap_2d(arg, g, i0, false);
    for (std::size_t i = 0; i < alt.size(); ++i) {
      if (h.mask[i] && std::abs(alt[i] - h.S[i]) > 1e-6) {
        h.phase_consistent = false;
        break;
      }
    }
  }
  for (auto& s : h.S) s *= c.hbar;

  auto dpsi = spectral_gradient(psi.values, g);
  const double hm = c.hbar / c.mass;
  for (int a = 0; a < g.dim(); ++a) {
    RealField j(g.size()), v(g.size(), 0.0);
    for (std::size_t i = 0; i < j.size(); ++i) {
      j[i] = hm * std::imag(std::conj(psi.values[i]) * dpsi[a][i]);
      if (h.mask[i]) v[i] = j[i] / h.rho[i];
    }
    h.current.push_back(std::move(j));
    h.velocity.push_back(std::move(v));
  }

  // Health metric: compare v with grad S / m where the whole stencil is on the mask.
  const std::size_t n = g.n();
  for (int a = 0; a < g.dim(); ++a) {
    RealField dS = fd_derivative4(h.S, g, a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      bool inside = h.mask[i] != 0;
      for (long off = -2; off <= 2 && inside; ++off) {
        std::size_t ix = g.ix(i), iy = g.iy(i);
        std::size_t k = a == 0 ? g.index((ix + n + off) % n, iy) : g.index(ix, (iy + n + off) % n);
        inside = h.mask[k] != 0 && (a == 0 ? (long)ix + off >= 0 && (long)ix + off < (long)n
                                           : (long)iy + off >= 0 && (long)iy + off < (long)n);
      }
      if (inside) h.velocity_discrepancy = std::max(h.velocity_discrepancy, std::abs(h.velocity[a][i] - dS[i] / c.mass));
    }
  }
  return h;
}

RealField quantum_potential(const RealField& rho, double coeff, const Grid& g, const Mask& mask, DerivativeScheme scheme) {
  if (rho.size() != g.size() || mask.size() != g.size()) throw std::invalid_argument("quantum_potential: shape mismatch");
  RealField R(rho.size());
  for (std::size_t i = 0; i < R.size(); ++i) R[i] = std::sqrt(std::max(rho[i], 0.0));
  RealField lap = laplacian(R, g, scheme);
  RealField q(rho.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (mask[i] && R[i] > 0.0) q[i] = -coeff * lap[i] / R[i];
  return q;
}

ComplexField apply_hamiltonian(const ComplexField& psi, const RealField& V, const Grid& g, const PhysicalConstants& c) {
  if (V.size() != g.size()) throw std::invalid_argument("apply_hamiltonian: potential size mismatch");
  ComplexField out = spectral_laplacian(psi, g);
  const double kin = -c.hbar * c.hbar / (2.0 * c.mass);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = kin * out[i] + V[i] * psi[i];
  return out;
}

RealField phase_time_derivative(const WaveField& psi, const RealField& V, const PhysicalConstants& c, const Mask& mask) {
  ComplexField hpsi = apply_hamiltonian(psi.values, V, psi.grid, c);
  RealField st(psi.values.size(), 0.0);
  for (std::size_t i = 0; i < st.size(); ++i)
    if (mask[i] && std::abs(psi.values[i]) > 0.0) st[i] = -std::real(hpsi[i] / psi.values[i]);
  return st;
}

}  // namespace fisher_hydro
