#include "fisher_hydro/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fisher_hydro {

WaveField gaussian_packet(const Grid& g, double x0, double sigma, double k0, double phase_origin) {
  if (g.dim() != 1) throw std::invalid_argument("gaussian_packet is 1D");
  ComplexField psi(g.size());
  const double amp = std::pow(std::numbers::pi * sigma * sigma, -0.25);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double x = g.coordinate(i);
    double u = (x - x0) / sigma;
    psi[i] = std::polar(amp * std::exp(-0.5 * u * u), k0 * (x - phase_origin));
  }
  WaveField w(g, std::move(psi));
  normalize(w);
  return w;
}

double harmonic_energy(int n, const PhysicalConstants& c, double omega) { return c.hbar * omega * (n + 0.5); }

WaveField harmonic_eigenstate(const Grid& g, int n, const PhysicalConstants& c, double omega, double x0) {
  if (g.dim() != 1 || n < 0) throw std::invalid_argument("harmonic_eigenstate: 1D, n >= 0");
  const double ell = std::sqrt(c.hbar / (c.mass * omega));
  ComplexField psi(g.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double xi = (g.coordinate(i) - x0) / ell;
    // Normalised Hermite-function recurrence, stable for large n.
    double h0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
    double hm = 0.0, hk = h0;
    for (int k = 1; k <= n; ++k) {
      double hn = std::sqrt(2.0 / k) * xi * hk - std::sqrt((k - 1.0) / k) * hm;
      hm = hk;
      hk = hn;
    }
    psi[i] = hk / std::sqrt(ell);
  }
  WaveField w(g, std::move(psi));
  normalize(w);
  return w;
}

RealField harmonic_potential(const Grid& g, double mass, double omega, double center) {
  RealField V(g.size());
  for (std::size_t i = 0; i < V.size(); ++i) {
    double r2 = 0.0;
    double x = g.x_of(i, 0) - center;
    r2 += x * x;
    if (g.dim() == 2) {
      double y = g.x_of(i, 1);
      r2 += y * y;
    }
    V[i] = 0.5 * mass * omega * omega * r2;
  }
  return V;
}

WaveField vortex_state(const Grid& g, int winding, double sigma, double cx, double cy) {
  if (g.dim() != 2) throw std::invalid_argument("vortex_state is 2D");
  ComplexField psi(g.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double x = g.x_of(i, 0) - cx, y = g.x_of(i, 1) - cy;
    Complex z(x, winding >= 0 ? y : -y);
    psi[i] = std::pow(z, std::abs(winding)) * std::exp(-0.5 * (x * x + y * y) / (sigma * sigma));
  }
  WaveField w(g, std::move(psi));
  normalize(w);
  return w;
}

WaveField galilean_boost(const WaveField& psi, double velocity, const PhysicalConstants& c) {
  if (psi.grid.dim() != 1) throw std::invalid_argument("galilean_boost is 1D");
  ComplexField shifted = spectral_shift(psi.values, psi.grid, 0, velocity * psi.time);
  const double t = psi.time;
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    double x = psi.grid.coordinate(i);
    shifted[i] *= std::polar(1.0, (c.mass * velocity * x - 0.5 * c.mass * velocity * velocity * t) / c.hbar);
  }
  return WaveField(psi.grid, std::move(shifted), t);
}

}  // namespace fisher_hydro
