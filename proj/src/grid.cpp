#include "fisher_hydro/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/fft.hpp"

namespace fisher_hydro {
namespace {

void check_size(std::size_t got, const Grid& g, const char* who) {
  if (got != g.size()) {
    throw std::invalid_argument(std::string(who) + ": field has " + std::to_string(got) +
                                " entries, grid has " + std::to_string(g.size()));
  }
}

void check_axis(int axis, const Grid& g) {
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("axis out of range");
}

double k_along(const Grid& g, std::size_t idx, int axis) {
  return g.wavenumbers()[axis == 0 ? g.ix(idx) : g.iy(idx)];
}

bool is_nyquist(const Grid& g, std::size_t idx, int axis) {
  return (axis == 0 ? g.ix(idx) : g.iy(idx)) == g.n() / 2;
}

ComplexField to_complex(const RealField& f) { return ComplexField(f.begin(), f.end()); }

RealField real_part(const ComplexField& f) {
  RealField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

double k_squared(const Grid& g, std::size_t idx) {
  double kx = g.wavenumbers()[g.ix(idx)];
  if (g.dim() == 1) return kx * kx;
  double ky = g.wavenumbers()[g.iy(idx)];
  return kx * kx + ky * ky;
}

}  // namespace

Grid::Grid(int dim, std::size_t n, double length)
    : dim_(dim), n_(n), length_(length), spacing_(length / static_cast<double>(n)), k_(n) {
  const double dk = 2.0 * std::numbers::pi / length;
  for (std::size_t j = 0; j < n; ++j) {
    long m = j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    k_[j] = dk * static_cast<double>(m);
  }
}

Grid make_grid(int dim, std::size_t n, double length) {
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (n < 16 || (n & (n - 1)) != 0) throw ConfigError("grid size must be a power of two >= 16, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("box length must be positive and finite");
  return Grid(dim, n, length);
}

ComplexField spectral_derivative(const ComplexField& f, const Grid& g, int axis) {
  check_size(f.size(), g, "spectral_derivative");
  check_axis(axis, g);
  ComplexField c = f;
  fft_forward(c, g);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = is_nyquist(g, i, axis) ? Complex(0.0) : c[i] * Complex(0.0, k_along(g, i, axis));
  }
  fft_inverse(c, g);
  return c;
}

RealField spectral_derivative(const RealField& f, const Grid& g, int axis) {
  return real_part(spectral_derivative(to_complex(f), g, axis));
}

VectorField spectral_gradient(const RealField& f, const Grid& g) {
  check_size(f.size(), g, "spectral_gradient");
  ComplexField c = to_complex(f);
  fft_forward(c, g);
  VectorField out;
  for (int a = 0; a < g.dim(); ++a) {
    ComplexField d(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      d[i] = is_nyquist(g, i, a) ? Complex(0.0) : c[i] * Complex(0.0, k_along(g, i, a));
    }
    fft_inverse(d, g);
    out.push_back(real_part(d));
  }
  return out;
}

std::vector<ComplexField> spectral_gradient(const ComplexField& f, const Grid& g) {
  check_size(f.size(), g, "spectral_gradient");
  ComplexField c = f;
  fft_forward(c, g);
  std::vector<ComplexField> out;
  for (int a = 0; a < g.dim(); ++a) {
    ComplexField d(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      d[i] = is_nyquist(g, i, a) ? Complex(0.0) : c[i] * Complex(0.0, k_along(g, i, a));
    }
    fft_inverse(d, g);
    out.push_back(std::move(d));
  }
  return out;
}

ComplexField spectral_laplacian(const ComplexField& f, const Grid& g) {
  check_size(f.size(), g, "spectral_laplacian");
  ComplexField c = f;
  fft_forward(c, g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= -k_squared(g, i);
  fft_inverse(c, g);
  return c;
}

RealField spectral_laplacian(const RealField& f, const Grid& g) {
  return real_part(spectral_laplacian(to_complex(f), g));
}

RealField spectral_divergence(const VectorField& u, const Grid& g) {
  if (static_cast<int>(u.size()) != g.dim()) throw std::invalid_argument("divergence: component count != dim");
  RealField out(g.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    RealField d = spectral_derivative(u[a], g, a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  }
  return out;
}

RealField fd_derivative4(const RealField& f, const Grid& g, int axis) {
  check_size(f.size(), g, "fd_derivative4");
  check_axis(axis, g);
  const std::size_t n = g.n();
  const double inv = 1.0 / (12.0 * g.spacing());
  RealField out(f.size());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    std::size_t ix = g.ix(idx), iy = g.iy(idx);
    auto at = [&](long off) {
      if (axis == 0) return f[g.index((ix + n + off) % n, iy)];
      return f[g.index(ix, (iy + n + off) % n)];
    };
    out[idx] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) * inv;
  }
  return out;
}

VectorField fd_gradient4(const RealField& f, const Grid& g) {
  VectorField out;
  for (int a = 0; a < g.dim(); ++a) out.push_back(fd_derivative4(f, g, a));
  return out;
}

RealField fd_laplacian4(const RealField& f, const Grid& g) {
  check_size(f.size(), g, "fd_laplacian4");
  const std::size_t n = g.n();
  const double inv = 1.0 / (12.0 * g.spacing() * g.spacing());
  RealField out(f.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      std::size_t ix = g.ix(idx), iy = g.iy(idx);
      auto at = [&](long off) {
        if (a == 0) return f[g.index((ix + n + off) % n, iy)];
        return f[g.index(ix, (iy + n + off) % n)];
      };
      out[idx] += (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) * inv;
    }
  }
  return out;
}

RealField laplacian(const RealField& f, const Grid& g, DerivativeScheme s) {
  return s == DerivativeScheme::kSpectral ? spectral_laplacian(f, g) : fd_laplacian4(f, g);
}

VectorField gradient(const RealField& f, const Grid& g, DerivativeScheme s) {
  return s == DerivativeScheme::kSpectral ? spectral_gradient(f, g) : fd_gradient4(f, g);
}

double integrate(const RealField& f, const Grid& g) {
  check_size(f.size(), g, "integrate");
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_volume();
}

double integrate_masked(const RealField& f, const Mask& mask, const Grid& g) {
  check_size(f.size(), g, "integrate_masked");
  check_size(mask.size(), g, "integrate_masked");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) s += f[i];
  return s * g.cell_volume();
}

double norm_squared(const ComplexField& psi, const Grid& g) {
  check_size(psi.size(), g, "norm_squared");
  double s = 0.0;
  for (const auto& z : psi) s += std::norm(z);
  return s * g.cell_volume();
}

ComplexField spectral_shift(const ComplexField& f, const Grid& g, int axis, double shift) {
  check_size(f.size(), g, "spectral_shift");
  check_axis(axis, g);
  ComplexField c = f;
  fft_forward(c, g);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double k = k_along(g, i, axis);
    if (is_nyquist(g, i, axis)) {
      c[i] *= std::cos(k * shift);  // keeps real inputs real
    } else {
      c[i] *= std::polar(1.0, -k * shift);
    }
  }
  fft_inverse(c, g);
  return c;
}

}  // namespace fisher_hydro
