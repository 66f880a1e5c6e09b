/// @file grid.hpp
/// @brief Periodic uniform grids (1D/2D), spectral and 4th-order stencils, quadrature.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fisher_hydro {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;
/// One component per axis.
using VectorField = std::vector<RealField>;
using Mask = std::vector<std::uint8_t>;

/// Square periodic grid on [-L/2, L/2)^dim with n points per axis.
/// Storage is row-major with x fastest: index = ix + n * iy.
class Grid {
 public:
  Grid(int dim, std::size_t n, double length);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return dim_ == 1 ? n_ : n_ * n_; }
  double length() const { return length_; }
  double spacing() const { return spacing_; }
  double cell_volume() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

  double coordinate(std::size_t i) const { return -0.5 * length_ + static_cast<double>(i) * spacing_; }
  /// Angular wavenumbers in FFT order; the Nyquist entry is -pi/h.
  const std::vector<double>& wavenumbers() const { return k_; }

  std::size_t index(std::size_t ix, std::size_t iy) const { return ix + n_ * iy; }
  std::size_t ix(std::size_t idx) const { return idx % n_; }
  std::size_t iy(std::size_t idx) const { return idx / n_; }

  /// Coordinate of flat index idx along axis.
  double x_of(std::size_t idx, int axis) const {
    return coordinate(axis == 0 ? ix(idx) : iy(idx));
  }

  /// Grid with 2n points per axis on the same box.
  Grid refined() const { return Grid(dim_, 2 * n_, length_); }

  bool operator==(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int dim_;
  std::size_t n_;
  double length_;
  double spacing_;
  std::vector<double> k_;
};

/// Validating factory: n power of two, n >= 16, L > 0, dim in {1, 2}. Throws ConfigError.
Grid make_grid(int dim, std::size_t n, double length);

enum class DerivativeScheme { kSpectral, kFourthOrder };

// Spectral operators. Odd derivatives drop the Nyquist mode.
RealField spectral_derivative(const RealField& f, const Grid& g, int axis);
ComplexField spectral_derivative(const ComplexField& f, const Grid& g, int axis);
VectorField spectral_gradient(const RealField& f, const Grid& g);
std::vector<ComplexField> spectral_gradient(const ComplexField& f, const Grid& g);
RealField spectral_laplacian(const RealField& f, const Grid& g);
ComplexField spectral_laplacian(const ComplexField& f, const Grid& g);
RealField spectral_divergence(const VectorField& u, const Grid& g);

// Fourth-order central stencils with periodic wrap.
RealField fd_derivative4(const RealField& f, const Grid& g, int axis);
VectorField fd_gradient4(const RealField& f, const Grid& g);
RealField fd_laplacian4(const RealField& f, const Grid& g);

RealField laplacian(const RealField& f, const Grid& g, DerivativeScheme s);
VectorField gradient(const RealField& f, const Grid& g, DerivativeScheme s);

/// Periodic trapezoid rule (cell volume times sum).
double integrate(const RealField& f, const Grid& g);
/// Integral of f over cells where mask is set.
double integrate_masked(const RealField& f, const Mask& mask, const Grid& g);
/// Integral of |psi|^2.
double norm_squared(const ComplexField& psi, const Grid& g);

/// Spectral translation f(x) -> f(x - shift) along axis.
ComplexField spectral_shift(const ComplexField& f, const Grid& g, int axis, double shift);

}  // namespace fisher_hydro
