// Closed forms and brute-force references. Nothing here calls into the library's numerics,
// so agreement with a library routine is an independent check.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

inline std::vector<double> coordinates(std::size_t n, double length) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = -0.5 * length + length * static_cast<double>(i) / static_cast<double>(n);
  return x;
}

/// O(n^2) forward DFT, X_k = sum_j x_j exp(-2 pi i jk/n).
inline std::vector<cd> naive_dft(const std::vector<cd>& in) {
  const std::size_t n = in.size();
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += in[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>((j * k) % n) / static_cast<double>(n));
    out[k] = acc;
  }
  return out;
}

/// Free packet psi(x, 0) = (pi s^2)^(-1/4) exp(-(x-x0)^2/2s^2 + i k0 x) evolved analytically on the line.
inline cd free_gaussian(double x, double t, double x0, double s, double k0, double hbar, double m) {
  const cd a = 1.0 + cd(0.0, hbar * t / (m * s * s));
  const double y = x - x0, v = hbar * k0 / m;
  const cd expo = -(y - v * t) * (y - v * t) / (2.0 * s * s * a) + cd(0.0, k0 * x - hbar * k0 * k0 * t / (2.0 * m));
  return std::pow(kPi * s * s, -0.25) / std::sqrt(a) * std::exp(expo);
}

/// sigma(t)^2 = sigma0^2 (1 + (hbar t / m sigma0^2)^2) for the amplitude width.
inline double free_width_squared(double s0, double t, double hbar, double m) {
  const double tau = hbar * t / (m * s0 * s0);
  return s0 * s0 * (1.0 + tau * tau);
}

/// Heat kernel on a Gaussian density of variance v0.
inline double heat_variance(double v0, double D, double t) { return v0 + 2.0 * D * t; }
inline double gaussian_shannon(double var) { return 0.5 * std::log(2.0 * kPi * std::exp(1.0) * var); }
inline double gaussian_fisher(double var) { return 1.0 / var; }

/// -alpha (sqrt rho)'' / sqrt rho for rho proportional to exp(-(x-x0)^2/s^2).
inline double gaussian_quantum_potential(double x, double x0, double s, double alpha) {
  const double y = x - x0;
  return alpha * (1.0 / (s * s) - y * y / (s * s * s * s));
}

/// Hermite functions of the oscillator with length scale ell = sqrt(hbar / m w), n <= 3.
inline double hermite_function(int n, double x, double ell) {
  const double u = x / ell;
  double h = 1.0;
  switch (n) {
    case 0: h = 1.0; break;
    case 1: h = 2.0 * u; break;
    case 2: h = 4.0 * u * u - 2.0; break;
    case 3: h = 8.0 * u * u * u - 12.0 * u; break;
    default: return std::nan("");
  }
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return h * std::exp(-0.5 * u * u) / std::sqrt(std::pow(2.0, n) * fact * std::sqrt(kPi) * ell);
}

/// Trapezoid sum on a periodic grid.
inline double sum_times(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * h;
}

/// Second moment about the mean of a sampled density.
inline double variance(const std::vector<double>& rho, const std::vector<double>& x, double h) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    m0 += rho[i];
    m1 += rho[i] * x[i];
    m2 += rho[i] * x[i] * x[i];
  }
  m0 *= h, m1 *= h, m2 *= h;
  const double mean = m1 / m0;
  return m2 / m0 - mean * mean;
}

/// Centred-difference directional derivative of F at rho along eta.
inline double directional_fd(const std::function<double(const std::vector<double>&)>& F, const std::vector<double>& rho,
                             const std::vector<double>& eta, double eps) {
  std::vector<double> plus(rho), minus(rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    plus[i] += eps * eta[i];
    minus[i] -= eps * eta[i];
  }
  return (F(plus) - F(minus)) / (2.0 * eps);
}

/// Error ratio e(eps) / e(eps / 2) of the centred difference against an exact directional derivative.
/// Second-order consistency puts it near 4.
inline double ratio_test(const std::function<double(const std::vector<double>&)>& F, const std::vector<double>& rho,
                         const std::vector<double>& eta, double exact, double eps) {
  const double e1 = std::abs(directional_fd(F, rho, eta, eps) - exact);
  const double e2 = std::abs(directional_fd(F, rho, eta, 0.5 * eps) - exact);
  return e1 / e2;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace oracle
