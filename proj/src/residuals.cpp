#include "fisher_hydro/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/states.hpp"

namespace fisher_hydro {
namespace {

// Neumaier-compensated accumulator; keeps sums independent of grouping to ~1e-16.
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

double smootherstep(double s) { return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }

void require_1d(const Grid& g) {
  if (g.dim() != 1) throw std::invalid_argument("residual diagnostics are 1D");
}

std::size_t argmax(const RealField& f) {
  return static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
}

RealField unwrapped_phase(const ComplexField& psi, std::size_t i0, double hbar) {
  std::vector<double> a(psi.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::arg(psi[i]);
  RealField S = unwrap_line(a, i0);
  for (auto& s : S) s *= hbar;
  return S;
}

RealField density(const ComplexField& psi) {
  RealField r(psi.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(psi[i]);
  return r;
}

// Window-5 quadratic least-squares smoothing where the stencil lies on the mask.
RealField smooth5(const RealField& f, const Mask& m) {
  static constexpr double w[5] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
  RealField out = f;
  const std::size_t n = f.size();
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!(m[i - 2] && m[i - 1] && m[i] && m[i + 1] && m[i + 2])) continue;
    double s = 0.0;
    for (int k = -2; k <= 2; ++k) s += w[k + 2] * f[i + k];
    out[i] = s;
  }
  return out;
}

// Shared setup: mask, taper weights, phase, frame velocity.
struct Frame {
  RealField rho, S, Sx;
  Mask mask;
  RealField weight;
  std::size_t i0 = 0;
  double vc = 0.0;
  double rho_max = 0.0;
};

Frame make_frame(const WaveField& psi, const PhysicalConstants& c, double eps) {
  Frame f;
  const Grid& g = psi.grid;
  f.rho = density(psi.values);
  f.i0 = argmax(f.rho);
  f.rho_max = f.rho[f.i0];
  f.mask = make_mask(f.rho, eps);
  f.weight.assign(g.size(), 0.0);
  Sum wsum;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!f.mask[i]) continue;
    double s = std::clamp(std::log10(f.rho[i] / (f.rho_max * eps)), 0.0, 1.0);
    f.weight[i] = smootherstep(s) * f.rho[i];
    wsum.add(f.weight[i]);
  }
  if (!(wsum.value() > 0.0)) throw NumericalError("empty diagnostic mask");
  f.S = unwrapped_phase(psi.values, f.i0, c.hbar);
  f.Sx = fd_derivative4(f.S, g, 0);
  Sum num, den;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!f.mask[i]) continue;
    num.add(f.rho[i] * f.Sx[i]);
    den.add(f.rho[i]);
  }
  f.vc = num.value() / (c.mass * den.value());
  return f;
}

void fill_spatial(DiagnosticFields& d, const Frame& f, const RealField& V, const PhysicalConstants& c) {
  const Grid& g = d.grid;
  const std::size_t n = g.size();
  RealField sx(n), flux(n), R(n);
  for (std::size_t i = 0; i < n; ++i) {
    sx[i] = f.Sx[i] - c.mass * f.vc;
    flux[i] = f.rho[i] * sx[i] / c.mass;
    R[i] = std::sqrt(f.rho[i]);
  }
  RealField div = fd_derivative4(flux, g, 0);
  RealField lapR = fd_laplacian4(R, g);
  d.flux_divergence.assign(n, 0.0);
  d.kinetic.assign(n, 0.0);
  d.potential.assign(n, 0.0);
  d.curvature.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.mask[i]) continue;
    d.flux_divergence[i] = div[i];
    d.kinetic[i] = sx[i] * sx[i] / (2.0 * c.mass);
    d.potential[i] = V[i];
    d.curvature[i] = lapR[i] / R[i];
  }
}

double mask_frac(const Mask& m) { return mask_fraction(m); }

}  // namespace

SnapshotTriple make_triple(const WaveField& psi, const RealField& V, double dt, const EvolutionKind& kind,
                           const PhysicalConstants& c) {
  SplitStepper fwd(psi.grid, V, dt, kind, c);
  SplitStepper bwd(psi.grid, V, -dt, kind, c);
  ComplexField p = psi.values, m = psi.values;
  fwd.step(p);
  bwd.step(m);
  return SnapshotTriple{WaveField(psi.grid, std::move(m), psi.time - dt), psi,
                        WaveField(psi.grid, std::move(p), psi.time + dt), dt};
}

DiagnosticFields compute_diagnostics(const SnapshotTriple& t, const RealField& V, const PhysicalConstants& c,
                                     const ResidualOptions& opt) {
  const Grid& g = t.current.grid;
  require_1d(g);
  if (V.size() != g.size()) throw std::invalid_argument("compute_diagnostics: potential size mismatch");
  if (!(t.dt > 0.0)) throw std::invalid_argument("compute_diagnostics: dt must be positive");
  Frame f = make_frame(t.current, c, opt.eps_mask);
  const std::size_t n = g.size();

  DiagnosticFields d{g, f.mask, f.weight, f.rho, RealField(n, 0.0), {}, RealField(n, 0.0), {}, {}, {}, f.vc,
                     t.current.time, t.dt, mask_frac(f.mask), 0.0};
  fill_spatial(d, f, V, c);
  d.continuity_floor = std::pow(1e-8 * f.rho_max / t.dt, 2);

  const double half_mv2 = 0.5 * c.mass * f.vc * f.vc;
  if (opt.estimator == PhaseRateEstimator::kComovingDifference) {
    // Neighbours pulled back along the frame velocity: psi_next(x + vc dt), psi_prev(x - vc dt).
    ComplexField pp = spectral_shift(t.next.values, g, 0, -f.vc * t.dt);
    ComplexField pm = spectral_shift(t.previous.values, g, 0, f.vc * t.dt);
    RealField Sp = unwrapped_phase(pp, f.i0, c.hbar);
    RealField Sm = unwrapped_phase(pm, f.i0, c.hbar);
    const double turn = 2.0 * std::numbers::pi * c.hbar;
    double ap = turn * std::round((f.S[f.i0] - Sp[f.i0]) / turn);
    double am = turn * std::round((f.S[f.i0] - Sm[f.i0]) / turn);
    RealField rp = density(pp), rm = density(pm);
    for (std::size_t i = 0; i < n; ++i) {
      if (!f.mask[i]) continue;
      d.S_t[i] = ((Sp[i] + ap) - (Sm[i] + am)) / (2.0 * t.dt) - half_mv2;
      d.rho_t[i] = (rp[i] - rm[i]) / (2.0 * t.dt);
    }
  } else {
    RealField st = phase_time_derivative(t.current, V, c, f.mask);
    RealField rp = density(t.next.values), rm = density(t.previous.values);
    RealField rx = fd_derivative4(f.rho, g, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!f.mask[i]) continue;
      d.S_t[i] = st[i] + f.vc * f.Sx[i] - half_mv2;
      d.rho_t[i] = (rp[i] - rm[i]) / (2.0 * t.dt) + f.vc * rx[i];
    }
  }
  if (opt.smooth_phase_rate) d.S_t = smooth5(d.S_t, f.mask);
  return d;
}

DiagnosticFields compute_diagnostics(const WaveField& psi, const RealField& V, const PhysicalConstants& c,
                                     const ResidualOptions& opt) {
  const Grid& g = psi.grid;
  require_1d(g);
  if (V.size() != g.size()) throw std::invalid_argument("compute_diagnostics: potential size mismatch");
  Frame f = make_frame(psi, c, opt.eps_mask);
  const std::size_t n = g.size();
  DiagnosticFields d{g, f.mask, f.weight, f.rho, RealField(n, 0.0), {}, RealField(n, 0.0), {}, {}, {}, f.vc,
                     psi.time, 0.0, mask_frac(f.mask), 0.0};
  fill_spatial(d, f, V, c);
  RealField st = phase_time_derivative(psi, V, c, f.mask);
  const double half_mv2 = 0.5 * c.mass * f.vc * f.vc;
  for (std::size_t i = 0; i < n; ++i)
    if (f.mask[i]) d.S_t[i] = st[i] + f.vc * f.Sx[i] - half_mv2;
  if (opt.smooth_phase_rate) d.S_t = smooth5(d.S_t, f.mask);
  return d;
}

double weighted_mean(const RealField& f, const DiagnosticFields& d) {
  Sum num, den;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!d.mask[i]) continue;
    num.add(d.weight[i] * f[i]);
    den.add(d.weight[i]);
  }
  if (!(den.value() > 0.0)) throw NumericalError("empty diagnostic mask");
  return num.value() / den.value();
}

RealField mean_subtracted(const RealField& f, const DiagnosticFields& d) {
  double m = weighted_mean(f, d);
  RealField out(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (d.mask[i]) out[i] = f[i] - m;
  return out;
}

double continuity_residual(const DiagnosticFields& d) {
  const std::size_t n = d.rho.size();
  RealField num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = d.rho_t[i], b = d.flux_divergence[i];
    num[i] = (a + b) * (a + b);
    den[i] = a * a + b * b;
  }
  return weighted_mean(num, d) / (weighted_mean(den, d) + d.continuity_floor);
}

double hj_residual(const DiagnosticFields& d, double alpha) {
  const std::size_t n = d.rho.size();
  RealField total(n), kv(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    kv[i] = d.kinetic[i] + d.potential[i];
    q[i] = alpha * d.curvature[i];
    total[i] = d.S_t[i] + kv[i] - q[i];
  }
  auto variance = [&](const RealField& f) {
    RealField c = mean_subtracted(f, d);
    for (auto& x : c) x *= x;
    return weighted_mean(c, d);
  };
  double num = variance(total);
  double den = variance(d.S_t) + variance(kv) + variance(q);
  if (!(den > 1e-300)) return 0.0;
  return std::sqrt(num / den);
}

double continuity_residual(const SnapshotTriple& triple, const PhysicalConstants& c, double eps_mask) {
  ResidualOptions opt;
  opt.eps_mask = eps_mask;
  RealField V(triple.current.grid.size(), 0.0);
  return continuity_residual(compute_diagnostics(triple, V, c, opt));
}

double hj_residual(const WaveField& psi, const RealField& V, double alpha, const PhysicalConstants& c,
                   const ResidualOptions& opt) {
  return hj_residual(compute_diagnostics(psi, V, c, opt), alpha);
}

std::vector<double> ratio_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) throw ConfigError("ratio grid needs count >= 2 and hi > lo");
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i)
    r[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return r;
}

void locate_minimum(ScanResult& r) {
  if (r.residuals.empty()) throw std::invalid_argument("empty scan");
  std::size_t k = static_cast<std::size_t>(std::min_element(r.residuals.begin(), r.residuals.end()) -
                                           r.residuals.begin());
  r.argmin = r.alphas[k];
  r.min_value = r.residuals[k];
  r.inconclusive = k == 0 || k + 1 == r.residuals.size();
}

ScanResult alpha_scan(const Trajectory& traj, const RealField& V, const std::vector<double>& ratios,
                      const PhysicalConstants& c, const ResidualOptions& opt) {
  if (traj.snapshots.size() < 3) throw std::invalid_argument("alpha_scan needs at least three snapshots");
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (!(ratios[i] > ratios[i - 1])) throw ConfigError("alpha ratios must be strictly increasing");
  const double astar = c.alpha_star();
  ScanResult r;
  r.alphas = ratios;
  std::vector<Sum> hj(ratios.size());
  Sum cont;
  std::vector<std::vector<double>> per_snapshot;
  std::vector<ResidualSample> base;
  for (std::size_t s = 1; s + 1 < traj.snapshots.size(); ++s) {
    const WaveField& psi = traj.snapshots[s];
    SnapshotTriple t = make_triple(psi, V, traj.spec.dt, traj.spec.kind, c);
    DiagnosticFields d = compute_diagnostics(t, V, c, opt);
    double rc = continuity_residual(d);
    cont.add(rc);
    std::vector<double> row(ratios.size());
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      row[k] = hj_residual(d, ratios[k] * astar);
      hj[k].add(row[k]);
    }
    per_snapshot.push_back(std::move(row));
    base.push_back(ResidualSample{psi.time, rc, 0.0, 0.0, d.mask_fraction});
  }
  const double count = static_cast<double>(per_snapshot.size());
  r.residuals.resize(ratios.size());
  r.continuity.assign(ratios.size(), cont.value() / count);
  for (std::size_t k = 0; k < ratios.size(); ++k) r.residuals[k] = hj[k].value() / count;
  locate_minimum(r);
  std::size_t kmin = static_cast<std::size_t>(std::find(r.alphas.begin(), r.alphas.end(), r.argmin) - r.alphas.begin());
  for (std::size_t s = 0; s < base.size(); ++s) {
    base[s].r_hj = per_snapshot[s][kmin];
    base[s].alpha_used = r.argmin * astar;
  }
  r.samples = std::move(base);
  return r;
}

double eigenstate_defect(const RealField& rho, const RealField& V, double energy, double coeff, const Grid& g,
                         const Mask& mask) {
  RealField q = quantum_potential(rho, coeff, g, mask, DerivativeScheme::kFourthOrder);
  Sum s;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!mask[i]) continue;
    double e = V[i] + q[i] - energy;
    s.add(rho[i] * e * e);
  }
  return std::sqrt(s.value() * g.cell_volume());
}

MultiMassResult multi_mass_scan(const std::vector<double>& c_grid, const std::vector<double>& masses, double hbar,
                                double omega, const Grid& g, const std::vector<double>& bias, double eps_mask) {
  require_1d(g);
  if (masses.empty()) throw ConfigError("multi_mass_scan needs at least one mass");
  if (!bias.empty() && bias.size() != masses.size()) throw ConfigError("bias list must match masses");
  MultiMassResult out;
  out.masses = masses;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    PhysicalConstants c = PhysicalConstants::schrodinger(hbar, masses[i]);
    WaveField psi = harmonic_eigenstate(g, 0, c, omega);
    RealField rho = psi.density();
    Mask mask = make_mask(rho, eps_mask);
    RealField V = harmonic_potential(g, masses[i], omega);
    double e0 = harmonic_energy(0, c, omega);
    double b = bias.empty() ? 1.0 : bias[i];
    ScanResult r;
    r.alphas = c_grid;
    for (double cc : c_grid) r.residuals.push_back(eigenstate_defect(rho, V, e0, cc * b * c.alpha_star(), g, mask));
    r.continuity.assign(c_grid.size(), 0.0);
    locate_minimum(r);
    out.inconclusive = out.inconclusive || r.inconclusive;
    out.per_mass.push_back(std::move(r));
  }
  out.common_argmin = out.per_mass.front().argmin;
  out.common = true;
  for (const auto& r : out.per_mass) out.common = out.common && r.argmin == out.common_argmin;
  return out;
}

double momentum_balance_residual(const SnapshotTriple& t, const RealField& V, double alpha,
                                 const PhysicalConstants& c, double eps_mask) {
  const Grid& g = t.current.grid;
  require_1d(g);
  const std::size_t n = g.size();
  const double hm = c.hbar / c.mass;
  auto current = [&](const ComplexField& psi) {
    ComplexField d = spectral_derivative(psi, g, 0);
    RealField j(n);
    for (std::size_t i = 0; i < n; ++i) j[i] = hm * std::imag(std::conj(psi[i]) * d[i]);
    return j;
  };
  RealField jp = current(t.next.values), jm = current(t.previous.values), j = current(t.current.values);
  RealField rho = density(t.current.values);
  Mask mask = make_mask(rho, eps_mask);
  RealField R(n);
  for (std::size_t i = 0; i < n; ++i) R[i] = std::sqrt(rho[i]);
  RealField Rx = spectral_derivative(R, g, 0);
  RealField Rxx = spectral_laplacian(R, g);
  const double floor = 1e-300;
  RealField pi(n), curv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double convective = rho[i] > floor ? j[i] * j[i] / rho[i] : 0.0;
    double r_rr = R[i] * Rxx[i] - Rx[i] * Rx[i];
    pi[i] = convective - hm * hm * 0.5 * r_rr;
    // rho d_x(Lap R / R) = d_x(R R'' - R'^2); the divergence form stays smooth in the tails.
    curv[i] = r_rr;
  }
  RealField dpi = spectral_derivative(pi, g, 0);
  RealField dcurv = spectral_derivative(curv, g, 0);
  RealField dV = spectral_derivative(V, g, 0);
  const double dalpha = alpha - c.alpha_star();
  Sum total, t1, t2, t3, t4;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    double a = (jp[i] - jm[i]) / (2.0 * t.dt);
    double b = dpi[i];
    double cc = rho[i] / c.mass * dV[i];
    double d = -dalpha / c.mass * dcurv[i];
    total.add((a + b + cc + d) * (a + b + cc + d));
    t1.add(a * a);
    t2.add(b * b);
    t3.add(cc * cc);
    t4.add(d * d);
  }
  double den = std::sqrt(t1.value()) + std::sqrt(t2.value()) + std::sqrt(t3.value()) + std::sqrt(t4.value());
  if (!(den > 1e-300)) return 0.0;
  return std::sqrt(total.value()) / den;
}

}  // namespace fisher_hydro
