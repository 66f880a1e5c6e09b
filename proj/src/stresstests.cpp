#include "fisher_hydro/stresstests.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/states.hpp"

namespace fisher_hydro {
namespace {

Complex inner(const ComplexField& a, const ComplexField& b, const Grid& g) {
  Complex s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * g.cell_volume();
}

ComplexField normalised(const ComplexField& f, const Grid& g) {
  double n = std::sqrt(norm_squared(f, g));
  if (!(n > 0.0)) throw NumericalError("projective residual of a zero field");
  ComplexField out = f;
  for (auto& z : out) z /= n;
  return out;
}

template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RealField aligned_phase(const ComplexField& psi, std::size_t i0, double hbar, double target) {
  std::vector<double> a(psi.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::arg(psi[i]);
  RealField S = unwrap_line(a, i0);
  const double turn = 2.0 * std::numbers::pi;
  double shift = turn * std::round((target / hbar - S[i0]) / turn);
  for (auto& s : S) s = hbar * (s + shift);
  return S;
}

}  // namespace

void SuperpositionConfig::validate() const {
  constants.validate();
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (std::abs(x1 - x2) < 6.0 * sigma) throw ConfigError("packets overlap: |x1 - x2| must be >= 6 sigma");
  if (!(eps_reg > 0.0)) throw ConfigError("eps_reg must be positive");
  if (!(dt_base > 0.0) || !(t_final >= 0.0)) throw ConfigError("dt must be > 0 and t_final >= 0");
  for (double b : betas)
    if (!(b >= 0.0)) throw ConfigError("beta must be >= 0");
  make_grid(1, n_base, length);
}

double projective_residual_at(const ComplexField& joint, const ComplexField& summed, const Grid& g, double theta) {
  ComplexField u = normalised(joint, g), w = normalised(summed, g);
  Complex ph = std::polar(1.0, theta);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i] - ph * w[i]);
  return std::sqrt(s * g.cell_volume());
}

SuperpositionResult projective_residual(const ComplexField& joint, const ComplexField& summed, const Grid& g) {
  ComplexField u = normalised(joint, g), w = normalised(summed, g);
  double theta = std::arg(inner(w, u, g));
  SuperpositionResult r;
  r.theta = theta;
  Complex ph = std::polar(1.0, theta);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i] - ph * w[i]);
  r.residual = std::sqrt(s * g.cell_volume());
  r.n = g.n();
  return r;
}

SuperpositionResult superposition_residual(const WaveField& psi1, const WaveField& psi2, const RealField& V,
                                           const EvolutionKind& kind, double dt, double t_final,
                                           const PhysicalConstants& c) {
  const Grid& g = psi1.grid;
  if (psi2.grid != g) throw std::invalid_argument("superposition: grid mismatch");
  SplitStepper stepper(g, V, dt, kind, c);
  ComplexField a = psi1.values, b = psi2.values, j(g.size());
  const double r2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = (a[i] + b[i]) * r2;
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  for (std::size_t s = 0; s < steps; ++s) {
    stepper.step(a);
    stepper.step(b);
    stepper.step(j);
  }
  ComplexField sum(g.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a[i] + b[i];
  for (const auto& z : j)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalError("superposition: non-finite state");
  SuperpositionResult r = projective_residual(j, sum, g);
  r.dt = dt;
  return r;
}

SuperpositionResult superposition_residual(const SuperpositionConfig& cfg, double beta, bool refined) {
  cfg.validate();
  const std::size_t n = refined ? 2 * cfg.n_base : cfg.n_base;
  const double dt = refined ? 0.5 * cfg.dt_base : cfg.dt_base;
  Grid g = make_grid(1, n, cfg.length);
  const double hb = cfg.constants.hbar;
  WaveField a = gaussian_packet(g, cfg.x1, cfg.sigma, cfg.p1 / hb, cfg.x1);
  WaveField b = gaussian_packet(g, cfg.x2, cfg.sigma, cfg.p2 / hb, cfg.x2);
  RealField V = harmonic_potential(g, cfg.constants.mass, cfg.omega);
  return superposition_residual(a, b, V, BetaNonlinear{beta, cfg.eps_reg}, dt, cfg.t_final, cfg.constants);
}

SuperpositionCurve superposition_curve(const SuperpositionConfig& cfg, unsigned workers) {
  cfg.validate();
  const std::size_t nb = cfg.betas.size();
  std::vector<double> values(2 * nb);
  // Refined cells first: they are the longest and should start earliest.
  parallel_for(2 * nb, workers, [&](std::size_t k) {
    bool refined = k < nb;
    std::size_t ib = refined ? k : k - nb;
    values[refined ? nb + ib : ib] = superposition_residual(cfg, cfg.betas[ib], refined).residual;
  });
  SuperpositionCurve curve;
  for (std::size_t i = 0; i < nb; ++i) curve.rows.push_back({cfg.betas[i], values[i], values[nb + i]});
  std::vector<std::size_t> order(nb);
  for (std::size_t i = 0; i < nb; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return cfg.betas[a] < cfg.betas[b]; });
  for (std::size_t k = 1; k < nb; ++k) {
    const auto& lo = curve.rows[order[k - 1]];
    const auto& hi = curve.rows[order[k]];
    if (hi.base < lo.base - 1e-12 || hi.refined < lo.refined - 1e-12) curve.monotone = false;
  }
  for (const auto& r : curve.rows)
    if (r.beta > 0.0 && r.refined < 0.9 * r.base) curve.refinement_stable = false;
  return curve;
}

ComplexifierState complexifier_state(std::string label, const WaveField& psi, const RealField& V, double dt,
                                     const PhysicalConstants& c) {
  WaveField next = step_linear(psi, V, dt, c);
  WaveField prev = step_linear(psi, V, -dt, c);
  return ComplexifierState{std::move(label), std::move(prev), psi, std::move(next), dt, V};
}

double complexifier_defect(const ComplexifierState& st, double p, double s, const PhysicalConstants& c,
                           double eps_mask) {
  const Grid& g = st.current.grid;
  if (g.dim() != 1) throw std::invalid_argument("complexifier_defect is 1D");
  if (!(p > 0.0) || !(s > 0.0)) throw ConfigError("complexifier ansatz needs p > 0 and s > 0");
  const std::size_t n = g.size();
  RealField rho = st.current.density();
  const std::size_t i0 = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  RealField S0 = aligned_phase(st.current.values, i0, c.hbar, 0.0);
  RealField Sp = aligned_phase(st.next.values, i0, c.hbar, S0[i0]);
  RealField Sm = aligned_phase(st.previous.values, i0, c.hbar, S0[i0]);
  RealField rp = st.next.density(), rm = st.previous.density();
  auto phi = [&](const RealField& r, const RealField& S) {
    ComplexField f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(r[i], p) * std::polar(1.0, s * S[i]);
    return f;
  };
  ComplexField f0 = phi(rho, S0), fp = phi(rp, Sp), fm = phi(rm, Sm);
  RealField re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = f0[i].real();
    im[i] = f0[i].imag();
  }
  RealField lre = fd_laplacian4(re, g), lim = fd_laplacian4(im, g);
  Mask mask = make_mask(rho, eps_mask);
  const double kappa = 1.0 / s;
  const double kin = -kappa * kappa / (2.0 * c.mass);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!(mask[i - 2] && mask[i - 1] && mask[i] && mask[i + 1] && mask[i + 2])) continue;
    Complex lhs = Complex(0.0, kappa) * (fp[i] - fm[i]) / (2.0 * st.dt);
    Complex rhs = kin * Complex(lre[i], lim[i]) + st.V[i] * f0[i];
    num += std::norm(lhs - rhs);
    den += std::norm(lhs) + std::norm(rhs);
  }
  if (!(den > 1e-300)) return 0.0;
  return std::sqrt(num / den);
}

ComplexifierResult complexifier_scan(const std::vector<double>& p_grid, const std::vector<double>& s_grid,
                                     const std::vector<ComplexifierState>& states, const PhysicalConstants& c,
                                     double eps_mask) {
  if (p_grid.empty() || s_grid.empty() || states.empty()) throw ConfigError("complexifier scan needs non-empty grids");
  ComplexifierResult r;
  r.p_grid = p_grid;
  r.s_grid = s_grid;
  r.defect.assign(p_grid.size(), std::vector<double>(s_grid.size(), 0.0));
  r.informative = false;
  for (const auto& st : states) {
    RealField rho = st.current.density();
    VectorField gr = spectral_gradient(rho, st.current.grid);
    ComplexField dpsi = spectral_derivative(st.current.values, st.current.grid, 0);
    double rmax = *std::max_element(rho.begin(), rho.end());
    double gmax = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) gmax = std::max(gmax, std::abs(gr[0][i]));
    double phase_grad = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      phase_grad = std::max(phase_grad, std::abs(std::imag(std::conj(st.current.values[i]) * dpsi[i])));
    double scale = st.current.grid.length() / rmax;
    if (gmax * scale > 1e-10 || phase_grad * scale > 1e-10) r.informative = true;
  }
  for (std::size_t ip = 0; ip < p_grid.size(); ++ip)
    for (std::size_t is = 0; is < s_grid.size(); ++is) {
      double acc = 0.0;
      for (const auto& st : states) acc += complexifier_defect(st, p_grid[ip], s_grid[is], c, eps_mask);
      r.defect[ip][is] = acc / static_cast<double>(states.size());
    }
  std::size_t bp = 0, bs = 0;
  for (std::size_t ip = 0; ip < p_grid.size(); ++ip)
    for (std::size_t is = 0; is < s_grid.size(); ++is)
      if (r.defect[ip][is] < r.defect[bp][bs]) {
        bp = ip;
        bs = is;
      }
  r.best_p = p_grid[bp];
  r.best_s = s_grid[bs];
  r.min_defect = r.defect[bp][bs];
  r.alpha_recovered = 1.0 / (r.best_s * r.best_s * 2.0 * c.mass);
  int ties = 0;
  for (const auto& row : r.defect)
    for (double v : row)
      if (v <= r.min_defect) ++ties;
  r.unique_min = ties == 1 && r.informative;
  return r;
}

double involution_defect(const WaveField& psi0, const RealField& V, double t_final, double dt, double D,
                         const PhysicalConstants& c) {
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw ConfigError("time reversal needs dt > 0 and T >= 0");
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  if (std::abs(static_cast<double>(steps) * dt - t_final) > 1e-9 * std::max(1.0, t_final))
    throw ConfigError("T must be a multiple of dt");
  ComplexField psi = psi0.values;
  if (steps > 0) {
    SplitStepper stepper(psi0.grid, V, dt, DgDiffusion{D}, c);
    for (std::size_t s = 0; s < steps; ++s) stepper.step(psi);
    for (auto& z : psi) z = std::conj(z);
    for (std::size_t s = 0; s < steps; ++s) stepper.step(psi);
  } else {
    for (auto& z : psi) z = std::conj(z);
  }
  for (auto& z : psi) z = std::conj(z);
  double e = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) e += std::norm(psi[i] - psi0.values[i]);
  if (!std::isfinite(e)) throw NumericalError("time reversal: non-finite state");
  return std::sqrt(e * psi0.grid.cell_volume());
}

TimeReversalResult time_reversal_defect(const WaveField& psi0, const RealField& V, double t_final, double dt, double D,
                                        const PhysicalConstants& c) {
  TimeReversalResult r;
  r.steps = static_cast<std::size_t>(std::llround(t_final / dt));
  r.defect = involution_defect(psi0, V, t_final, dt, D, c);
  r.defect_reversible = D == 0.0 ? r.defect : involution_defect(psi0, V, t_final, dt, 0.0, c);
  r.floor_ratio = r.defect / std::max(r.defect_reversible, 1e-300);
  return r;
}

CirculationResult circulation(const WaveField& psi, double loop_radius, double cx, double cy,
                              const PhysicalConstants& c, double eps_mask) {
  const Grid& g = psi.grid;
  if (g.dim() != 2) throw std::invalid_argument("circulation needs a 2D field");
  const long n = static_cast<long>(g.n());
  const double h = g.spacing();
  const long ic = std::lround((cx + 0.5 * g.length()) / h);
  const long jc = std::lround((cy + 0.5 * g.length()) / h);
  const long r = std::lround(loop_radius / h);
  if (r < 3) throw ConfigError("loop must stay at least 3 cells from the node");
  if (2 * r + 1 > n) throw ConfigError("loop larger than the box");
  auto at = [&](long i, long j) { return psi.values[g.index(((i % n) + n) % n, ((j % n) + n) % n)]; };
  auto incr = [](Complex from, Complex to) { return std::arg(to * std::conj(from)); };

  RealField rho = psi.density();
  const double thr = eps_mask * *std::max_element(rho.begin(), rho.end());
  std::vector<std::pair<long, long>> path;
  for (long i = ic - r; i < ic + r; ++i) path.push_back({i, jc - r});
  for (long j = jc - r; j < jc + r; ++j) path.push_back({ic + r, j});
  for (long i = ic + r; i > ic - r; --i) path.push_back({i, jc + r});
  for (long j = jc + r; j > jc - r; --j) path.push_back({ic - r, j});
  for (const auto& [i, j] : path)
    if (std::norm(at(i, j)) <= thr) throw NumericalError("circulation loop crosses the masked nodal region");

  double line = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& a = path[k];
    const auto& b = path[(k + 1) % path.size()];
    line += incr(at(a.first, a.second), at(b.first, b.second));
  }
  // Plaquettes live on a lattice offset so the centre sits mid-cell; edges are subdivided by spectral
  // interpolation so a multiply wound core still has increments well below pi.
  constexpr int kSub = 4;
  auto frac = [](double u) { return u - std::floor(u); };
  const double ux = (cx + 0.5 * g.length()) / h - 0.5, uy = (cy + 0.5 * g.length()) / h - 0.5;
  const double fx = frac(ux), fy = frac(uy);
  const long i0 = static_cast<long>(std::floor(ux)), j0 = static_cast<long>(std::floor(uy));
  ComplexField base = spectral_shift(spectral_shift(psi.values, g, 0, -fx * h), g, 1, -fy * h);
  std::vector<ComplexField> along_x(kSub + 1), along_y(kSub + 1);
  for (int k = 0; k <= kSub; ++k) {
    along_x[k] = spectral_shift(base, g, 0, -h * k / kSub);
    along_y[k] = spectral_shift(base, g, 1, -h * k / kSub);
  }
  auto sample = [&](const ComplexField& f, long i, long j) { return f[g.index(((i % n) + n) % n, ((j % n) + n) % n)]; };
  double area = 0.0;
  std::vector<Complex> ring(4 * kSub);
  for (long i = i0 - r; i <= i0 + r; ++i)
    for (long j = j0 - r; j <= j0 + r; ++j) {
      for (int k = 0; k < kSub; ++k) {
        ring[k] = sample(along_x[k], i, j);
        ring[kSub + k] = sample(along_y[k], i + 1, j);
        ring[2 * kSub + k] = sample(along_x[kSub - k], i, j + 1);
        ring[3 * kSub + k] = sample(along_y[kSub - k], i, j);
      }
      for (std::size_t k = 0; k < ring.size(); ++k) area += incr(ring[k], ring[(k + 1) % ring.size()]);
    }
  CirculationResult out;
  out.line_value = line * c.hbar;
  out.area_value = area * c.hbar;
  out.n_estimate = out.line_value / (2.0 * std::numbers::pi * c.hbar);
  out.half_side_cells = static_cast<std::size_t>(r);
  return out;
}

}  // namespace fisher_hydro
