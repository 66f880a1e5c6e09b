#include "fisher_hydro/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fisher_hydro/errors.hpp"
#include "fisher_hydro/fft.hpp"

namespace fisher_hydro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(const ComplexField& f) {
  for (const auto& z : f)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

RealField density_of(const ComplexField& psi) {
  RealField rho(psi.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi[i]);
  return rho;
}

}  // namespace

void EvolutionSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be >= 0");
  if (record_stride == 0) throw ConfigError("record_stride must be >= 1");
  std::visit(overloaded{[](const LinearKind&) {},
                        [](const DgDiffusion& k) {
                          if (!(k.D >= 0.0)) throw ConfigError("diffusion D must be >= 0");
                          if (!(k.mask_eps > 0.0)) throw ConfigError("DG mask eps must be > 0");
                        },
                        [](const BetaNonlinear& k) {
                          if (!(k.beta >= 0.0)) throw ConfigError("beta must be >= 0");
                          if (!(k.eps_reg > 0.0)) throw ConfigError("eps_reg must be > 0");
                        },
                        [](const DensityDiffusion& k) {
                          if (!(k.D >= 0.0)) throw ConfigError("diffusion D must be >= 0");
                        }},
             kind);
}

std::size_t EvolutionSpec::steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }

SplitStepper::SplitStepper(const Grid& g, const RealField& V, double dt, const EvolutionKind& kind,
                           const PhysicalConstants& c)
    : grid_(g), V_(V), dt_(dt), kind_(kind), c_(c), half_potential_(g.size()), kinetic_(g.size()) {
  if (V.size() != g.size()) throw std::invalid_argument("stepper: potential size mismatch");
  if (std::holds_alternative<DensityDiffusion>(kind)) throw std::invalid_argument("stepper: density kind has no wavefunction step");
  for (std::size_t i = 0; i < V.size(); ++i) half_potential_[i] = std::polar(1.0, -0.5 * V[i] * dt / c.hbar);
  const auto& k = g.wavenumbers();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double k2 = k[g.ix(i)] * k[g.ix(i)];
    if (g.dim() == 2) k2 += k[g.iy(i)] * k[g.iy(i)];
    kinetic_[i] = std::polar(1.0, -c.hbar * k2 * dt / (2.0 * c.mass));
  }
}

void SplitStepper::linear(ComplexField& psi) const {
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential_[i];
  fft_forward(psi, grid_);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= kinetic_[i];
  fft_inverse(psi, grid_);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= half_potential_[i];
}

void SplitStepper::dg_factor(ComplexField& psi, double tau) const {
  const auto& k = std::get<DgDiffusion>(kind_);
  const auto& kk = grid_.wavenumbers();
  ComplexField r(psi.size());
  double rmax = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = std::norm(psi[i]);
    rmax = std::max(rmax, r[i].real());
  }
  const double thr = k.mask_eps * rmax;
  RealField old(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) old[i] = r[i].real();
  fft_forward(r, grid_);
  for (std::size_t i = 0; i < r.size(); ++i) {
    double k2 = kk[grid_.ix(i)] * kk[grid_.ix(i)];
    if (grid_.dim() == 2) k2 += kk[grid_.iy(i)] * kk[grid_.iy(i)];
    r[i] *= std::exp(-k.D * k2 * tau);
  }
  fft_inverse(r, grid_);
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] *= std::sqrt((std::max(r[i].real(), 0.0) + thr) / (old[i] + thr));
}

void SplitStepper::beta_kick(ComplexField& psi) const {
  const auto& k = std::get<BetaNonlinear>(kind_);
  RealField u = beta_potential(density_of(psi), grid_, k.beta, k.eps_reg);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, -0.5 * u[i] * dt_ / c_.hbar);
}

void SplitStepper::step(ComplexField& psi) const {
  if (psi.size() != grid_.size()) throw std::invalid_argument("stepper: field size mismatch");
  std::visit(overloaded{[&](const LinearKind&) { linear(psi); },
                        [&](const DgDiffusion& k) {
                          if (k.D == 0.0) {
                            linear(psi);
                            return;
                          }
                          dg_factor(psi, 0.5 * dt_);
                          linear(psi);
                          dg_factor(psi, 0.5 * dt_);
                        },
                        [&](const BetaNonlinear& k) {
                          if (k.beta == 0.0) {
                            linear(psi);
                            return;
                          }
                          beta_kick(psi);
                          linear(psi);
                          beta_kick(psi);
                        },
                        [&](const DensityDiffusion&) {}},
             kind_);
}

RealField beta_potential(const RealField& rho, const Grid& g, double beta, double eps_reg) {
  RealField u(rho.size(), 0.0);
  if (beta == 0.0) return u;
  const double eps = eps_reg * *std::max_element(rho.begin(), rho.end());
  // Local stencil: with spectral gradients the kick feeds aliased high modes back into U_beta and the
  // residuals stop converging under refinement.
  VectorField grad = fd_gradient4(rho, g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double g2 = 0.0;
    for (const auto& comp : grad) g2 += comp[i] * comp[i];
    double d = rho[i] + eps;
    u[i] = beta * g2 / (d * d);
  }
  return u;
}

WaveField step_kind(const WaveField& psi, const RealField& V, double dt, const EvolutionKind& kind,
                    const PhysicalConstants& c) {
  SplitStepper s(psi.grid, V, dt, kind, c);
  ComplexField out = psi.values;
  s.step(out);
  return WaveField(psi.grid, std::move(out), psi.time + dt);
}

WaveField step_linear(const WaveField& psi, const RealField& V, double dt, const PhysicalConstants& c) {
  return step_kind(psi, V, dt, LinearKind{}, c);
}

WaveField step_dg(const WaveField& psi, const RealField& V, double dt, double D, const PhysicalConstants& c,
                  double mask_eps) {
  return step_kind(psi, V, dt, DgDiffusion{D, mask_eps}, c);
}

WaveField step_beta(const WaveField& psi, const RealField& V, double dt, double beta, double eps_reg,
                    const PhysicalConstants& c) {
  return step_kind(psi, V, dt, BetaNonlinear{beta, eps_reg}, c);
}

Trajectory evolve(const WaveField& psi0, const RealField& V, const EvolutionSpec& spec, const PhysicalConstants& c,
                  std::string potential_id) {
  spec.validate();
  c.validate();
  Trajectory traj{{psi0}, spec, std::move(potential_id)};
  const std::size_t steps = spec.steps();
  if (steps == 0) return traj;
  SplitStepper stepper(psi0.grid, V, spec.dt, spec.kind, c);
  ComplexField psi = psi0.values;
  for (std::size_t s = 1; s <= steps; ++s) {
    stepper.step(psi);
    if (s % spec.record_stride == 0 || s == steps) {
      if (!all_finite(psi)) {
        std::ostringstream os;
        os << "non-finite wavefunction at step " << s << " (t=" << psi0.time + s * spec.dt << ")";
        throw NumericalError(os.str());
      }
      traj.snapshots.emplace_back(psi0.grid, psi, psi0.time + static_cast<double>(s) * spec.dt);
    }
  }
  return traj;
}

DensityTrajectory evolve_density_diffusion(const RealField& rho0, const Grid& g, const VectorField& velocity, double D,
                                           const EvolutionSpec& spec) {
  spec.validate();
  if (rho0.size() != g.size()) throw std::invalid_argument("evolve_density_diffusion: shape mismatch");
  if (!(D >= 0.0)) throw ConfigError("diffusion D must be >= 0");
  bool has_v = !velocity.empty();
  if (has_v && static_cast<int>(velocity.size()) != g.dim()) throw std::invalid_argument("velocity component count");

  DensityTrajectory out{g, {0.0}, {rho0}, spec, {}};
  const double h = g.spacing();
  if (spec.dt * D / (h * h) > 0.25) {
    std::ostringstream os;
    os << "CFL: dt*D/h^2 = " << spec.dt * D / (h * h) << " exceeds 0.25";
    out.warnings.push_back(os.str());
  }

  auto rhs = [&](const RealField& r) {
    RealField f(r.size(), 0.0);
    if (D != 0.0) {
      RealField lap = spectral_laplacian(r, g);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = D * lap[i];
    }
    if (has_v) {
      VectorField flux(g.dim(), RealField(r.size()));
      for (int a = 0; a < g.dim(); ++a)
        for (std::size_t i = 0; i < r.size(); ++i) flux[a][i] = r[i] * velocity[a][i];
      RealField div = spectral_divergence(flux, g);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] -= div[i];
    }
    return f;
  };

  const std::size_t steps = spec.steps();
  const double dt = spec.dt;
  RealField r = rho0, tmp(r.size());
  for (std::size_t s = 1; s <= steps; ++s) {
    RealField k1 = rhs(r);
    for (std::size_t i = 0; i < r.size(); ++i) tmp[i] = r[i] + 0.5 * dt * k1[i];
    RealField k2 = rhs(tmp);
    for (std::size_t i = 0; i < r.size(); ++i) tmp[i] = r[i] + 0.5 * dt * k2[i];
    RealField k3 = rhs(tmp);
    for (std::size_t i = 0; i < r.size(); ++i) tmp[i] = r[i] + dt * k3[i];
    RealField k4 = rhs(tmp);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (s % spec.record_stride == 0 || s == steps) {
      for (double v : r)
        if (!std::isfinite(v)) throw NumericalError("non-finite density at step " + std::to_string(s));
      out.times.push_back(static_cast<double>(s) * dt);
      out.rho.push_back(r);
    }
  }
  return out;
}

}  // namespace fisher_hydro
