#include "fisher_hydro/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fisher_hydro/errors.hpp"

namespace fisher_hydro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sq_norm_grad(const VectorField& g, std::size_t i) {
  double s = 0.0;
  for (const auto& c : g) s += c[i] * c[i];
  return s;
}

void check_mask(const Mask& m, std::size_t n) {
  if (m.size() != n) throw std::invalid_argument("mask size mismatch");
  if (std::none_of(m.begin(), m.end(), [](auto b) { return b != 0; })) throw NumericalError("empty mask");
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t k = static_cast<std::size_t>(it - xs.begin());
  double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

}  // namespace

RegulariserSpec RegulariserSpec::tabulated(std::vector<double> rho, std::vector<double> f, std::vector<double> fprime,
                                           double C, std::string label) {
  if (rho.size() < 2 || rho.size() != f.size() || rho.size() != fprime.size())
    throw ConfigError("tabulated regulariser needs matching tables of >= 2 nodes");
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (!(rho[i] > rho[i - 1])) throw ConfigError("tabulated regulariser nodes must increase");
  auto fx = [rho, f](double r) { return interp(rho, f, r); };
  auto fpx = [rho, fprime](double r) { return interp(rho, fprime, r); };
  return {CustomFamily{fx, fpx, C, std::move(label)}};
}

std::string RegulariserSpec::name() const {
  return std::visit(overloaded{[](const FisherFamily&) { return std::string("fisher"); },
                               [](const PowerFamily& k) {
                                 std::ostringstream os;
                                 os << "power(p=" << k.p << ")";
                                 return os.str();
                               },
                               [](const ConstantFamily&) { return std::string("constant"); },
                               [](const CustomFamily& k) { return k.label; }},
                    family);
}

double RegulariserSpec::coefficient() const {
  return std::visit([](const auto& k) { return k.C; }, family);
}

double RegulariserSpec::f(double r) const {
  return std::visit(overloaded{[&](const FisherFamily& k) { return k.C / r; },
                               [&](const PowerFamily& k) { return k.C * std::pow(r, k.p); },
                               [&](const ConstantFamily& k) { return k.C; },
                               [&](const CustomFamily& k) { return k.C * k.f(r); }},
                    family);
}

double RegulariserSpec::fprime(double r) const {
  return std::visit(overloaded{[&](const FisherFamily& k) { return -k.C / (r * r); },
                               [&](const PowerFamily& k) { return k.p == 0.0 ? 0.0 : k.C * k.p * std::pow(r, k.p - 1.0); },
                               [&](const ConstantFamily&) { return 0.0; },
                               [&](const CustomFamily& k) { return k.C * k.fprime(r); }},
                    family);
}

void RegulariserSpec::validate() const {
  if (!(coefficient() > 0.0)) throw ConfigError("regulariser coefficient must be positive");
  if (const auto* k = std::get_if<CustomFamily>(&family)) {
    if (!k->f || !k->fprime) throw ConfigError("custom regulariser needs f and f'");
  }
}

double fisher_information(const RealField& rho, const Grid& g, const Mask& mask) {
  check_mask(mask, rho.size());
  VectorField grad = spectral_gradient(rho, g);
  RealField dens(rho.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (mask[i]) dens[i] = sq_norm_grad(grad, i) / rho[i];
  return integrate(dens, g);
}

double shannon_entropy(const RealField& rho, const Grid& g, const Mask& mask) {
  check_mask(mask, rho.size());
  RealField dens(rho.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (mask[i]) dens[i] = -rho[i] * std::log(rho[i]);
  return integrate(dens, g);
}

EnergyReport energy(const HydroFields& h, const RealField& V, double alpha, const PhysicalConstants& c) {
  const Grid& g = h.grid;
  check_mask(h.mask, h.rho.size());
  if (V.size() != g.size()) throw std::invalid_argument("energy: potential size mismatch");
  const std::size_t n = g.size();
  RealField R(n);
  for (std::size_t i = 0; i < n; ++i) R[i] = std::sqrt(h.rho[i]);
  VectorField gR = spectral_gradient(R, g);
  RealField kin(n, 0.0), pot(n, 0.0), curv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!h.mask[i]) continue;
    kin[i] = 0.5 * c.mass * sq_norm_grad(h.current, i) / h.rho[i];
    pot[i] = V[i] * h.rho[i];
    curv[i] = alpha * sq_norm_grad(gR, i);
  }
  EnergyReport e;
  e.kinetic = integrate(kin, g);
  e.potential = integrate(pot, g);
  e.curvature = integrate(curv, g);
  e.total = e.kinetic + e.potential + e.curvature;
  e.fisher_info = fisher_information(h.rho, g, h.mask);
  e.shannon = shannon_entropy(h.rho, g, h.mask);
  double thr = h.eps_mask * *std::max_element(h.rho.begin(), h.rho.end());
  double vol = g.dim() == 1 ? g.length() : g.length() * g.length();
  e.shannon_error_bar = thr > 0.0 && thr < std::exp(-1.0) ? thr * std::log(1.0 / thr) * vol : 0.0;
  if (!std::isfinite(e.total)) throw NumericalError("energy: non-finite total");
  return e;
}

std::vector<EntropyRate> shannon_entropy_rate(const DensityTrajectory& traj, double D, double eps_mask) {
  if (traj.rho.size() < 3) throw std::invalid_argument("shannon_entropy_rate needs at least three snapshots");
  std::vector<double> S(traj.rho.size());
  for (std::size_t k = 0; k < S.size(); ++k) S[k] = shannon_entropy(traj.rho[k], traj.grid, make_mask(traj.rho[k], eps_mask));
  std::vector<EntropyRate> out;
  for (std::size_t k = 1; k + 1 < S.size(); ++k) {
    const RealField& r = traj.rho[k];
    double rate = (S[k + 1] - S[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
    out.push_back({traj.times[k], rate, D * fisher_information(r, traj.grid, make_mask(r, eps_mask))});
  }
  return out;
}

std::vector<EntropyBalance> entropy_balance(const Trajectory& traj, const RealField& V, const PhysicalConstants& c,
                                            double diag_dt, double eps_mask) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 3) throw std::invalid_argument("entropy_balance needs at least three snapshots");
  if (!(diag_dt > 0.0)) throw ConfigError("diagnostic step must be positive");
  const Grid& g = snaps.front().grid;
  double D = 0.0;
  if (const auto* k = std::get_if<DgDiffusion>(&traj.spec.kind)) D = k->D;
  SplitStepper fwd(g, V, diag_dt, traj.spec.kind, c);
  SplitStepper bwd(g, V, -diag_dt, traj.spec.kind, c);
  auto entropy_of = [&](const ComplexField& psi) {
    RealField r(psi.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(psi[i]);
    return shannon_entropy(r, g, make_mask(r, eps_mask));
  };
  std::vector<EntropyBalance> out;
  for (std::size_t k = 1; k + 1 < snaps.size(); ++k) {
    ComplexField p = snaps[k].values, m = snaps[k].values;
    fwd.step(p);
    bwd.step(m);
    HydroFields h = polar_decompose(snaps[k], eps_mask, c);
    VectorField grad = spectral_gradient(h.rho, g);
    RealField adv(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!h.mask[i]) continue;
      double dot = 0.0;
      for (int a = 0; a < g.dim(); ++a) dot += h.current[a][i] * grad[a][i];
      adv[i] = -dot / h.rho[i];
    }
    EntropyBalance b;
    b.time = snaps[k].time;
    b.measured = (entropy_of(p) - entropy_of(m)) / (2.0 * diag_dt);
    b.advective = integrate(adv, g);
    b.diffusive = D * fisher_information(h.rho, g, h.mask);
    double gap = std::abs(b.measured - b.advective - b.diffusive);
    b.relative_defect = b.diffusive != 0.0 ? gap / std::abs(b.diffusive) : gap;
    out.push_back(b);
  }
  return out;
}

RealField el_derivative(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask) {
  spec.validate();
  if (rho.size() != g.size() || mask.size() != g.size()) throw std::invalid_argument("el_derivative: shape mismatch");
  RealField lap = spectral_laplacian(rho, g);
  VectorField grad = spectral_gradient(rho, g);
  RealField out(rho.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!mask[i]) continue;
    out[i] = -2.0 * spec.f(rho[i]) * lap[i] - spec.fprime(rho[i]) * sq_norm_grad(grad, i);
  }
  return out;
}

namespace {

double relative_el_gap(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask,
                       const RealField& ref) {
  RealField el = el_derivative(spec, rho, g, mask);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!mask[i]) continue;
    double d = el[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (!(den > 0.0)) throw NumericalError("fisher_el_defect: reference field vanishes on the mask");
  return std::sqrt(num / den);
}

}  // namespace

double fisher_el_defect(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask) {
  check_mask(mask, rho.size());
  return relative_el_gap(spec, rho, g, mask, quantum_potential(rho, 4.0 * spec.coefficient(), g, mask));
}

double fisher_el_defect(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask,
                        const RealField& root) {
  check_mask(mask, rho.size());
  if (root.size() != rho.size()) throw std::invalid_argument("fisher_el_defect: root shape mismatch");
  RealField lap = spectral_laplacian(root, g);
  RealField ref(rho.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (mask[i]) ref[i] = -4.0 * spec.coefficient() * lap[i] / root[i];
  return relative_el_gap(spec, rho, g, mask, ref);
}

double regulariser_value(const RegulariserSpec& spec, const RealField& rho, const Grid& g, const Mask& mask) {
  check_mask(mask, rho.size());
  VectorField grad = spectral_gradient(rho, g);
  RealField dens(rho.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (mask[i]) dens[i] = spec.f(rho[i]) * sq_norm_grad(grad, i);
  return integrate(dens, g);
}

Mask node_window_mask(const RealField& rho, const Grid& g, double eps, const std::vector<double>& nodes,
                      double halfwidth) {
  if (g.dim() != 1) throw std::invalid_argument("node_window_mask is 1D");
  Mask m = make_mask(rho, eps);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (double x0 : nodes)
      if (std::abs(g.coordinate(i) - x0) < halfwidth) m[i] = 0;
  return m;
}

ElReport fisher_el_necessity_report(const std::vector<DensitySample>& library, const std::vector<RegulariserSpec>& specs,
                                    double fisher_tol, double other_tol) {
  ElReport rep;
  rep.fisher_max = 0.0;
  rep.non_fisher_min = std::numeric_limits<double>::infinity();
  bool any_other = false;
  for (const auto& s : library) {
    for (const auto& spec : specs) {
      double r = s.root.empty() ? fisher_el_defect(spec, s.rho, s.grid, s.mask)
                                : fisher_el_defect(spec, s.rho, s.grid, s.mask, s.root);
      rep.rows.push_back({s.id, spec.name(), spec.coefficient(), r});
      if (spec.is_fisher()) {
        rep.fisher_max = std::max(rep.fisher_max, r);
      } else {
        any_other = true;
        rep.non_fisher_min = std::min(rep.non_fisher_min, r);
      }
    }
  }
  if (!any_other) rep.non_fisher_min = 0.0;
  rep.pass = rep.fisher_max <= fisher_tol && (!any_other || rep.non_fisher_min >= other_tol);
  return rep;
}

}  // namespace fisher_hydro
