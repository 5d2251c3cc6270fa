#include "kinetic_solver.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace hydrolimit {

ScalarField HermiteField::component(std::size_t alpha) const {
  ScalarField out(nx);
  for (int j = 0; j < nx; ++j) out[j] = data[j * ncoef + alpha];
  return out;
}

void HermiteField::set_component(std::size_t alpha, std::span<const double> values) {
  if (static_cast<int>(values.size()) != nx) throw ShapeError("component length does not match grid");
  for (int j = 0; j < nx; ++j) data[j * ncoef + alpha] = values[j];
}

HermiteField make_field(const Grid& grid, const VelocityBasis& basis) {
  return HermiteField(grid.size(), basis.size());
}

double max_stable_dt(const Grid& grid, const VelocityBasis& basis, double eps, double cfl) {
  return cfl * eps * grid.spacing() / std::sqrt(2.0 * basis.modes());
}

KineticState equilibrium_state(const Grid& grid, const VelocityBasis& basis, const PhysParams& params) {
  KineticState s;
  s.h = make_field(grid, basis);
  for (int j = 0; j < grid.size(); ++j) s.h(j, 0) = 1.0;
  s.fluid.rho = constant_field(grid, 1.0);
  s.fluid.u = constant_field(grid, 0.0);
  s.params = params;
  return s;
}

KineticMoments kinetic_moments(const VelocityBasis& basis, const KineticState& state) {
  return {state.h.component(0), state.h.component(basis.axis_index(0, 1))};
}

VectorField drag_source(const VelocityBasis& basis, const KineticState& state) {
  const double eps = state.params.eps;
  if (!(eps > 0.0)) throw DomainError("drag source requires eps > 0");
  const std::size_t i1 = basis.axis_index(0, 1);
  VectorField out(state.h.nx);
  for (int j = 0; j < state.h.nx; ++j) {
    out[j] = (state.h(j, i1) - eps * state.fluid.u[j] * state.h(j, 0)) / eps;
  }
  return out;
}

ConservedTotals conserved_totals(const Grid& grid, const VelocityBasis& basis, const KineticState& state) {
  const int n = grid.size();
  const std::size_t i1 = basis.axis_index(0, 1);
  ConservedTotals c;
  double mk = 0.0, mf = 0.0, p = 0.0;
  for (int j = 0; j < n; ++j) {
    mk += state.h(j, 0);
    mf += state.fluid.rho[j];
    p += state.fluid.rho[j] * state.fluid.u[j] + state.params.eps * state.h(j, i1);
  }
  c.mass_kinetic = mk / n;
  c.mass_fluid = mf / n;
  c.momentum = p / n;
  return c;
}

namespace {

struct Rates {
  HermiteField transport;
  HermiteField drag;  // -(u/eps) D h
  ScalarField d_rho;
  ScalarField d_q;
};

Rates rates(const Grid& grid, const VelocityBasis& basis, const PhysParams& params, const HermiteField& h,
            std::span<const double> rho, std::span<const double> q, bool freeze_transport) {
  const int n = grid.size();
  Rates r{HermiteField(n, h.ncoef), HermiteField(n, h.ncoef), {}, {}};
  if (!freeze_transport) {
    HermiteField dh(n, h.ncoef);
    for (std::size_t a = 0; a < h.ncoef; ++a) dh.set_component(a, grid.derivative(h.component(a), 1));
    const double scale = -1.0 / params.eps;
    for (int j = 0; j < n; ++j) add_ladder(basis, dh.at(j), LadderKind::MultiplyV, 0, scale, r.transport.at(j));
  }
  for (int j = 0; j < n; ++j) {
    add_ladder(basis, h.at(j), LadderKind::Drift, 0, -(q[j] / rho[j]) / params.eps, r.drag.at(j));
  }
  auto fluid = cns_hyperbolic_rhs(grid, params, rho, q);
  r.d_rho = std::move(fluid.d_rho);
  r.d_q = std::move(fluid.d_momentum);
  return r;
}

// Exponential integrator weights for dc/dt = lambda c + N with lambda = -d/eps^2,
// evaluated by contour averaging, accurate for small |z|.
struct EtdWeights {
  std::vector<double> e, e2, q, f1, f2, f3;
};

EtdWeights etd_weights(int dmax, double dt, double eps) {
  EtdWeights w;
  constexpr int points = 64;
  for (int d = 0; d <= dmax; ++d) {
    const double z = -d * dt / (eps * eps);
    std::complex<double> q, f1, f2, f3;
    for (int k = 0; k < points; ++k) {
      const auto r = z + std::polar(1.0, std::numbers::pi * (k + 0.5) / points);
      const auto er = std::exp(r);
      q += (std::exp(0.5 * r) - 1.0) / r;
      f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / (r * r * r);
      f2 += (2.0 + r + er * (r - 2.0)) / (r * r * r);
      f3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / (r * r * r);
    }
    w.e.push_back(std::exp(z));
    w.e2.push_back(std::exp(0.5 * z));
    w.q.push_back(dt * q.real() / points);
    w.f1.push_back(dt * f1.real() / points);
    w.f2.push_back(dt * f2.real() / points);
    w.f3.push_back(dt * f3.real() / points);
  }
  return w;
}

void apply_filter(const VelocityBasis& basis, HermiteField& h) {
  const int dmax = basis.dim() * (basis.modes() - 1);
  const int cut = static_cast<int>(std::floor(0.9 * dmax));
  if (cut >= dmax) return;
  std::vector<double> sigma(basis.size(), 1.0);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const int d = basis.degree(a);
    if (d > cut) sigma[a] = std::exp(-36.0 * std::pow(double(d - cut) / (dmax - cut), 8));
  }
  for (int j = 0; j < h.nx; ++j) {
    auto c = h.at(j);
    for (std::size_t a = 0; a < c.size(); ++a) c[a] *= sigma[a];
  }
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

KineticState imex_step(const Grid& grid, const VelocityBasis& basis, const KineticState& state, double dt,
                       const KineticOptions& options) {
  const PhysParams& params = state.params;
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(params.eps > 0.0)) throw DomainError("kinetic step requires eps > 0");
  if (!options.freeze_transport) {
    const double limit = max_stable_dt(grid, basis, params.eps, options.cfl);
    if (dt > limit * (1.0 + 1e-12)) {
      throw ConfigError(fmt::format("time step {:.6g} exceeds the transport CFL limit {:.6g}", dt, limit));
    }
  }
  const int n = grid.size();
  const long step_index = state.step + 1;
  if (!all_finite(state.h.data) || !all_finite(state.fluid.rho) || !all_finite(state.fluid.u)) {
    throw DivergenceError(fmt::format("non-finite values entering step {}", step_index), step_index);
  }

  const double eps = params.eps;
  const std::size_t nc = state.h.ncoef;
  const std::size_t i1 = basis.axis_index(0, 1);
  const auto w = etd_weights(basis.dim() * (basis.modes() - 1), dt, eps);
  std::vector<int> deg(nc);
  for (std::size_t a = 0; a < nc; ++a) deg[a] = basis.degree(a);

  // Viscous half step, ETDRK4 on transport + relaxation + drag, viscous half step.
  const ScalarField& rho0 = state.fluid.rho;
  const auto u_half = viscous_substep(grid, params, rho0, state.fluid.u, 0.5 * dt);
  ScalarField q0(n);
  for (int j = 0; j < n; ++j) q0[j] = rho0[j] * u_half[j];
  const HermiteField& h0 = state.h;

  // The fluid takes -eps times the change of c_1 net of free streaming, which
  // keeps mean(rho u) + eps mean(c_1) exact. p is the RK4 quadrature of the
  // streaming rate of c_1, a pure x-derivative.
  auto fluid_stage = [&](const HermiteField& h, std::span<const double> p, std::span<const double> rho_inc,
                         std::span<const double> q_inc, ScalarField& rho, ScalarField& q) {
    rho.resize(n);
    q.resize(n);
    for (int j = 0; j < n; ++j) {
      rho[j] = rho0[j] + rho_inc[j];
      q[j] = q0[j] + q_inc[j] - eps * (h(j, i1) - h0(j, i1) - p[j]);
    }
    require_positive(rho, "fluid density");
  };

  const Rates nu = rates(grid, basis, params, h0, rho0, q0, options.freeze_transport);
  auto total = [&](const Rates& r, std::size_t k) { return r.transport.data[k] + r.drag.data[k]; };

  HermiteField ha(n, nc), hb(n, nc), hc(n, nc), hn(n, nc);
  ScalarField pa(n), pb(n), pc(n), pn(n), inc_r(n), inc_q(n);
  ScalarField rho_a, q_a, rho_b, q_b, rho_c, q_c, rho_n, q_n;

  for (int j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < nc; ++a) {
      const std::size_t k = j * nc + a;
      ha.data[k] = w.e2[deg[a]] * h0.data[k] + w.q[deg[a]] * total(nu, k);
    }
    pa[j] = 0.5 * dt * nu.transport(j, i1);
    inc_r[j] = 0.5 * dt * nu.d_rho[j];
    inc_q[j] = 0.5 * dt * nu.d_q[j];
  }
  fluid_stage(ha, pa, inc_r, inc_q, rho_a, q_a);
  const Rates na = rates(grid, basis, params, ha, rho_a, q_a, options.freeze_transport);

  for (int j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < nc; ++a) {
      const std::size_t k = j * nc + a;
      hb.data[k] = w.e2[deg[a]] * h0.data[k] + w.q[deg[a]] * total(na, k);
    }
    pb[j] = 0.5 * dt * na.transport(j, i1);
    inc_r[j] = 0.5 * dt * na.d_rho[j];
    inc_q[j] = 0.5 * dt * na.d_q[j];
  }
  fluid_stage(hb, pb, inc_r, inc_q, rho_b, q_b);
  const Rates nb = rates(grid, basis, params, hb, rho_b, q_b, options.freeze_transport);

  for (int j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < nc; ++a) {
      const std::size_t k = j * nc + a;
      hc.data[k] = w.e2[deg[a]] * ha.data[k] + w.q[deg[a]] * (2.0 * total(nb, k) - total(nu, k));
    }
    pc[j] = dt * nb.transport(j, i1);
    inc_r[j] = dt * nb.d_rho[j];
    inc_q[j] = dt * nb.d_q[j];
  }
  fluid_stage(hc, pc, inc_r, inc_q, rho_c, q_c);
  const Rates ncr = rates(grid, basis, params, hc, rho_c, q_c, options.freeze_transport);

  for (int j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < nc; ++a) {
      const std::size_t k = j * nc + a;
      const int d = deg[a];
      hn.data[k] = w.e[d] * h0.data[k] + w.f1[d] * total(nu, k) + 2.0 * w.f2[d] * (total(na, k) + total(nb, k)) +
                   w.f3[d] * total(ncr, k);
    }
    pn[j] = dt / 6.0 * (nu.transport(j, i1) + 2.0 * (na.transport(j, i1) + nb.transport(j, i1)) +
                        ncr.transport(j, i1));
    inc_r[j] = dt / 6.0 * (nu.d_rho[j] + 2.0 * (na.d_rho[j] + nb.d_rho[j]) + ncr.d_rho[j]);
    inc_q[j] = dt / 6.0 * (nu.d_q[j] + 2.0 * (na.d_q[j] + nb.d_q[j]) + ncr.d_q[j]);
  }
  fluid_stage(hn, pn, inc_r, inc_q, rho_n, q_n);

  if (options.filter) apply_filter(basis, hn);

  KineticState out;
  out.params = params;
  out.t = state.t + dt;
  out.step = step_index;
  ScalarField u(n);
  for (int j = 0; j < n; ++j) u[j] = q_n[j] / rho_n[j];
  out.fluid.u = viscous_substep(grid, params, rho_n, u, 0.5 * dt);
  out.fluid.rho = std::move(rho_n);
  out.h = std::move(hn);

  if (!all_finite(out.h.data) || !all_finite(out.fluid.rho) || !all_finite(out.fluid.u)) {
    throw DivergenceError(fmt::format("non-finite values produced at step {}", step_index), step_index);
  }
  return out;
}

}  // namespace hydrolimit
