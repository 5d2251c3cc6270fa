#include "fluid_core.hpp"

#include <fmt/format.h>

#include <cmath>

#include "errors.hpp"

namespace hydrolimit {

void PhysParams::validate() const {
  if (!(A > 0.0)) throw ConfigError("pressure constant requires A > 0");
  if (!(gamma > 1.0)) throw ConfigError("pressure exponent requires gamma > 1");
  if (!(mu > 0.0)) throw ConfigError("viscosity requires mu > 0");
  if (!(mu + lambda > 0.0)) throw ConfigError("viscosity requires mu + lambda > 0");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("scaling parameter requires 0 < eps <= 1");
}

NssState zero_nss(const Grid& grid) {
  const auto z = constant_field(grid, 0.0);
  return {z, z, z};
}

void require_positive(std::span<const double> density, const char* what) {
  for (std::size_t j = 0; j < density.size(); ++j) {
    if (!(density[j] > 0.0)) {
      throw StateError(fmt::format("{} is not positive at node {} (value {:.6g})", what, j, density[j]));
    }
  }
}

ScalarField pressure(const PhysParams& params, std::span<const double> rho) {
  require_positive(rho, "density");
  ScalarField p(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) p[j] = params.A * std::pow(rho[j], params.gamma);
  return p;
}

VectorField pressure_gradient(const Grid& grid, const PhysParams& params, std::span<const double> rho) {
  return grid.derivative(pressure(params, rho), 1);
}

VectorField lame_apply(const Grid& grid, const PhysParams& params, std::span<const double> u) {
  auto out = grid.derivative(u, 2);
  for (double& x : out) x *= -params.viscosity();
  return out;
}

CnsRates cns_hyperbolic_rhs(const Grid& grid, const PhysParams& params, std::span<const double> rho,
                            std::span<const double> momentum) {
  const int n = grid.size();
  ScalarField flux(n);
  for (int j = 0; j < n; ++j) flux[j] = momentum[j] * momentum[j] / rho[j];
  CnsRates r;
  r.d_rho = grid.derivative(momentum, 1);
  for (double& x : r.d_rho) x = -x;
  ScalarField total(n);
  const auto p = pressure(params, rho);
  for (int j = 0; j < n; ++j) total[j] = flux[j] + p[j];
  r.d_momentum = grid.derivative(total, 1);
  for (double& x : r.d_momentum) x = -x;
  return r;
}

CnsRates cns_rhs(const Grid& grid, const PhysParams& params, const FluidState& fluid,
                 std::span<const double> drag) {
  const int n = grid.size();
  if (static_cast<int>(drag.size()) != n) throw ShapeError("drag field does not match grid");
  require_positive(fluid.rho, "fluid density");
  ScalarField momentum(n);
  for (int j = 0; j < n; ++j) momentum[j] = fluid.rho[j] * fluid.u[j];
  auto r = cns_hyperbolic_rhs(grid, params, fluid.rho, momentum);
  const auto lu = lame_apply(grid, params, fluid.u);
  for (int j = 0; j < n; ++j) r.d_momentum[j] += drag[j] - lu[j];
  return r;
}

namespace {

// Preconditioned conjugate gradients for (diag(rho) - theta d_xx) x = rhs,
// preconditioned by the constant-coefficient operator at mean density.
ScalarField solve_variable_helmholtz(const Grid& grid, std::span<const double> rho, double theta,
                                     std::span<const double> rhs, std::span<const double> guess) {
  const int n = grid.size();
  const double rho_mean = grid.mean(rho);
  std::vector<double> inv_symbol(grid.num_modes());
  for (std::size_t m = 0; m < inv_symbol.size(); ++m) {
    const double k = grid.wavenumbers()[m];
    inv_symbol[m] = 1.0 / (rho_mean + theta * k * k);
  }
  auto apply = [&](std::span<const double> x) {
    auto lap = grid.derivative(x, 2);
    ScalarField y(n);
    for (int j = 0; j < n; ++j) y[j] = rho[j] * x[j] - theta * lap[j];
    return y;
  };
  auto dot = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  ScalarField x(guess.begin(), guess.end());
  ScalarField r(n);
  {
    const auto ax = apply(x);
    for (int j = 0; j < n; ++j) r[j] = rhs[j] - ax[j];
  }
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) return ScalarField(n, 0.0);
  auto z = grid.apply_symbol(r, inv_symbol);
  ScalarField p = z;
  double rz = dot(r, z);
  for (int it = 0; it < 200; ++it) {
    if (std::sqrt(dot(r, r)) <= 1e-15 * rhs_norm) break;
    const auto ap = apply(p);
    const double alpha = rz / dot(p, ap);
    for (int j = 0; j < n; ++j) {
      x[j] += alpha * p[j];
      r[j] -= alpha * ap[j];
    }
    z = grid.apply_symbol(r, inv_symbol);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
  }
  return x;
}

}  // namespace

VectorField viscous_substep(const Grid& grid, const PhysParams& params, std::span<const double> rho,
                            std::span<const double> u, double dt) {
  const int n = grid.size();
  const double theta = 0.5 * dt * params.viscosity();
  const auto lap_old = grid.derivative(u, 2);
  ScalarField rhs(n);
  for (int j = 0; j < n; ++j) rhs[j] = rho[j] * u[j] + theta * lap_old[j];
  const auto u_new = solve_variable_helmholtz(grid, rho, theta, rhs, u);
  // Momentum rebuilt from the discrete flux; its integral is exact.
  ScalarField sum(n);
  for (int j = 0; j < n; ++j) sum[j] = u_new[j] + u[j];
  const auto lap = grid.derivative(sum, 2);
  VectorField out(n);
  for (int j = 0; j < n; ++j) out[j] = (rho[j] * u[j] + theta * lap[j]) / rho[j];
  return out;
}

namespace {

struct NssConservative {
  ScalarField m;
  ScalarField h;
  ScalarField q;  // (1 + h) u
};

NssConservative nss_hyperbolic_rates(const Grid& grid, const PhysParams& params,
                                     const NssConservative& s, bool freeze_velocity,
                                     std::span<const double> frozen_u) {
  const int n = grid.size();
  ScalarField rho(n), u(n);
  for (int j = 0; j < n; ++j) {
    rho[j] = 1.0 + s.h[j];
    u[j] = freeze_velocity ? frozen_u[j] : s.q[j] / rho[j];
  }
  require_positive(rho, "limit fluid density 1 + h0");
  ScalarField fm(n), fh(n);
  for (int j = 0; j < n; ++j) {
    fm[j] = (1.0 + s.m[j]) * u[j];
    fh[j] = rho[j] * u[j];
  }
  NssConservative r;
  r.m = grid.derivative(fm, 1);
  r.h = grid.derivative(fh, 1);
  for (int j = 0; j < n; ++j) {
    r.m[j] = -r.m[j];
    r.h[j] = -r.h[j];
  }
  if (freeze_velocity) {
    r.q.assign(n, 0.0);
  } else {
    const auto p = pressure(params, rho);
    ScalarField total(n);
    for (int j = 0; j < n; ++j) total[j] = s.q[j] * u[j] + p[j] + s.m[j];
    r.q = grid.derivative(total, 1);
    for (double& x : r.q) x = -x;
  }
  return r;
}

void heat_substep(const Grid& grid, ScalarField& m, double dt) {
  std::vector<double> symbol(grid.num_modes());
  for (std::size_t i = 0; i < symbol.size(); ++i) {
    const double k = grid.wavenumbers()[i];
    symbol[i] = std::exp(-k * k * dt);
  }
  m = grid.apply_symbol(m, symbol);
}

}  // namespace

NssState nss_step(const Grid& grid, const PhysParams& params, const NssState& nss, double dt,
                  const NssOptions& options) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const int n = grid.size();
  NssState s = nss;
  ScalarField rho(n);
  auto refresh_rho = [&] {
    for (int j = 0; j < n; ++j) rho[j] = 1.0 + s.h0[j];
    require_positive(rho, "limit fluid density 1 + h0");
  };
  refresh_rho();

  heat_substep(grid, s.m0, 0.5 * dt);
  if (!options.freeze_velocity) s.u0 = viscous_substep(grid, params, rho, s.u0, 0.5 * dt);

  NssConservative c0{s.m0, s.h0, ScalarField(n)};
  for (int j = 0; j < n; ++j) c0.q[j] = rho[j] * s.u0[j];
  const auto r0 = nss_hyperbolic_rates(grid, params, c0, options.freeze_velocity, nss.u0);
  NssConservative c1 = c0;
  for (int j = 0; j < n; ++j) {
    c1.m[j] += dt * r0.m[j];
    c1.h[j] += dt * r0.h[j];
    c1.q[j] += dt * r0.q[j];
  }
  const auto r1 = nss_hyperbolic_rates(grid, params, c1, options.freeze_velocity, nss.u0);
  for (int j = 0; j < n; ++j) {
    s.m0[j] = 0.5 * (c0.m[j] + c1.m[j] + dt * r1.m[j]);
    s.h0[j] = 0.5 * (c0.h[j] + c1.h[j] + dt * r1.h[j]);
    const double q = 0.5 * (c0.q[j] + c1.q[j] + dt * r1.q[j]);
    if (!options.freeze_velocity) s.u0[j] = q / (1.0 + s.h0[j]);
  }
  refresh_rho();

  if (!options.freeze_velocity) s.u0 = viscous_substep(grid, params, rho, s.u0, 0.5 * dt);
  heat_substep(grid, s.m0, 0.5 * dt);
  return s;
}

NssRates nss_rates(const Grid& grid, const PhysParams& params, const NssState& nss) {
  const int n = grid.size();
  ScalarField rho(n), fm(n), fh(n), total(n);
  for (int j = 0; j < n; ++j) {
    rho[j] = 1.0 + nss.h0[j];
    fm[j] = (1.0 + nss.m0[j]) * nss.u0[j];
    fh[j] = rho[j] * nss.u0[j];
  }
  const auto p = pressure(params, rho);
  for (int j = 0; j < n; ++j) total[j] = p[j] + nss.m0[j];
  const auto dfm = grid.derivative(fm, 1);
  const auto dfh = grid.derivative(fh, 1);
  const auto m_xx = grid.derivative(nss.m0, 2);
  const auto u_x = grid.derivative(nss.u0, 1);
  const auto force = grid.derivative(total, 1);
  const auto lu = lame_apply(grid, params, nss.u0);
  NssRates r{ScalarField(n), VectorField(n), ScalarField(n)};
  for (int j = 0; j < n; ++j) {
    r.dm0[j] = m_xx[j] - dfm[j];
    r.dh0[j] = -dfh[j];
    r.du0[j] = -nss.u0[j] * u_x[j] - (force[j] + lu[j]) / rho[j];
  }
  return r;
}

}  // namespace hydrolimit
