#include <cmath>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace hydrolimit {

ScalarField pressure_remainder(const Grid& grid, const PhysParams& params, std::span<const double> h0,
                               std::span<const double> rho) {
  const int n = grid.size();
  ScalarField base(n), full(n);
  for (int j = 0; j < n; ++j) {
    base[j] = 1.0 + h0[j];
    full[j] = base[j] + params.eps * rho[j];
  }
  const auto p_full = pressure(params, full);
  const auto p_base = pressure(params, base);
  ScalarField diff(n);
  for (int j = 0; j < n; ++j) diff[j] = p_full[j] - p_base[j];
  auto out = grid.derivative(diff, 1);
  for (double& x : out) x = -x;
  return out;
}

ScalarField pressure_defect(const Grid& grid, const PhysParams& params, std::span<const double> h0,
                            std::span<const double> rho, double eps, int alpha) {
  if (alpha < 0 || alpha > 4) throw ConfigError("pressure defect order must lie in [0, 4]");
  const int n = grid.size();
  if (static_cast<int>(h0.size()) != n || static_cast<int>(rho.size()) != n) {
    throw ShapeError("pressure defect fields do not match grid");
  }
  const double g = params.gamma;
  ScalarField full(n), base(n), pf(n), pb(n), lever(n);
  for (int j = 0; j < n; ++j) {
    base[j] = 1.0 + h0[j];
    full[j] = base[j] + eps * rho[j];
  }
  require_positive(full, "density 1 + h0 + eps rho");
  require_positive(base, "density 1 + h0");
  for (int j = 0; j < n; ++j) {
    pf[j] = std::pow(full[j], g);
    pb[j] = std::pow(base[j], g);
    lever[j] = g * eps * std::pow(full[j], g - 1.0);
  }
  const auto dpf = grid.derivative(pf, alpha);
  const auto dpb = grid.derivative(pb, alpha);
  const auto drho = grid.derivative(rho, alpha);
  ScalarField out(n);
  for (int j = 0; j < n; ++j) out[j] = dpf[j] - dpb[j] - lever[j] * drho[j];
  return out;
}

namespace {

void check_pair(const PhysParams& params, const RemainderPair& pair) {
  if (!(params.eps > 0.0)) throw DomainError("remainder residuals require eps > 0");
  if (!(pair.dt > 0.0)) throw ConfigError("residual time step must be positive");
}

// Spatial (non time-derivative) terms of the remainder equations at one instant.
struct RemainderTerms {
  std::vector<double> g;  // -(1/eps) u psi_1 + (1/eps^2) L g - (1/eps) R0 - R1 (without -d_t g1)
  ScalarField u;          // (1+h0+eps rho)(u0 u_x + u d_x u0) + L u - (1/eps)(b - eps u) - (1/eps) R2 - R3'
  ScalarField rho;        // d_x(h0 u + rho u0) + d_x u + eps d_x(rho u)
  ScalarField weight;     // 1 + h0 + eps rho
};

RemainderTerms remainder_terms(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                               const RemainderState& r, const NssState& s) {
  const int n = grid.size();
  const std::size_t nc = basis.size();
  const double eps = params.eps;
  const std::size_t i1 = basis.axis_index(0, 1);
  const auto G = first_order_flux(grid, s);
  const auto Gx = grid.derivative(G, 1);
  HermiteField gx(n, nc);
  for (std::size_t a = 0; a < nc; ++a) gx.set_component(a, grid.derivative(r.g.component(a), 1));

  RemainderTerms t;
  t.g.assign(n * nc, 0.0);
  Coeffs g1(nc), g1x(nc), r0(nc), r1(nc);
  for (int j = 0; j < n; ++j) {
    std::fill(g1.begin(), g1.end(), 0.0);
    std::fill(g1x.begin(), g1x.end(), 0.0);
    std::fill(r0.begin(), r0.end(), 0.0);
    std::fill(r1.begin(), r1.end(), 0.0);
    g1[i1] = G[j];
    g1x[i1] = Gx[j];
    const auto gj = r.g.at(j);
    // R0
    add_ladder(basis, g1x, LadderKind::MultiplyV, 0, -1.0, r0);
    r0[0] = 0.0;  // (I - P0) on v d_x g1
    add_ladder(basis, gx.at(j), LadderKind::MultiplyV, 0, -1.0, r0);
    add_ladder(basis, g1, LadderKind::Drift, 0, -s.u0[j], r0);
    add_ladder(basis, gj, LadderKind::Drift, 0, -s.u0[j], r0);
    r0[i1] += r.u[j] * s.m0[j];
    // R1 without the time derivative of g1
    add_ladder(basis, g1, LadderKind::Drift, 0, -r.u[j], r1);
    add_ladder(basis, gj, LadderKind::Drift, 0, -r.u[j], r1);

    const auto lg = apply_L(basis, gj);
    double* out = t.g.data() + j * nc;
    for (std::size_t a = 0; a < nc; ++a) out[a] = lg[a] / (eps * eps) - r0[a] / eps - r1[a];
    out[i1] -= r.u[j] / eps;
  }

  const auto ux = grid.derivative(r.u, 1);
  const auto u0x = grid.derivative(s.u0, 1);
  const auto lu = lame_apply(grid, params, r.u);
  const auto r2 = pressure_remainder(grid, params, s.h0, r.rho);
  const auto b = r.b(basis);
  const auto a = r.a();
  t.u.resize(n);
  t.weight.resize(n);
  ScalarField flux(n);
  for (int j = 0; j < n; ++j) {
    const double w = 1.0 + s.h0[j] + eps * r.rho[j];
    t.weight[j] = w;
    // R3 without rho d_t u0
    const double r3 = -((r.rho[j] * s.u0[j] * u0x[j] + r.u[j] * s.m0[j] + s.u0[j] * a[j]) +
                        eps * (r.u[j] * ux[j] + s.h0[j] * r.u[j] * ux[j] + r.u[j] * a[j]) +
                        eps * eps * r.rho[j] * r.u[j] * ux[j]);
    t.u[j] = w * (s.u0[j] * ux[j] + r.u[j] * u0x[j]) + lu[j] - (b[j] - eps * r.u[j]) / eps - r2[j] / eps - r3;
    flux[j] = s.h0[j] * r.u[j] + r.rho[j] * s.u0[j] + r.u[j] + eps * r.rho[j] * r.u[j];
  }
  t.rho = grid.derivative(flux, 1);
  return t;
}

}  // namespace

RemainderResidual remainder_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                     const RemainderPair& pair) {
  check_pair(params, pair);
  const int n = grid.size();
  const std::size_t nc = basis.size();
  const double dt = pair.dt;
  const std::size_t i1 = basis.axis_index(0, 1);
  const auto t0 = remainder_terms(grid, basis, params, pair.r0, pair.n0);
  const auto t1 = remainder_terms(grid, basis, params, pair.r1, pair.n1);
  const auto G0 = first_order_flux(grid, pair.n0);
  const auto G1 = first_order_flux(grid, pair.n1);

  std::vector<double> rg(n * nc);
  for (std::size_t i = 0; i < rg.size(); ++i) {
    rg[i] = (pair.r1.g.data[i] - pair.r0.g.data[i]) / dt + 0.5 * (t0.g[i] + t1.g[i]);
  }
  for (int j = 0; j < n; ++j) rg[j * nc + i1] += (G1[j] - G0[j]) / dt;  // -R1 contains -d_t g1

  ScalarField ru(n), rr(n);
  for (int j = 0; j < n; ++j) {
    const double w = 0.5 * (t0.weight[j] + t1.weight[j]);
    const double rho_avg = 0.5 * (pair.r0.rho[j] + pair.r1.rho[j]);
    const double du = (pair.r1.u[j] - pair.r0.u[j]) / dt;
    const double du0 = (pair.n1.u0[j] - pair.n0.u0[j]) / dt;
    ru[j] = w * du + rho_avg * du0 + 0.5 * (t0.u[j] + t1.u[j]);
    rr[j] = (pair.r1.rho[j] - pair.r0.rho[j]) / dt + 0.5 * (t0.rho[j] + t1.rho[j]);
  }
  return {field_l2(grid, rg), field_l2(grid, ru), field_l2(grid, rr)};
}

namespace {

struct AbTerms {
  ScalarField a, b, gam;  // gam = Gamma_11((I - P) g)
  ScalarField cont;       // d_x b
  ScalarField mom;        // (1/eps) d_x a + (1/eps^2)(b - eps u) + (1/eps) d_x Gamma - (1/eps) R4 - u a
  ScalarField stress;     // (2/eps) d_x b - 2 (u0/eps + u) b + (2/eps^2) Gamma - Gamma(l)
};

AbTerms ab_terms(const Grid& grid, const VelocityBasis& basis, const PhysParams& params, const RemainderState& r,
                 const NssState& s) {
  const int n = grid.size();
  const std::size_t nc = basis.size();
  const double eps = params.eps;
  const std::size_t i1 = basis.axis_index(0, 1);
  const auto G = first_order_flux(grid, s);
  const auto Gx = grid.derivative(G, 1);

  HermiteField micro = r.g;
  for (int j = 0; j < n; ++j) remove_macro(basis, micro.at(j));
  HermiteField micro_x(n, nc);
  for (std::size_t a = 0; a < nc; ++a) micro_x.set_component(a, grid.derivative(micro.component(a), 1));

  AbTerms t;
  t.a = r.a();
  t.b = r.b(basis);
  t.gam.resize(n);
  ScalarField gam_l(n);
  Coeffs g1(nc), g1x(nc), l(nc), inner(nc);
  for (int j = 0; j < n; ++j) {
    t.gam[j] = gamma_moment(basis, micro.at(j), 0, 0);
    std::fill(g1.begin(), g1.end(), 0.0);
    std::fill(g1x.begin(), g1x.end(), 0.0);
    std::fill(inner.begin(), inner.end(), 0.0);
    std::fill(l.begin(), l.end(), 0.0);
    g1[i1] = G[j];
    g1x[i1] = Gx[j];
    add_ladder(basis, g1x, LadderKind::MultiplyV, 0, 1.0, inner);
    inner[0] = 0.0;
    add_ladder(basis, micro_x.at(j), LadderKind::MultiplyV, 0, 1.0, inner);
    add_ladder(basis, g1, LadderKind::Drift, 0, s.u0[j], inner);
    for (std::size_t a = 0; a < nc; ++a) l[a] = -inner[a] / eps;
    add_ladder(basis, g1, LadderKind::Drift, 0, -r.u[j], l);
    gam_l[j] = gamma_moment(basis, l, 0, 0);
  }
  t.cont = grid.derivative(t.b, 1);
  const auto ax = grid.derivative(t.a, 1);
  const auto gx = grid.derivative(t.gam, 1);
  t.mom.resize(n);
  t.stress.resize(n);
  for (int j = 0; j < n; ++j) {
    const double r4 = s.u0[j] * t.a[j] + r.u[j] * s.m0[j];
    t.mom[j] = ax[j] / eps + (t.b[j] - eps * r.u[j]) / (eps * eps) + gx[j] / eps - r4 / eps - r.u[j] * t.a[j];
    t.stress[j] = 2.0 / eps * t.cont[j] - 2.0 * (s.u0[j] / eps + r.u[j]) * t.b[j] +
                  2.0 / (eps * eps) * t.gam[j] - gam_l[j];
  }
  return t;
}

}  // namespace

AbResidual ab_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                       const RemainderPair& pair) {
  check_pair(params, pair);
  const int n = grid.size();
  const double dt = pair.dt;
  const double eps = params.eps;
  const auto t0 = ab_terms(grid, basis, params, pair.r0, pair.n0);
  const auto t1 = ab_terms(grid, basis, params, pair.r1, pair.n1);
  ScalarField um0(n), um1(n), mx0, mx1;
  for (int j = 0; j < n; ++j) {
    um0[j] = pair.n0.u0[j] * pair.n0.m0[j];
    um1[j] = pair.n1.u0[j] * pair.n1.m0[j];
  }
  mx0 = grid.derivative(pair.n0.m0, 1);
  mx1 = grid.derivative(pair.n1.m0, 1);

  ScalarField rc(n), rm(n), rs(n);
  for (int j = 0; j < n; ++j) {
    rc[j] = eps * (t1.a[j] - t0.a[j]) / dt + 0.5 * (t0.cont[j] + t1.cont[j]);
    // R5 without the u a term, which sits in AbTerms::mom.
    const double r5 = -((um1[j] - um0[j]) + (pair.n1.u0[j] - pair.n0.u0[j]) - (mx1[j] - mx0[j])) / dt;
    rm[j] = (t1.b[j] - t0.b[j]) / dt + 0.5 * (t0.mom[j] + t1.mom[j]) - r5;
    rs[j] = (t1.gam[j] - t0.gam[j]) / dt + 0.5 * (t0.stress[j] + t1.stress[j]);
  }
  return {field_l2(grid, rc), field_l2(grid, rm), field_l2(grid, rs)};
}

}  // namespace hydrolimit
