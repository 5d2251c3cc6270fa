#include "expansion.hpp"

#include <cmath>

#include "errors.hpp"

namespace hydrolimit {

double field_l2(const Grid& grid, std::span<const double> node_major) {
  double s = 0.0;
  for (double x : node_major) s += x * x;
  return std::sqrt(s * grid.spacing());
}

ScalarField first_order_flux(const Grid& grid, const NssState& nss) {
  const auto mx = grid.derivative(nss.m0, 1);
  ScalarField out(grid.size());
  for (int j = 0; j < grid.size(); ++j) out[j] = (1.0 + nss.m0[j]) * nss.u0[j] - mx[j];
  return out;
}

Background build_background(const Grid& grid, const VelocityBasis& basis, const NssState& nss) {
  Background bg{make_field(grid, basis), make_field(grid, basis)};
  const auto flux = first_order_flux(grid, nss);
  const std::size_t i1 = basis.axis_index(0, 1);
  for (int j = 0; j < grid.size(); ++j) {
    bg.g0_over_sqrtM(j, 0) = 1.0 + nss.m0[j];
    bg.g1(j, i1) = flux[j];
  }
  return bg;
}

RemainderState zero_remainder(const Grid& grid, const VelocityBasis& basis) {
  return {make_field(grid, basis), constant_field(grid, 0.0), constant_field(grid, 0.0)};
}

namespace {

void check_shapes(const Grid& grid, const VelocityBasis& basis, const NssState& nss) {
  const std::size_t n = grid.size();
  if (nss.m0.size() != n || nss.u0.size() != n || nss.h0.size() != n) {
    throw ShapeError("limit state does not match grid");
  }
  (void)basis;
}

}  // namespace

KineticState compose_expansion(const Grid& grid, const VelocityBasis& basis, const NssState& nss,
                               const RemainderState& remainder, const PhysParams& params) {
  check_shapes(grid, basis, nss);
  const double eps = params.eps;
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("expansion requires 0 <= eps <= 1");
  const int n = grid.size();
  if (remainder.g.nx != n || remainder.g.ncoef != basis.size() || static_cast<int>(remainder.u.size()) != n ||
      static_cast<int>(remainder.rho.size()) != n) {
    throw ShapeError("remainder does not match grid and basis");
  }
  const auto bg = build_background(grid, basis, nss);
  KineticState s;
  s.params = params;
  s.h = make_field(grid, basis);
  for (std::size_t i = 0; i < s.h.data.size(); ++i) {
    s.h.data[i] = bg.g0_over_sqrtM.data[i] + eps * bg.g1.data[i] + eps * remainder.g.data[i];
  }
  s.fluid.u.resize(n);
  s.fluid.rho.resize(n);
  for (int j = 0; j < n; ++j) {
    s.fluid.u[j] = nss.u0[j] + eps * remainder.u[j];
    s.fluid.rho[j] = 1.0 + nss.h0[j] + eps * remainder.rho[j];
  }
  for (int j = 0; j < n; ++j) {
    if (!(s.fluid.rho[j] > 0.0)) throw ConfigError("composed fluid density is not positive");
  }
  return s;
}

KineticState well_prepared_initial(const Grid& grid, const VelocityBasis& basis, const NssState& nss_init,
                                   const RemainderState& remainder_init, const PhysParams& params) {
  for (double h : nss_init.h0) {
    if (!(1.0 + h > 0.0)) throw ConfigError("initial limit density 1 + h0 must be positive");
  }
  return compose_expansion(grid, basis, nss_init, remainder_init, params);
}

RemainderState extract_remainder(const Grid& grid, const VelocityBasis& basis, const KineticState& kin,
                                 const NssState& nss) {
  check_shapes(grid, basis, nss);
  const double eps = kin.params.eps;
  if (!(eps > 0.0)) throw DomainError("remainder extraction requires eps > 0");
  const int n = grid.size();
  if (kin.h.nx != n || kin.h.ncoef != basis.size()) throw ShapeError("kinetic state does not match grid and basis");
  const auto bg = build_background(grid, basis, nss);
  RemainderState r{make_field(grid, basis), VectorField(n), ScalarField(n)};
  for (std::size_t i = 0; i < r.g.data.size(); ++i) {
    r.g.data[i] = (kin.h.data[i] - bg.g0_over_sqrtM.data[i] - eps * bg.g1.data[i]) / eps;
  }
  for (int j = 0; j < n; ++j) {
    r.u[j] = (kin.fluid.u[j] - nss.u0[j]) / eps;
    r.rho[j] = (kin.fluid.rho[j] - (1.0 + nss.h0[j])) / eps;
  }
  return r;
}

namespace {

// Spatial parts of the order-by-order equations at one instant.
struct HilbertTerms {
  std::vector<double> kinetic;  // v d_x f0 + div_v(u0 f0) - div_v[M grad_v(f1/M)], over sqrt(M)
  ScalarField particle;         // d_x(n0 u0) - d_xx n0
  ScalarField momentum;         // d_x(rho0 u0^2) + d_x P(rho0) + L u0 + d_x n0
  ScalarField continuity;       // d_x(rho0 u0)
};

HilbertTerms hilbert_terms(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                           const NssState& nss) {
  const int n = grid.size();
  const std::size_t nc = basis.size();
  const auto flux = first_order_flux(grid, nss);
  const auto mx = grid.derivative(nss.m0, 1);
  const std::size_t i1 = basis.axis_index(0, 1);

  HilbertTerms t;
  t.kinetic.assign(n * nc, 0.0);
  Coeffs f0x(nc), f0(nc), f1(nc);
  for (int j = 0; j < n; ++j) {
    std::fill(f0x.begin(), f0x.end(), 0.0);
    std::fill(f0.begin(), f0.end(), 0.0);
    std::fill(f1.begin(), f1.end(), 0.0);
    f0x[0] = mx[j];
    f0[0] = 1.0 + nss.m0[j];
    f1[i1] = flux[j];
    std::span<double> out(t.kinetic.data() + j * nc, nc);
    add_ladder(basis, f0x, LadderKind::MultiplyV, 0, 1.0, out);
    add_ladder(basis, f0, LadderKind::Drift, 0, nss.u0[j], out);
    const auto lf1 = apply_L(basis, f1);
    for (std::size_t a = 0; a < nc; ++a) out[a] += lf1[a];
  }

  ScalarField rho(n), nu(n), ru(n), ruu(n);
  for (int j = 0; j < n; ++j) {
    rho[j] = 1.0 + nss.h0[j];
    nu[j] = (1.0 + nss.m0[j]) * nss.u0[j];
    ru[j] = rho[j] * nss.u0[j];
  }
  const auto p = pressure(params, rho);
  for (int j = 0; j < n; ++j) ruu[j] = ru[j] * nss.u0[j] + p[j] + nss.m0[j];
  const auto mxx = grid.derivative(nss.m0, 2);
  t.particle = grid.derivative(nu, 1);
  for (int j = 0; j < n; ++j) t.particle[j] -= mxx[j];
  t.momentum = grid.derivative(ruu, 1);
  const auto lu = lame_apply(grid, params, nss.u0);
  for (int j = 0; j < n; ++j) t.momentum[j] += lu[j];
  t.continuity = grid.derivative(ru, 1);
  return t;
}

HilbertResidual assemble(const Grid& grid, const HilbertTerms& a, const HilbertTerms& b, double wa, double wb,
                         std::span<const double> dn, std::span<const double> dq, std::span<const double> dr) {
  const int n = grid.size();
  std::vector<double> k(a.kinetic.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = wa * a.kinetic[i] + wb * b.kinetic[i];
  ScalarField rz(n), rm(n), rc(n);
  for (int j = 0; j < n; ++j) {
    rz[j] = dn[j] + wa * a.particle[j] + wb * b.particle[j];
    rm[j] = dq[j] + wa * a.momentum[j] + wb * b.momentum[j];
    rc[j] = dr[j] + wa * a.continuity[j] + wb * b.continuity[j];
  }
  return {field_l2(grid, k), field_l2(grid, rz), field_l2(grid, rm), field_l2(grid, rc)};
}

}  // namespace

HilbertResidual hilbert_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                 const NssState& nss0, const NssState& nss1, double dt) {
  if (!(dt > 0.0)) throw ConfigError("residual time step must be positive");
  check_shapes(grid, basis, nss0);
  check_shapes(grid, basis, nss1);
  const int n = grid.size();
  const auto t0 = hilbert_terms(grid, basis, params, nss0);
  const auto t1 = hilbert_terms(grid, basis, params, nss1);
  ScalarField dn(n), dq(n), dr(n);
  for (int j = 0; j < n; ++j) {
    dn[j] = (nss1.m0[j] - nss0.m0[j]) / dt;
    dq[j] = ((1.0 + nss1.h0[j]) * nss1.u0[j] - (1.0 + nss0.h0[j]) * nss0.u0[j]) / dt;
    dr[j] = (nss1.h0[j] - nss0.h0[j]) / dt;
  }
  return assemble(grid, t0, t1, 0.5, 0.5, dn, dq, dr);
}

HilbertResidual hilbert_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                 const NssState& nss, double dt) {
  const auto next = nss_step(grid, params, nss, dt);
  return hilbert_residual(grid, basis, params, nss, next, dt);
}

HilbertResidual hilbert_residual_steady(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                        const NssState& nss) {
  check_shapes(grid, basis, nss);
  const auto t0 = hilbert_terms(grid, basis, params, nss);
  const ScalarField zero(grid.size(), 0.0);
  return assemble(grid, t0, t0, 1.0, 0.0, zero, zero, zero);
}

ConvergenceErrors convergence_errors(const Grid& grid, const VelocityBasis& basis, const KineticState& kin,
                                     const NssState& nss) {
  check_shapes(grid, basis, nss);
  const int n = grid.size();
  const std::size_t np = basis.num_points();
  std::vector<double> sqrt_m(np);
  for (std::size_t p = 0; p < np; ++p) sqrt_m[p] = std::sqrt(maxwellian(basis, basis.point(p)));
  const auto flux = first_order_flux(grid, nss);
  const std::size_t i1 = basis.axis_index(0, 1);
  const double eps = kin.params.eps;

  ConvergenceErrors e;
  Coeffs diff(basis.size());
  for (int j = 0; j < n; ++j) {
    auto c = kin.h.at(j);
    std::copy(c.begin(), c.end(), diff.begin());
    diff[0] -= 1.0 + nss.m0[j];
    const auto raw = basis.synthesize_at_nodes(diff);
    diff[i1] -= eps * flux[j];
    const auto corrected = basis.synthesize_at_nodes(diff);
    for (std::size_t p = 0; p < np; ++p) {
      e.err_f = std::max(e.err_f, std::abs(raw[p]) * sqrt_m[p]);
      e.err_f_corrected = std::max(e.err_f_corrected, std::abs(corrected[p]) * sqrt_m[p]);
    }
    e.err_u = std::max(e.err_u, std::abs(kin.fluid.u[j] - nss.u0[j]));
    e.err_rho = std::max(e.err_rho, std::abs(kin.fluid.rho[j] - 1.0 - nss.h0[j]));
  }
  return e;
}

}  // namespace hydrolimit
