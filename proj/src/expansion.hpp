#pragma once

// Hilbert expansion around the limit system:
//
//   f   = (1 + m0) M + eps [(v u0)(1 + m0) - v d_x m0] M + eps g sqrt(M)
//   u   = u0 + eps u_r
//   rho = 1 + h0 + eps rho_r

#include "fluid_core.hpp"
#include "kinetic_solver.hpp"

namespace hydrolimit {

struct Background {
  HermiteField g0_over_sqrtM;  // (1 + m0) psi_0
  HermiteField g1;             // [(1 + m0) u0 - d_x m0] psi_{e_1}
};

/// First-order background coefficient (1 + m0) u0 - d_x m0.
ScalarField first_order_flux(const Grid& grid, const NssState& nss);

Background build_background(const Grid& grid, const VelocityBasis& basis, const NssState& nss);

struct RemainderState {
  HermiteField g;
  VectorField u;
  ScalarField rho;

  ScalarField a() const { return g.component(0); }
  VectorField b(const VelocityBasis& basis) const { return g.component(basis.axis_index(0, 1)); }
};

RemainderState zero_remainder(const Grid& grid, const VelocityBasis& basis);

/// Composes the kinetic state from the limit state and a remainder. eps = 0
/// is accepted and yields f = (1 + m0) M. Throws ConfigError if the composed
/// fluid density is not positive.
KineticState compose_expansion(const Grid& grid, const VelocityBasis& basis, const NssState& nss,
                               const RemainderState& remainder, const PhysParams& params);

/// Initial data of expansion form; identical to compose_expansion at t = 0.
KineticState well_prepared_initial(const Grid& grid, const VelocityBasis& basis, const NssState& nss_init,
                                   const RemainderState& remainder_init, const PhysParams& params);

/// Inverse of compose_expansion. Throws DomainError for eps = 0.
RemainderState extract_remainder(const Grid& grid, const VelocityBasis& basis, const KineticState& kin,
                                 const NssState& nss);

struct HilbertResidual {
  double r_minus1 = 0.0;  // order 1/eps kinetic balance
  double r_zero = 0.0;    // particle density equation
  double r_mom = 0.0;     // limit momentum equation
  double r_cont = 0.0;    // limit continuity equation
};

/// Residuals with d_t read off the pair (nss0 at t, nss1 at t + dt) and all
/// spatial terms averaged over the pair.
HilbertResidual hilbert_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                 const NssState& nss0, const NssState& nss1, double dt);
/// Pair produced by one nss_step of size dt.
HilbertResidual hilbert_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                 const NssState& nss, double dt = 1e-4);
/// Steady verification: d_t terms set to zero.
HilbertResidual hilbert_residual_steady(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                        const NssState& nss);

struct ConvergenceErrors {
  double err_f = 0.0;
  double err_u = 0.0;
  double err_rho = 0.0;
  /// err_f after removing the known eps g1 sqrt(M) background term.
  double err_f_corrected = 0.0;
};

/// Sup norms over grid nodes (and velocity quadrature nodes for f).
ConvergenceErrors convergence_errors(const Grid& grid, const VelocityBasis& basis, const KineticState& kin,
                                     const NssState& nss);

/// L2 norm over x of a node-major coefficient field: sqrt(dx sum |c|^2).
double field_l2(const Grid& grid, std::span<const double> node_major);

}  // namespace hydrolimit
