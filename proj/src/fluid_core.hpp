#pragma once

// Compressible Navier-Stokes building blocks in one space dimension and the
// time stepper of the Navier-Stokes-Smoluchowski limit system, written in
// perturbation variables m0 = n0 - 1, h0 = rho0 - 1:
//
//   d_t m0 + d_x[(1 + m0) u0] = d_xx m0
//   d_t[(1 + h0) u0] + d_x[(1 + h0) u0^2] + d_x P(1 + h0) + L u0 + d_x m0 = 0
//   d_t h0 + d_x[(1 + h0) u0] = 0
//
// with P(rho) = A rho^gamma and L u = -(2 mu + lambda) d_xx u.

#include "spatial_grid.hpp"

namespace hydrolimit {

struct PhysParams {
  double A = 1.0;
  double gamma = 2.0;
  double mu = 1.0;
  double lambda = 0.0;
  double eps = 0.1;

  /// Longitudinal viscosity 2 mu + lambda of the one-dimensional Lame operator.
  double viscosity() const noexcept { return 2.0 * mu + lambda; }
  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

struct FluidState {
  ScalarField rho;
  VectorField u;
};

struct NssState {
  ScalarField m0;
  VectorField u0;
  ScalarField h0;
};

NssState zero_nss(const Grid& grid);

ScalarField pressure(const PhysParams& params, std::span<const double> rho);
VectorField pressure_gradient(const Grid& grid, const PhysParams& params, std::span<const double> rho);

/// L u = -mu u_xx - (mu + lambda) (div u)_x, i.e. -(2 mu + lambda) u_xx in 1D.
VectorField lame_apply(const Grid& grid, const PhysParams& params, std::span<const double> u);

struct CnsRates {
  ScalarField d_rho;
  VectorField d_momentum;
};

/// Conservative-form time derivatives of rho and rho u with the given drag force.
CnsRates cns_rhs(const Grid& grid, const PhysParams& params, const FluidState& fluid,
                 std::span<const double> drag);
/// Same without the viscous and drag terms.
CnsRates cns_hyperbolic_rhs(const Grid& grid, const PhysParams& params, std::span<const double> rho,
                            std::span<const double> momentum);

/// Crank-Nicolson step of rho u_t = (2 mu + lambda) u_xx at frozen rho. The
/// returned velocity conserves the integral of rho u exactly.
VectorField viscous_substep(const Grid& grid, const PhysParams& params, std::span<const double> rho,
                            std::span<const double> u, double dt);

struct NssOptions {
  /// Keep u0 fixed (pure advection-diffusion of m0 and transport of h0).
  bool freeze_velocity = false;
};

/// Strang splitting: exact heat flow for m0 and Crank-Nicolson for the Lame
/// term around an SSP-RK2 step of the transport, pressure and coupling terms.
NssState nss_step(const Grid& grid, const PhysParams& params, const NssState& nss, double dt,
                  const NssOptions& options = {});

struct NssRates {
  ScalarField dm0;
  VectorField du0;  // non-conservative d_t u0
  ScalarField dh0;
};

/// Time derivatives read off the NSS equations themselves.
NssRates nss_rates(const Grid& grid, const PhysParams& params, const NssState& nss);

/// Throws StateError when some node has value <= 0.
void require_positive(std::span<const double> density, const char* what);

}  // namespace hydrolimit
