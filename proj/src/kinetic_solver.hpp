#pragma once

// IMEX stepper for the scaled kinetic-fluid system in Hermite coefficients
// h = f / sqrt(M):
//
//   d_t h + (1/eps) v d_x h = -(1/eps^2) L h - (u/eps) (d_v - v/2) h
//   d_t rho + d_x(rho u) = 0
//   d_t(rho u) + d_x(rho u^2) + d_x P(rho) + L u = (1/eps)(c_1 - eps u c_0)

#include <cstddef>
#include <span>

#include "fluid_core.hpp"
#include "spatial_grid.hpp"
#include "velocity_basis.hpp"

namespace hydrolimit {

/// Hermite coefficients of one velocity profile per grid node, node-major.
struct HermiteField {
  int nx = 0;
  std::size_t ncoef = 0;
  std::vector<double> data;

  HermiteField() = default;
  HermiteField(int nodes, std::size_t coefficients)
      : nx(nodes), ncoef(coefficients), data(static_cast<std::size_t>(nodes) * coefficients, 0.0) {}

  std::span<double> at(int j) { return {data.data() + j * ncoef, ncoef}; }
  std::span<const double> at(int j) const { return {data.data() + j * ncoef, ncoef}; }
  double& operator()(int j, std::size_t alpha) { return data[j * ncoef + alpha]; }
  double operator()(int j, std::size_t alpha) const { return data[j * ncoef + alpha]; }

  /// Coefficient alpha as a spatial field.
  ScalarField component(std::size_t alpha) const;
  void set_component(std::size_t alpha, std::span<const double> values);
};

HermiteField make_field(const Grid& grid, const VelocityBasis& basis);

struct KineticState {
  HermiteField h;
  FluidState fluid;
  double t = 0.0;
  long step = 0;
  PhysParams params;
};

struct KineticOptions {
  /// Safety factor c in dt <= c eps dx / sqrt(2N).
  double cfl = 0.5;
  /// Skip the free-streaming term (relaxation tests).
  bool freeze_transport = false;
  /// Exponential damping of the top 10% of Hermite degrees.
  bool filter = false;
};

/// Largest dt allowed by the transport CFL condition.
double max_stable_dt(const Grid& grid, const VelocityBasis& basis, double eps, double cfl = 0.5);

/// (M, u = 0, rho = 1) on the grid.
KineticState equilibrium_state(const Grid& grid, const VelocityBasis& basis, const PhysParams& params);

struct KineticMoments {
  ScalarField density;   // c_0
  ScalarField momentum;  // c_{e_1}
};

KineticMoments kinetic_moments(const VelocityBasis& basis, const KineticState& state);

/// (1/eps)(c_1 - eps u c_0) per node.
VectorField drag_source(const VelocityBasis& basis, const KineticState& state);

/// One step: Crank-Nicolson viscosity over dt/2, an exponential RK4 (ETDRK4)
/// step in which the diagonal relaxation is integrated exactly and free
/// streaming, drag and the fluid hyperbolic terms are explicit, then viscosity
/// over dt/2 again.
KineticState imex_step(const Grid& grid, const VelocityBasis& basis, const KineticState& state, double dt,
                       const KineticOptions& options = {});

struct ConservedTotals {
  double mass_kinetic = 0.0;
  double mass_fluid = 0.0;
  double momentum = 0.0;  // mean(rho u) + eps mean(c_1)
};

ConservedTotals conserved_totals(const Grid& grid, const VelocityBasis& basis, const KineticState& state);

}  // namespace hydrolimit
