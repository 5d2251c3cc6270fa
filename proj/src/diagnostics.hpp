#pragma once

// Energy and dissipation functionals, remainder-system residuals and the
// pressure Taylor defect.
//
// Orders: K = order_x caps spatial derivatives of the remainder, order_v caps
// velocity derivatives. Limit-state norms use min(6, K + 2) for m0 and
// min(5, K + 1) for u0, h0.

#include <array>
#include <span>

#include "expansion.hpp"

namespace hydrolimit {

struct DiagConfig {
  int order_x = 4;
  int order_v = 1;
  double K1 = 1.0;
  std::array<double, 6> K1_alpha{1, 1, 1, 1, 1, 1};  // index |alpha| = 1..5
  std::array<double, 6> K2_alpha{1, 1, 1, 1, 1, 1};  // index |alpha| = 0..4
  std::array<double, 6> K3_alpha{1, 1, 1, 1, 1, 1};  // index |alpha| = 1..5
  std::array<double, 6> lambda{1, 1, 1, 1, 1, 1};    // lambda_1..lambda_6
  double cbar = 1.0;                                 // uniform C_{alpha,beta}
  double c0_empirical = 0.0;                         // 0 when not measured

  /// Throws ConfigError: orders in [0, 6] x [0, 4], all weights > 0.
  void validate() const;
  int macro_m_order() const;  // min(6, K + 2)
  int macro_u_order() const;  // min(5, K + 1)
};

struct MacroEnergy {
  double E_ma = 0.0;       // perturbation energy (baseline removed)
  double baseline = 0.0;   // K1 2A/(gamma-1) L, the equilibrium value of the entropy block
  double D_ma = 0.0;
  double cross = 0.0;      // signed K3 cross term (included in E_ma)
};

MacroEnergy macro_energy(const Grid& grid, const PhysParams& params, const DiagConfig& cfg, const NssState& nss);

struct MicroFunctionals {
  double E_K1 = 0.0, E_K2 = 0.0, E_K3 = 0.0, E_K4 = 0.0, E_F = 0.0;
  double D_K1 = 0.0, D_K2 = 0.0, D_K3 = 0.0, D_K4 = 0.0, D_F = 0.0;
  double E_K3_cross = 0.0;  // signed, included in E_K3
  double E_F_gamma = 0.0;   // signed Gamma-moment cross term, included in E_F
  double E_F_ab = 0.0;      // signed eps <d a, b> term, included in E_F
  double D_K1_stiff = 0.0;  // the 1/eps^2 block of D_K1
};

/// du_dt is the remainder velocity time derivative; pass an empty span when
/// it is unavailable (D_K2 is then 0).
MicroFunctionals micro_functionals(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                   const DiagConfig& cfg, const RemainderState& rem, const NssState& nss,
                                   std::span<const double> du_dt = {});

double energy_E(const Grid& grid, const VelocityBasis& basis, const DiagConfig& cfg, const RemainderState& rem,
                const NssState& nss);

struct Dissipation {
  double total = 0.0;
  double stiff = 0.0;  // (1/eps^2)[sum ||d (I-P) g||_nu^2 + ||b - eps u||^2]
};

Dissipation dissipation_D(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                          const DiagConfig& cfg, const RemainderState& rem, const NssState& nss,
                          std::span<const double> du_dt = {});

struct EnergyReport {
  double t = 0.0;
  double E_total = 0.0;
  double D_total = 0.0;
  double D_stiff = 0.0;
  MacroEnergy macro;
  MicroFunctionals micro;
  double E_weighted = 0.0;  // sum lambda_i E_i
  double D_weighted = 0.0;
  ConservedTotals totals;
  ConvergenceErrors errors;
};

EnergyReport evaluate_report(const Grid& grid, const VelocityBasis& basis, const DiagConfig& cfg,
                             const KineticState& kin, const NssState& nss, std::span<const double> du_dt = {});

// ---------------------------------------------------------------------------
// Residuals of the remainder equations.

/// Remainder and limit states at t and t + dt.
struct RemainderPair {
  RemainderState r0, r1;
  NssState n0, n1;
  double dt = 0.0;
};

struct RemainderResidual {
  double res_g = 0.0;
  double res_u = 0.0;
  double res_rho = 0.0;
};

struct AbResidual {
  double res_cont = 0.0;
  double res_mom = 0.0;
  double res_stress = 0.0;
};

/// R_2 = -d_x[P(1 + h0 + eps rho) - P(1 + h0)], evaluated without expansion.
ScalarField pressure_remainder(const Grid& grid, const PhysParams& params, std::span<const double> h0,
                               std::span<const double> rho);

RemainderResidual remainder_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                                     const RemainderPair& pair);

AbResidual ab_residual(const Grid& grid, const VelocityBasis& basis, const PhysParams& params,
                       const RemainderPair& pair);

/// d^a[(1+h0+eps rho)^g] - d^a[(1+h0)^g] - g eps (1+h0+eps rho)^(g-1) d^a rho, a in 0..4.
ScalarField pressure_defect(const Grid& grid, const PhysParams& params, std::span<const double> h0,
                            std::span<const double> rho, double eps, int alpha);

}  // namespace hydrolimit
