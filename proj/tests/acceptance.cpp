// One PASS/FAIL line per acceptance criterion on the reference scenario.
// Exit status is nonzero if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "harness.hpp"

using namespace hydrolimit;

namespace {

// Pinned tolerances.
constexpr double kRateLo = 0.8, kRateHi = 1.2;
constexpr double kOperatorTol = 1e-12;
constexpr double kCoercivitySpread = 0.10;
constexpr double kHilbertTol = 1e-10;
constexpr double kMassTol = 1e-10;
constexpr double kMomentumTol = 1e-8;
constexpr double kEnergyGrowth = 2.0;
constexpr double kLedgerSlack = 1.01;
constexpr double kDefectSlope = 2.0, kDefectSlopeTol = 0.1;
constexpr double kDefectGamma2Tol = 1e-12;
constexpr double kResidualShrink = 1.7;
constexpr double kRelaxationTol = 0.01;

int failures = 0;

void verdict(int id, bool ok, const std::string& detail, double seconds) {
  if (!ok) ++failures;
  fmt::print("criterion {}: {}  {}  [{:.1f}s]\n", id, ok ? "PASS" : "FAIL", detail, seconds);
  std::fflush(stdout);
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool in_band(double x) { return x >= kRateLo && x <= kRateHi; }

SimConfig reference() {
  auto c = default_config();
  c.sweep = {0.1, 0.05, 0.025};
  return c;
}

void convergence_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_sweep(reference(), {});
  std::string members;
  for (const auto& m : rep.members) {
    members += fmt::format(" eps={}:(f={:.3e},fc={:.3e},u={:.3e},rho={:.3e})", m.eps, m.errors.err_f,
                           m.errors.err_f_corrected, m.errors.err_u, m.errors.err_rho);
  }
  const bool ok = in_band(rep.slope_u.slope) && in_band(rep.slope_rho.slope) && in_band(rep.slope_f_corrected.slope);
  verdict(1, ok,
          fmt::format("slopes u={:.3f} rho={:.3f} f_corrected={:.3f} (f_raw={:.3f}) band=[{}, {}];{}",
                      rep.slope_u.slope, rep.slope_rho.slope, rep.slope_f_corrected.slope, rep.slope_f.slope, kRateLo,
                      kRateHi, members),
          since(t0));
}

void operators_and_hilbert(const CheckReport& c, double seconds) {
  const bool ops = c.eigen_err <= kOperatorTol && c.idempotence_err <= kOperatorTol &&
                   c.self_adjoint_err <= kOperatorTol && c.c0_seed_a > 0.0 && c.c0_seed_b > 0.0 &&
                   c.c0_spread <= kCoercivitySpread;
  verdict(2, ops,
          fmt::format("eigen={:.1e} idempotence={:.1e} self_adjoint={:.1e} c0={:.4f}/{:.4f} spread={:.3f}",
                      c.eigen_err, c.idempotence_err, c.self_adjoint_err, c.c0_seed_a, c.c0_seed_b, c.c0_spread),
          seconds);
  verdict(3, c.r_minus1_max <= kHilbertTol, fmt::format("max r_minus1={:.2e} over 20 profiles", c.r_minus1_max), 0.0);
}

void defect(const CheckReport& c) {
  bool slopes = c.defect_slopes.size() == 3;
  for (double s : c.defect_slopes) slopes = slopes && std::abs(s - kDefectSlope) <= kDefectSlopeTol;
  verdict(6, slopes && c.defect_gamma2_err <= kDefectGamma2Tol,
          fmt::format("slopes gamma=5/3,2,3: {:.4f},{:.4f},{:.4f} gamma2 pointwise err={:.1e}", c.defect_slopes[0],
                      c.defect_slopes[1], c.defect_slopes[2], c.defect_gamma2_err),
          0.0);
}

void conservation_and_ledger(double fitted_C) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = reference();
  cfg.phys.eps = 0.1;
  const auto r = run_single(cfg, {});
  const double secs = since(t0);
  verdict(4,
          r.mass_kin_drift <= kMassTol && r.mass_fluid_drift <= kMassTol && r.momentum_drift <= kMomentumTol,
          fmt::format("drift mass_kin={:.1e} mass_fluid={:.1e} momentum={:.1e}", r.mass_kin_drift,
                      r.mass_fluid_drift, r.momentum_drift),
          secs);

  const double e0 = r.rows.front().E_total;
  const double h = r.dt * cfg.report_every;
  double worst_growth = 0.0, worst_ledger = 0.0, cum = 0.0;
  for (std::size_t n = 0; n < r.rows.size(); ++n) {
    if (n > 0) cum += r.rows[n - 1].D_total * h;
    worst_growth = std::max(worst_growth, r.rows[n].E_total / e0);
    worst_ledger = std::max(worst_ledger, (r.rows[n].E_total + fitted_C * cum) / e0);
  }
  const bool ok = fitted_C > 0.0 && std::isfinite(fitted_C) && worst_growth <= kEnergyGrowth &&
                  worst_ledger <= kLedgerSlack * (1.0 + 1e-12);
  verdict(5, ok,
          fmt::format("max E/E0={:.4f} max (E+C*sum D dt)/E0={:.4f} with C={:.4g}", worst_growth, worst_ledger,
                      fitted_C),
          secs);
}

void residual_refinement() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = reference();
  cfg.phys.eps = 0.1;
  const double dt = effective_dt(cfg, 0.1);
  const auto a = residual_study(cfg, dt);
  const auto b = residual_study(cfg, dt / 2);
  const double q[6] = {a.remainder.res_g / b.remainder.res_g,   a.remainder.res_u / b.remainder.res_u,
                       a.remainder.res_rho / b.remainder.res_rho, a.ab.res_cont / b.ab.res_cont,
                       a.ab.res_mom / b.ab.res_mom,             a.ab.res_stress / b.ab.res_stress};
  bool ok = true;
  for (double x : q) ok = ok && x >= kResidualShrink;
  verdict(7, ok,
          fmt::format("shrink g={:.2f} u={:.2f} rho={:.2f} cont={:.2f} mom={:.2f} stress={:.2f}", q[0], q[1], q[2],
                      q[3], q[4], q[5]),
          since(t0));
}

void relaxation() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = reference();
  const Grid grid(cfg.nx, cfg.length);
  const VelocityBasis basis(1, cfg.n_hermite);
  PhysParams p = cfg.phys;
  p.eps = 0.1;
  auto s = equilibrium_state(grid, basis, p);
  for (int j = 0; j < grid.size(); ++j) s.h(j, 3) = 1e-3 * (1.0 + 0.5 * std::cos(grid.nodes()[j]));
  KineticOptions opt;
  opt.freeze_transport = true;
  const double dt = max_stable_dt(grid, basis, p.eps);
  const double exact = std::exp(-3.0 * dt / (p.eps * p.eps));
  double worst = 0.0;
  for (int n = 0; n < 10; ++n) {
    const auto next = imex_step(grid, basis, s, dt, opt);
    for (int j = 0; j < grid.size(); ++j) {
      worst = std::max(worst, std::abs(next.h(j, 3) / s.h(j, 3) / exact - 1.0));
    }
    s = next;
  }
  verdict(8, worst <= kRelaxationTol,
          fmt::format("max relative deviation of the psi_3 factor={:.2e} (exact {:.6f})", worst, exact), since(t0));
}

}  // namespace

int main() {
  try {
    convergence_rate();
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = reference();
    const auto check = run_check(cfg);
    operators_and_hilbert(check, since(t0));
    conservation_and_ledger(check.fitted_C);
    defect(check);
    residual_refinement();
    relaxation();
  } catch (const Error& e) {
    fmt::print("acceptance aborted: {}\n", e.what());
    return 2;
  }
  fmt::print("{} of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
