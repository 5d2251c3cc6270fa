#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "diagnostics.hpp"

namespace hydrolimit {

/// Limit-state profiles m0 = m0_amp cos(k x), u0 = u0_amp sin(k x),
/// h0 = h0_amp cos(k x) with k = 2 pi mode / L, plus an optional seeded
/// random smooth remainder of size remainder_amp.
struct InitialData {
  double m0_amp = 0.05;
  int m0_mode = 1;
  double u0_amp = 0.05;
  int u0_mode = 1;
  double h0_amp = 0.05;
  int h0_mode = 1;
  double remainder_amp = 0.0;
};

struct SimConfig {
  PhysParams phys;
  int nx = 64;
  double length = 6.283185307179586;
  int n_hermite = 32;
  int dv = 1;
  double dt = 0.0;  // 0 selects the CFL limit
  double cfl = 0.5;
  double t_final = 0.5;
  int report_every = 1;
  InitialData initial;
  std::uint64_t seed = 1;
  DiagConfig diag;
  bool energy = true;   // evaluate functionals in the time series
  bool filter = false;  // Hermite filter in the kinetic stepper
  std::vector<double> sweep;
  std::string output_dir = "out";

  /// Throws ValidationError listing every violated constraint.
  void validate() const;
};

SimConfig default_config();
/// Throws IoError (unreadable), ParseError (with line) or ValidationError.
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(const std::string& text);

/// Time step used for a member: t_final / ceil(t_final / min(dt, dt_cfl)).
double effective_dt(const SimConfig& cfg, double eps);

NssState initial_nss(const Grid& grid, const SimConfig& cfg);
RemainderState initial_remainder(const Grid& grid, const VelocityBasis& basis, const SimConfig& cfg);

struct TimeSeriesRow {
  double t = 0.0;
  double E_total = 0.0, D_total = 0.0, E_ma = 0.0, D_ma = 0.0;
  double err_f = 0.0, err_u = 0.0, err_rho = 0.0;
  double mass_kin = 0.0, mass_fluid = 0.0, momentum = 0.0;
};

struct RunResult {
  std::vector<TimeSeriesRow> rows;
  KineticState final_kinetic;
  NssState final_nss;
  ConvergenceErrors final_errors;
  double dt = 0.0;
  long steps = 0;
  double mass_kin_drift = 0.0;
  double mass_fluid_drift = 0.0;
  double momentum_drift = 0.0;
  double energy_max_ratio = 0.0;  // max_t E(t) / E(0)
  double fitted_C = 0.0;          // min_n (1.01 E(0) - E(t_n)) / sum D dt
  double runtime_s = 0.0;
};

/// Co-evolves kinetic and limit states to t_final. Writes timeseries.csv and
/// summary.json into out_dir unless it is empty.
RunResult run_single(const SimConfig& cfg, const std::filesystem::path& out_dir);

/// Energy-ledger constant from a series of (E, D) samples spaced dt apart.
double fit_ledger_constant(std::span<const double> E, std::span<const double> D, double dt);

struct ResidualStudy {
  double dt = 0.0;
  long steps = 0;
  RemainderResidual remainder;  // max over consecutive pairs
  AbResidual ab;
};

/// Co-evolves the configured scenario with step dt to t_final and evaluates
/// the remainder and a-b residuals on every consecutive pair of states.
ResidualStudy residual_study(const SimConfig& cfg, double dt);

struct RateFit {
  double slope = 0.0;
  double residual = 0.0;  // root of the summed squared log residuals
};

/// Least-squares slope of log(err) against log(eps). Throws DomainError on
/// nonpositive input or fewer than two points.
RateFit fit_rate(std::span<const double> eps, std::span<const double> errors);

struct SweepMember {
  double eps = 0.0;
  ConvergenceErrors errors;
  double runtime_s = 0.0;
  bool ok = false;
  std::string failure;
};

struct SweepReport {
  std::vector<SweepMember> members;
  RateFit slope_f, slope_f_corrected, slope_u, slope_rho;
  bool complete = false;
};

/// Member runner: terminal errors for one eps given the limit state at t_final.
using MemberRunner = std::function<ConvergenceErrors(const SimConfig&, double eps, const NssState& nss_final)>;

ConvergenceErrors run_member(const SimConfig& cfg, double eps, const NssState& nss_final);

/// Runs members concurrently, writes sweep.csv and sweep_summary.json. On a
/// member failure the completed rows are still written and the first error is
/// rethrown.
SweepReport run_sweep(const SimConfig& cfg, const std::filesystem::path& out_dir,
                      const MemberRunner& runner = run_member);

struct CheckReport {
  double eigen_err = 0.0;
  double idempotence_err = 0.0;
  double self_adjoint_err = 0.0;
  double ladder_err = 0.0;
  double c0_seed_a = 0.0;
  double c0_seed_b = 0.0;
  double c0 = 0.0;
  double c0_spread = 0.0;  // |a - b| / max(a, b)
  double r_minus1_max = 0.0;
  std::vector<double> defect_slopes;  // one per gamma in {5/3, 2, 3}
  double defect_gamma2_err = 0.0;
  double energy_max_ratio = 0.0;
  double fitted_C = 0.0;
  bool operators_ok = false;
  bool hilbert_ok = false;
  bool defect_ok = false;
  bool ledger_ok = false;
};

/// Operator identities, coercivity, order 1/eps identity, pressure defect
/// scaling and the energy ledger on the configured scenario.
CheckReport run_check(const SimConfig& cfg);

/// Minimum coercivity ratio over random non-kernel samples.
double empirical_coercivity(const VelocityBasis& basis, int samples, std::uint64_t seed);

}  // namespace hydrolimit
