#include "harness.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "json.hpp"

namespace hydrolimit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json config_json(const SimConfig& cfg) {
  nlohmann::json j;
  j["physics"] = {{"eps", cfg.phys.eps}, {"gamma", cfg.phys.gamma}, {"A", cfg.phys.A},
                  {"mu", cfg.phys.mu},   {"lambda", cfg.phys.lambda}};
  j["grid"] = {{"nx", cfg.nx}, {"length", cfg.length}};
  j["velocity"] = {{"modes", cfg.n_hermite}, {"dim", cfg.dv}};
  j["time"] = {{"dt", cfg.dt}, {"cfl", cfg.cfl}, {"t_final", cfg.t_final}, {"report_every", cfg.report_every}};
  j["initial"] = {{"m0_amp", cfg.initial.m0_amp}, {"m0_mode", cfg.initial.m0_mode},
                  {"u0_amp", cfg.initial.u0_amp}, {"u0_mode", cfg.initial.u0_mode},
                  {"h0_amp", cfg.initial.h0_amp}, {"h0_mode", cfg.initial.h0_mode},
                  {"remainder_amp", cfg.initial.remainder_amp}, {"seed", cfg.seed}};
  j["diagnostics"] = {{"order_x", cfg.diag.order_x}, {"order_v", cfg.diag.order_v}, {"energy", cfg.energy}};
  j["solver"] = {{"filter", cfg.filter}};
  j["sweep"] = cfg.sweep;
  return j;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

void write_timeseries(const std::filesystem::path& path, const std::vector<TimeSeriesRow>& rows) {
  auto out = fmt::output_file(path.string());
  out.print("t,E_total,D_total,E_ma,D_ma,err_f,err_u,err_rho,mass_kin,mass_fluid,momentum\n");
  for (const auto& r : rows) {
    out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t,
              r.E_total, r.D_total, r.E_ma, r.D_ma, r.err_f, r.err_u, r.err_rho, r.mass_kin, r.mass_fluid,
              r.momentum);
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << "\n";
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
}

ScalarField smooth_random(const Grid& grid, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ScalarField f(grid.size(), 0.0);
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  for (int k = 1; k <= 3; ++k) {
    const double a = uni(rng), b = uni(rng);
    for (int j = 0; j < grid.size(); ++j) {
      const double x = grid.nodes()[j];
      f[j] += amp * (a * std::cos(k * k0 * x) + b * std::sin(k * k0 * x)) / (k * k);
    }
  }
  return f;
}

}  // namespace

double effective_dt(const SimConfig& cfg, double eps) {
  const Grid grid(cfg.nx, cfg.length);
  const VelocityBasis basis(cfg.dv, cfg.n_hermite);
  double target = max_stable_dt(grid, basis, eps, cfg.cfl);
  if (cfg.dt > 0.0) target = std::min(target, cfg.dt);
  const double steps = std::ceil(cfg.t_final / target - 1e-9);
  return cfg.t_final / steps;
}

NssState initial_nss(const Grid& grid, const SimConfig& cfg) {
  NssState s = zero_nss(grid);
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  const auto& in = cfg.initial;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.nodes()[j];
    s.m0[j] = in.m0_amp * std::cos(in.m0_mode * k0 * x);
    s.u0[j] = in.u0_amp * std::sin(in.u0_mode * k0 * x);
    s.h0[j] = in.h0_amp * std::cos(in.h0_mode * k0 * x);
  }
  return s;
}

RemainderState initial_remainder(const Grid& grid, const VelocityBasis& basis, const SimConfig& cfg) {
  auto r = zero_remainder(grid, basis);
  const double amp = cfg.initial.remainder_amp;
  if (amp == 0.0) return r;
  std::mt19937_64 rng(cfg.seed);
  r.u = smooth_random(grid, rng, amp);
  r.rho = smooth_random(grid, rng, amp);
  for (int d = 0; d <= std::min(3, basis.modes() - 1); ++d) {
    r.g.set_component(basis.axis_index(0, d), smooth_random(grid, rng, amp));
  }
  return r;
}

double fit_ledger_constant(std::span<const double> E, std::span<const double> D, double dt) {
  if (E.size() != D.size() || E.empty()) throw ShapeError("energy and dissipation series must match");
  double cum = 0.0;
  double c = std::numeric_limits<double>::infinity();
  const double budget = 1.01 * E[0];
  for (std::size_t n = 1; n < E.size(); ++n) {
    cum += D[n - 1] * dt;
    const double slack = budget - E[n];
    if (cum > 0.0) {
      c = std::min(c, slack / cum);
    } else if (slack < 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return c;
}

RunResult run_single(const SimConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const auto start = Clock::now();
  const Grid grid(cfg.nx, cfg.length);
  const VelocityBasis basis(cfg.dv, cfg.n_hermite);
  const double dt = effective_dt(cfg, cfg.phys.eps);
  const long steps = std::lround(cfg.t_final / dt);
  const KineticOptions opt{cfg.cfl, false, cfg.filter};

  NssState nss = initial_nss(grid, cfg);
  KineticState kin = well_prepared_initial(grid, basis, nss, initial_remainder(grid, basis, cfg), cfg.phys);
  const auto totals0 = conserved_totals(grid, basis, kin);

  RunResult res;
  res.dt = dt;
  res.steps = steps;
  std::vector<double> E, D;
  const double eps = cfg.phys.eps;
  auto remainder_u = [&](const KineticState& k, const NssState& s) {
    ScalarField u(grid.size());
    for (int j = 0; j < grid.size(); ++j) u[j] = (k.fluid.u[j] - s.u0[j]) / eps;
    return u;
  };
  auto record = [&](const KineticState& k, const NssState& s, std::span<const double> du_dt) {
    TimeSeriesRow row;
    row.t = k.t;
    const auto tot = conserved_totals(grid, basis, k);
    const auto err = convergence_errors(grid, basis, k, s);
    if (cfg.energy) {
      const auto rep = evaluate_report(grid, basis, cfg.diag, k, s, du_dt);
      row.E_total = rep.E_total;
      row.D_total = rep.D_total;
      row.E_ma = rep.macro.E_ma;
      row.D_ma = rep.macro.D_ma;
      E.push_back(rep.E_total);
      D.push_back(rep.D_total);
    }
    row.err_f = err.err_f;
    row.err_u = err.err_u;
    row.err_rho = err.err_rho;
    row.mass_kin = tot.mass_kinetic;
    row.mass_fluid = tot.mass_fluid;
    row.momentum = tot.momentum;
    res.mass_kin_drift = std::max(res.mass_kin_drift, std::abs(tot.mass_kinetic - totals0.mass_kinetic));
    res.mass_fluid_drift = std::max(res.mass_fluid_drift, std::abs(tot.mass_fluid - totals0.mass_fluid));
    res.momentum_drift = std::max(res.momentum_drift, std::abs(tot.momentum - totals0.momentum));
    res.rows.push_back(row);
  };

  const bool write = !out_dir.empty();
  if (write) prepare_dir(out_dir);
  auto dump_failure = [&](const Error& e, const KineticState& last) {
    if (!write) return;
    write_timeseries(out_dir / "timeseries.csv", res.rows);
    nlohmann::json j;
    j["error"] = e.what();
    j["last_good"] = {{"t", last.t}, {"step", last.step}};
    const auto tot = conserved_totals(grid, basis, last);
    j["last_good"]["totals"] = {tot.mass_kinetic, tot.mass_fluid, tot.momentum};
    j["config"] = config_json(cfg);
    write_json(out_dir / "last_good.json", j);
  };

  try {
    KineticState prev_kin = kin;
    NssState prev_nss = nss;
    KineticState next_kin = steps > 0 ? imex_step(grid, basis, kin, dt, opt) : kin;
    NssState next_nss = steps > 0 ? nss_step(grid, cfg.phys, nss, dt) : nss;
    for (long n = 0; n <= steps; ++n) {
      if (n > 0) {
        KineticState k1 = n == 1 ? next_kin : imex_step(grid, basis, kin, dt, opt);
        NssState s1 = n == 1 ? next_nss : nss_step(grid, cfg.phys, nss, dt);
        prev_kin = std::move(kin);
        prev_nss = std::move(nss);
        kin = std::move(k1);
        nss = std::move(s1);
      }
      if (n % cfg.report_every == 0 || n == steps) {
        ScalarField du;
        if (steps > 0) {
          const auto a = n == 0 ? remainder_u(kin, nss) : remainder_u(prev_kin, prev_nss);
          const auto b = n == 0 ? remainder_u(next_kin, next_nss) : remainder_u(kin, nss);
          du.resize(a.size());
          for (std::size_t j = 0; j < du.size(); ++j) du[j] = (b[j] - a[j]) / dt;
        }
        record(kin, nss, du);
      }
    }
  } catch (const DivergenceError& e) {
    dump_failure(e, kin);
    throw;
  } catch (const StateError& e) {
    dump_failure(e, kin);
    throw;
  }

  res.final_kinetic = kin;
  res.final_nss = nss;
  res.final_errors = convergence_errors(grid, basis, kin, nss);
  if (cfg.energy && !E.empty()) {
    res.energy_max_ratio = 0.0;
    for (double e : E) res.energy_max_ratio = std::max(res.energy_max_ratio, E[0] > 0.0 ? e / E[0] : 0.0);
    res.fitted_C = fit_ledger_constant(E, D, dt * cfg.report_every);
  }
  res.runtime_s = seconds_since(start);

  if (write) {
    write_timeseries(out_dir / "timeseries.csv", res.rows);
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["dt"] = dt;
    j["steps"] = steps;
    j["final"] = {{"t", kin.t},
                  {"err_f", res.final_errors.err_f},
                  {"err_f_corrected", res.final_errors.err_f_corrected},
                  {"err_u", res.final_errors.err_u},
                  {"err_rho", res.final_errors.err_rho}};
    j["conservation"] = {{"mass_kin_drift", res.mass_kin_drift},
                         {"mass_fluid_drift", res.mass_fluid_drift},
                         {"momentum_drift", res.momentum_drift}};
    if (cfg.energy) {
      j["energy"] = {{"E0", E.empty() ? 0.0 : E.front()},
                     {"max_ratio", res.energy_max_ratio},
                     {"fitted_C", finite_or_null(res.fitted_C)}};
    }
    j["runtime_s"] = res.runtime_s;
    write_json(out_dir / "summary.json", j);
  }
  return res;
}

ResidualStudy residual_study(const SimConfig& cfg, double dt) {
  cfg.validate();
  const Grid grid(cfg.nx, cfg.length);
  const VelocityBasis basis(cfg.dv, cfg.n_hermite);
  if (!(dt > 0.0)) throw ConfigError("residual study needs dt > 0");
  const long steps = std::lround(std::ceil(cfg.t_final / dt - 1e-9));
  const double h = cfg.t_final / steps;
  const KineticOptions opt{cfg.cfl, false, cfg.filter};

  NssState nss = initial_nss(grid, cfg);
  KineticState kin = well_prepared_initial(grid, basis, nss, initial_remainder(grid, basis, cfg), cfg.phys);
  RemainderState rem = extract_remainder(grid, basis, kin, nss);
  ResidualStudy out;
  out.dt = h;
  out.steps = steps;
  for (long n = 0; n < steps; ++n) {
    KineticState kin1 = imex_step(grid, basis, kin, h, opt);
    NssState nss1 = nss_step(grid, cfg.phys, nss, h);
    RemainderPair pair{rem, extract_remainder(grid, basis, kin1, nss1), nss, nss1, h};
    const auto r = remainder_residual(grid, basis, cfg.phys, pair);
    const auto a = ab_residual(grid, basis, cfg.phys, pair);
    out.remainder.res_g = std::max(out.remainder.res_g, r.res_g);
    out.remainder.res_u = std::max(out.remainder.res_u, r.res_u);
    out.remainder.res_rho = std::max(out.remainder.res_rho, r.res_rho);
    out.ab.res_cont = std::max(out.ab.res_cont, a.res_cont);
    out.ab.res_mom = std::max(out.ab.res_mom, a.res_mom);
    out.ab.res_stress = std::max(out.ab.res_stress, a.res_stress);
    kin = std::move(kin1);
    nss = std::move(nss1);
    rem = std::move(pair.r1);
  }
  return out;
}

RateFit fit_rate(std::span<const double> eps, std::span<const double> errors) {
  if (eps.size() != errors.size()) throw ShapeError("rate fit inputs differ in length");
  if (eps.size() < 2) throw DomainError("rate fit needs at least two points");
  const std::size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(errors[i] > 0.0)) throw DomainError("rate fit needs positive inputs");
    x[i] = std::log(eps[i]);
    y[i] = std::log(errors[i]);
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("rate fit needs distinct eps values");
  RateFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss);
  return f;
}

ConvergenceErrors run_member(const SimConfig& cfg, double eps, const NssState& nss_final) {
  SimConfig c = cfg;
  c.phys.eps = eps;
  const Grid grid(c.nx, c.length);
  const VelocityBasis basis(c.dv, c.n_hermite);
  const double dt = effective_dt(c, eps);
  const long steps = std::lround(c.t_final / dt);
  const KineticOptions opt{c.cfl, false, c.filter};
  KineticState kin =
      well_prepared_initial(grid, basis, initial_nss(grid, c), initial_remainder(grid, basis, c), c.phys);
  for (long n = 0; n < steps; ++n) kin = imex_step(grid, basis, kin, dt, opt);
  return convergence_errors(grid, basis, kin, nss_final);
}

SweepReport run_sweep(const SimConfig& cfg, const std::filesystem::path& out_dir, const MemberRunner& runner) {
  cfg.validate();
  if (cfg.sweep.size() < 2) throw ConfigError("a sweep needs at least two eps values");
  const Grid grid(cfg.nx, cfg.length);

  // The limit system does not depend on eps: integrate it once with the
  // finest member step.
  double dt_nss = cfg.t_final;
  for (double e : cfg.sweep) dt_nss = std::min(dt_nss, effective_dt(cfg, e));
  NssState nss = initial_nss(grid, cfg);
  const long nss_steps = std::lround(cfg.t_final / dt_nss);
  for (long n = 0; n < nss_steps; ++n) nss = nss_step(grid, cfg.phys, nss, dt_nss);

  std::vector<std::future<SweepMember>> jobs;
  for (double e : cfg.sweep) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &runner, &nss, e] {
      SweepMember m;
      m.eps = e;
      const auto start = Clock::now();
      m.errors = runner(cfg, e, nss);
      m.runtime_s = seconds_since(start);
      m.ok = true;
      return m;
    }));
  }
  SweepReport rep;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      rep.members.push_back(jobs[i].get());
    } catch (const std::exception& e) {
      SweepMember m;
      m.eps = cfg.sweep[i];
      m.failure = e.what();
      rep.members.push_back(m);
      if (!first_error) first_error = std::current_exception();
    }
  }
  rep.complete = !first_error;
  if (rep.complete) {
    std::vector<double> eps, ef, efc, eu, er;
    for (const auto& m : rep.members) {
      eps.push_back(m.eps);
      ef.push_back(m.errors.err_f);
      efc.push_back(m.errors.err_f_corrected);
      eu.push_back(m.errors.err_u);
      er.push_back(m.errors.err_rho);
    }
    rep.slope_f = fit_rate(eps, ef);
    rep.slope_f_corrected = fit_rate(eps, efc);
    rep.slope_u = fit_rate(eps, eu);
    rep.slope_rho = fit_rate(eps, er);
  }

  if (!out_dir.empty()) {
    prepare_dir(out_dir);
    {
      auto out = fmt::output_file((out_dir / "sweep.csv").string());
      out.print("eps,err_f,err_u,err_rho,runtime_s\n");
      for (const auto& m : rep.members) {
        if (!m.ok) continue;
        out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.6f}\n", m.eps, m.errors.err_f, m.errors.err_u,
                  m.errors.err_rho, m.runtime_s);
      }
    }
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["complete"] = rep.complete;
    for (const auto& m : rep.members) {
      nlohmann::json row = {{"eps", m.eps}, {"ok", m.ok}};
      if (m.ok) {
        row["err_f"] = m.errors.err_f;
        row["err_f_corrected"] = m.errors.err_f_corrected;
        row["err_u"] = m.errors.err_u;
        row["err_rho"] = m.errors.err_rho;
        row["runtime_s"] = m.runtime_s;
      } else {
        row["failure"] = m.failure;
      }
      j["members"].push_back(row);
    }
    if (rep.complete) {
      auto fit = [](const RateFit& f) { return nlohmann::json{{"slope", f.slope}, {"residual", f.residual}}; };
      j["slopes"] = {{"err_f", fit(rep.slope_f)},
                     {"err_f_corrected", fit(rep.slope_f_corrected)},
                     {"err_u", fit(rep.slope_u)},
                     {"err_rho", fit(rep.slope_rho)}};
    }
    write_json(out_dir / "sweep_summary.json", j);
  }
  if (first_error) std::rethrow_exception(first_error);
  return rep;
}

}  // namespace hydrolimit
