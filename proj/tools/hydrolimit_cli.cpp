#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hydrolimit/hydrolimit.h"

namespace {

using ConfigPtr = std::unique_ptr<hl_config, decltype(&hl_config_destroy)>;

int exit_code(hl_status s) {
  switch (s) {
    case HL_OK: return 0;
    case HL_ERR_VALIDATION:
    case HL_ERR_CONFIG:
    case HL_ERR_PARSE:
    case HL_ERR_IO: return 2;
    case HL_ERR_DIVERGENCE:
    case HL_ERR_STATE: return 3;
    default: return 1;
  }
}

int report(hl_status s) {
  if (s != HL_OK) std::fprintf(stderr, "error (%s): %s\n", hl_status_name(s), hl_last_error());
  return exit_code(s);
}

std::vector<double> parse_eps(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string eps;
};

hl_status prepare(const Options& o, ConfigPtr& cfg, bool eps_is_sweep) {
  hl_config* raw = nullptr;
  hl_status s = o.config.empty() ? hl_config_default(&raw) : hl_config_load(o.config.c_str(), &raw);
  if (s != HL_OK) return s;
  cfg.reset(raw);
  if (o.seed) {
    if ((s = hl_config_set_seed(raw, *o.seed)) != HL_OK) return s;
  }
  if (!o.out.empty()) {
    if ((s = hl_config_set_output_dir(raw, o.out.c_str())) != HL_OK) return s;
  }
  if (!o.eps.empty()) {
    std::vector<double> eps;
    try {
      eps = parse_eps(o.eps);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --eps expects a comma separated list of numbers\n");
      return HL_ERR_VALIDATION;
    }
    if (eps_is_sweep) {
      s = hl_config_set_sweep(raw, eps.data(), eps.size());
    } else if (eps.size() == 1) {
      s = hl_config_set_eps(raw, eps[0]);
    } else {
      std::fprintf(stderr, "error: run accepts a single --eps value\n");
      return HL_ERR_VALIDATION;
    }
  }
  return s;
}

std::string output_dir(const hl_config* cfg) {
  char buf[4096];
  return hl_config_output_dir(cfg, buf, sizeof buf) == HL_OK ? std::string(buf) : std::string("out");
}

int cmd_run(const Options& o) {
  ConfigPtr cfg(nullptr, hl_config_destroy);
  if (hl_status s = prepare(o, cfg, false); s != HL_OK) return report(s);
  const auto dir = output_dir(cfg.get());
  hl_run_summary r{};
  if (hl_status s = hl_run_single(cfg.get(), dir.c_str(), &r); s != HL_OK) return report(s);
  std::printf("t=%.6g steps=%ld dt=%.6g\n", r.t_final, r.steps, r.dt);
  std::printf("err_f=%.6e err_f_corrected=%.6e err_u=%.6e err_rho=%.6e\n", r.err_f, r.err_f_corrected, r.err_u,
              r.err_rho);
  std::printf("drift mass_kin=%.3e mass_fluid=%.3e momentum=%.3e\n", r.mass_kin_drift, r.mass_fluid_drift,
              r.momentum_drift);
  std::printf("energy max_ratio=%.6f fitted_C=%.6g\n", r.energy_max_ratio, r.fitted_c);
  std::printf("wrote %s/timeseries.csv and %s/summary.json (%.2fs)\n", dir.c_str(), dir.c_str(), r.runtime_s);
  return 0;
}

int cmd_sweep(const Options& o) {
  ConfigPtr cfg(nullptr, hl_config_destroy);
  if (hl_status s = prepare(o, cfg, true); s != HL_OK) return report(s);
  const auto dir = output_dir(cfg.get());
  hl_sweep_summary sum{};
  std::vector<hl_sweep_member> members(64);
  const hl_status s = hl_run_sweep(cfg.get(), dir.c_str(), &sum, members.data(), members.size());
  if (s != HL_OK) return report(s);
  std::printf("%-10s %-14s %-14s %-14s %-14s %s\n", "eps", "err_f", "err_f_corr", "err_u", "err_rho", "runtime_s");
  for (size_t i = 0; i < sum.count && i < members.size(); ++i) {
    const auto& m = members[i];
    std::printf("%-10.4g %-14.6e %-14.6e %-14.6e %-14.6e %.2f\n", m.eps, m.err_f, m.err_f_corrected, m.err_u,
                m.err_rho, m.runtime_s);
  }
  std::printf("slopes err_f=%.4f err_f_corrected=%.4f err_u=%.4f err_rho=%.4f\n", sum.slope_f, sum.slope_f_corrected,
              sum.slope_u, sum.slope_rho);
  return 0;
}

int cmd_check(const Options& o) {
  ConfigPtr cfg(nullptr, hl_config_destroy);
  if (hl_status s = prepare(o, cfg, false); s != HL_OK) return report(s);
  hl_check_summary c{};
  if (hl_status s = hl_check(cfg.get(), &c); s != HL_OK) return report(s);
  auto flag = [](int ok) { return ok ? "ok" : "FAILED"; };
  std::printf("operators   eigen=%.2e idempotence=%.2e self_adjoint=%.2e ladder=%.2e  %s\n", c.eigen_err,
              c.idempotence_err, c.self_adjoint_err, c.ladder_err, flag(c.operators_ok));
  std::printf("coercivity  c0=%.6f spread=%.3f\n", c.c0, c.c0_spread);
  std::printf("hilbert     r_minus1_max=%.2e  %s\n", c.r_minus1_max, flag(c.hilbert_ok));
  std::printf("defect      slopes=%.4f,%.4f,%.4f gamma2_err=%.2e  %s\n", c.defect_slopes[0], c.defect_slopes[1],
              c.defect_slopes[2], c.defect_gamma2_err, flag(c.defect_ok));
  std::printf("ledger      max_ratio=%.6f fitted_C=%.6g  %s\n", c.energy_max_ratio, c.fitted_c, flag(c.ledger_ok));
  return c.operators_ok && c.hilbert_ok && c.defect_ok && c.ledger_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic-fluid hydrodynamic limit solver and diagnostics"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; },
                                            "random seed");
    sub->add_option("--eps", o.eps, "comma separated eps list");
  };
  auto* run = app.add_subcommand("run", "co-evolve kinetic and limit systems");
  auto* sweep = app.add_subcommand("sweep", "convergence sweep over eps");
  auto* check = app.add_subcommand("check", "operator identities, coercivity and ledger checks");
  for (auto* sub : {run, sweep, check}) add_common(sub);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*run) return cmd_run(o);
  if (*sweep) return cmd_sweep(o);
  return cmd_check(o);
}
