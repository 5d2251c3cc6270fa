#include "hydrolimit/hydrolimit.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "errors.hpp"
#include "harness.hpp"

struct hl_config {
  hydrolimit::SimConfig cfg;
};

struct hl_basis {
  hydrolimit::VelocityBasis basis;
};

namespace {

thread_local std::string last_error;

hl_status fail(hl_status s, const char* msg) {
  last_error = msg;
  return s;
}

template <class F>
hl_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return HL_OK;
  } catch (const hydrolimit::Error& e) {
    return fail(static_cast<hl_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HL_ERR_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    return fail(HL_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(HL_ERR_UNKNOWN, "unknown error");
  }
}

std::filesystem::path to_path(const char* p) { return p ? std::filesystem::path(p) : std::filesystem::path{}; }

}  // namespace

extern "C" {

const char* hl_last_error(void) { return last_error.c_str(); }

const char* hl_status_name(hl_status status) {
  switch (status) {
    case HL_OK: return "ok";
    case HL_ERR_CONFIG: return "config";
    case HL_ERR_VALIDATION: return "validation";
    case HL_ERR_DIVERGENCE: return "divergence";
    case HL_ERR_IO: return "io";
    case HL_ERR_PARSE: return "parse";
    case HL_ERR_DOMAIN: return "domain";
    case HL_ERR_STATE: return "state";
    case HL_ERR_SHAPE: return "shape";
    case HL_ERR_INVALID_HANDLE: return "invalid handle";
    case HL_ERR_UNKNOWN: break;
  }
  return "unknown";
}

hl_status hl_config_default(hl_config** out) {
  if (!out) return fail(HL_ERR_INVALID_HANDLE, "null output pointer");
  return guard([&] { *out = new hl_config{hydrolimit::default_config()}; });
}

hl_status hl_config_load(const char* path, hl_config** out) {
  if (!out || !path) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  *out = nullptr;
  return guard([&] { *out = new hl_config{hydrolimit::load_config(path)}; });
}

hl_status hl_config_parse(const char* text, hl_config** out) {
  if (!out || !text) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  *out = nullptr;
  return guard([&] { *out = new hl_config{hydrolimit::parse_config(text)}; });
}

void hl_config_destroy(hl_config* cfg) { delete cfg; }

hl_status hl_config_set_seed(hl_config* cfg, uint64_t seed) {
  if (!cfg) return fail(HL_ERR_INVALID_HANDLE, "null config");
  cfg->cfg.seed = seed;
  return HL_OK;
}

hl_status hl_config_set_eps(hl_config* cfg, double eps) {
  if (!cfg) return fail(HL_ERR_INVALID_HANDLE, "null config");
  return guard([&] {
    auto next = cfg->cfg;
    next.phys.eps = eps;
    next.validate();
    cfg->cfg = std::move(next);
  });
}

hl_status hl_config_set_sweep(hl_config* cfg, const double* eps, size_t count) {
  if (!cfg || (count > 0 && !eps)) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  return guard([&] {
    auto next = cfg->cfg;
    next.sweep.assign(eps, eps + count);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

hl_status hl_config_set_output_dir(hl_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  cfg->cfg.output_dir = dir;
  return HL_OK;
}

hl_status hl_config_output_dir(const hl_config* cfg, char* buf, size_t cap) {
  if (!cfg || !buf || cap == 0) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  const auto& s = cfg->cfg.output_dir;
  if (s.size() + 1 > cap) return fail(HL_ERR_SHAPE, "buffer too small for output directory");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return HL_OK;
}

hl_status hl_run_single(const hl_config* cfg, const char* out_dir, hl_run_summary* out) {
  if (!cfg || !out) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  return guard([&] {
    const auto r = hydrolimit::run_single(cfg->cfg, to_path(out_dir));
    *out = hl_run_summary{};
    out->t_final = r.final_kinetic.t;
    out->dt = r.dt;
    out->steps = r.steps;
    out->err_f = r.final_errors.err_f;
    out->err_f_corrected = r.final_errors.err_f_corrected;
    out->err_u = r.final_errors.err_u;
    out->err_rho = r.final_errors.err_rho;
    out->mass_kin_drift = r.mass_kin_drift;
    out->mass_fluid_drift = r.mass_fluid_drift;
    out->momentum_drift = r.momentum_drift;
    out->energy_max_ratio = r.energy_max_ratio;
    out->fitted_c = r.fitted_C;
    out->runtime_s = r.runtime_s;
    out->rows = r.rows.size();
  });
}

hl_status hl_run_sweep(const hl_config* cfg, const char* out_dir, hl_sweep_summary* out, hl_sweep_member* members,
                       size_t cap) {
  if (!cfg || !out) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  return guard([&] {
    const auto r = hydrolimit::run_sweep(cfg->cfg, to_path(out_dir));
    *out = hl_sweep_summary{r.slope_f.slope, r.slope_f_corrected.slope, r.slope_u.slope, r.slope_rho.slope,
                            r.complete ? 1 : 0, r.members.size()};
    for (size_t i = 0; members && i < cap && i < r.members.size(); ++i) {
      const auto& m = r.members[i];
      members[i] = hl_sweep_member{m.eps,          m.errors.err_f, m.errors.err_f_corrected, m.errors.err_u,
                                   m.errors.err_rho, m.runtime_s,  m.ok ? 1 : 0};
    }
  });
}

hl_status hl_check(const hl_config* cfg, hl_check_summary* out) {
  if (!cfg || !out) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  return guard([&] {
    const auto r = hydrolimit::run_check(cfg->cfg);
    *out = hl_check_summary{};
    out->eigen_err = r.eigen_err;
    out->idempotence_err = r.idempotence_err;
    out->self_adjoint_err = r.self_adjoint_err;
    out->ladder_err = r.ladder_err;
    out->c0 = r.c0;
    out->c0_spread = r.c0_spread;
    out->r_minus1_max = r.r_minus1_max;
    for (size_t i = 0; i < 3 && i < r.defect_slopes.size(); ++i) out->defect_slopes[i] = r.defect_slopes[i];
    out->defect_gamma2_err = r.defect_gamma2_err;
    out->energy_max_ratio = r.energy_max_ratio;
    out->fitted_c = r.fitted_C;
    out->operators_ok = r.operators_ok;
    out->hilbert_ok = r.hilbert_ok;
    out->defect_ok = r.defect_ok;
    out->ledger_ok = r.ledger_ok;
  });
}

hl_status hl_basis_create(int dv, int modes, hl_basis** out) {
  if (!out) return fail(HL_ERR_INVALID_HANDLE, "null output pointer");
  *out = nullptr;
  return guard([&] { *out = new hl_basis{hydrolimit::VelocityBasis(dv, modes)}; });
}

void hl_basis_destroy(hl_basis* basis) { delete basis; }

size_t hl_basis_size(const hl_basis* basis) { return basis ? basis->basis.size() : 0; }

hl_status hl_basis_apply_L(const hl_basis* basis, const double* in, double* out, size_t n) {
  if (!basis || !in || !out) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  if (n != basis->basis.size()) return fail(HL_ERR_SHAPE, "coefficient count does not match basis");
  return guard([&] {
    const auto r = hydrolimit::apply_L(basis->basis, std::span<const double>(in, n));
    std::copy(r.begin(), r.end(), out);
  });
}

hl_status hl_basis_coercivity_ratio(const hl_basis* basis, const double* coeffs, size_t n, double* ratio) {
  if (!basis || !coeffs || !ratio) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  if (n != basis->basis.size()) return fail(HL_ERR_SHAPE, "coefficient count does not match basis");
  return guard([&] { *ratio = hydrolimit::coercivity_ratio(basis->basis, std::span<const double>(coeffs, n)).ratio; });
}

double hl_maxwellian(int dv, const double* v) {
  if (!v || dv < 1 || dv > 3) return 0.0;
  return hydrolimit::maxwellian(dv, std::span<const double>(v, static_cast<size_t>(dv)));
}

hl_status hl_fit_rate(const double* eps, const double* err, size_t n, double* slope) {
  if (!eps || !err || !slope) return fail(HL_ERR_INVALID_HANDLE, "null argument");
  return guard([&] { *slope = hydrolimit::fit_rate({eps, n}, {err, n}).slope; });
}

}  // extern "C"
