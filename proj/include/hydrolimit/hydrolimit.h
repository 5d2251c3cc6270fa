#ifndef HYDROLIMIT_HYDROLIMIT_H
#define HYDROLIMIT_HYDROLIMIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(HYDROLIMIT_BUILDING)
#define HL_API __attribute__((visibility("default")))
#else
#define HL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
  HL_OK = 0,
  HL_ERR_CONFIG = 1,
  HL_ERR_VALIDATION = 2,
  HL_ERR_DIVERGENCE = 3,
  HL_ERR_IO = 4,
  HL_ERR_PARSE = 5,
  HL_ERR_DOMAIN = 6,
  HL_ERR_STATE = 7,
  HL_ERR_SHAPE = 8,
  HL_ERR_INVALID_HANDLE = 9,
  HL_ERR_UNKNOWN = 10
} hl_status;

typedef struct hl_config hl_config;
typedef struct hl_basis hl_basis;

/* Message of the last failed call on this thread; never NULL. */
HL_API const char* hl_last_error(void);
HL_API const char* hl_status_name(hl_status status);

HL_API hl_status hl_config_default(hl_config** out);
/* INI file; HL_ERR_IO, HL_ERR_PARSE or HL_ERR_VALIDATION on failure. */
HL_API hl_status hl_config_load(const char* path, hl_config** out);
HL_API hl_status hl_config_parse(const char* text, hl_config** out);
HL_API void hl_config_destroy(hl_config* cfg);
HL_API hl_status hl_config_set_seed(hl_config* cfg, uint64_t seed);
HL_API hl_status hl_config_set_eps(hl_config* cfg, double eps);
/* Replaces the sweep list. count == 0 clears it. */
HL_API hl_status hl_config_set_sweep(hl_config* cfg, const double* eps, size_t count);
HL_API hl_status hl_config_set_output_dir(hl_config* cfg, const char* dir);
/* Copies at most cap bytes including the terminator. */
HL_API hl_status hl_config_output_dir(const hl_config* cfg, char* buf, size_t cap);

typedef struct hl_run_summary {
  double t_final;
  double dt;
  long steps;
  double err_f;
  double err_f_corrected;
  double err_u;
  double err_rho;
  double mass_kin_drift;
  double mass_fluid_drift;
  double momentum_drift;
  double energy_max_ratio;
  double fitted_c;
  double runtime_s;
  size_t rows;
} hl_run_summary;

/* out_dir may be NULL to skip writing files. */
HL_API hl_status hl_run_single(const hl_config* cfg, const char* out_dir, hl_run_summary* out);

typedef struct hl_sweep_member {
  double eps;
  double err_f;
  double err_f_corrected;
  double err_u;
  double err_rho;
  double runtime_s;
  int ok;
} hl_sweep_member;

typedef struct hl_sweep_summary {
  double slope_f;
  double slope_f_corrected;
  double slope_u;
  double slope_rho;
  int complete;
  size_t count;
} hl_sweep_summary;

/* members may be NULL; otherwise up to cap entries are filled. */
HL_API hl_status hl_run_sweep(const hl_config* cfg, const char* out_dir, hl_sweep_summary* out,
                              hl_sweep_member* members, size_t cap);

typedef struct hl_check_summary {
  double eigen_err;
  double idempotence_err;
  double self_adjoint_err;
  double ladder_err;
  double c0;
  double c0_spread;
  double r_minus1_max;
  double defect_slopes[3];
  double defect_gamma2_err;
  double energy_max_ratio;
  double fitted_c;
  int operators_ok;
  int hilbert_ok;
  int defect_ok;
  int ledger_ok;
} hl_check_summary;

HL_API hl_status hl_check(const hl_config* cfg, hl_check_summary* out);

HL_API hl_status hl_basis_create(int dv, int modes, hl_basis** out);
HL_API void hl_basis_destroy(hl_basis* basis);
HL_API size_t hl_basis_size(const hl_basis* basis);
/* in and out hold hl_basis_size() coefficients. */
HL_API hl_status hl_basis_apply_L(const hl_basis* basis, const double* in, double* out, size_t n);
HL_API hl_status hl_basis_coercivity_ratio(const hl_basis* basis, const double* coeffs, size_t n, double* ratio);

HL_API double hl_maxwellian(int dv, const double* v);
HL_API hl_status hl_fit_rate(const double* eps, const double* err, size_t n, double* slope);

#ifdef __cplusplus
}
#endif

#endif
