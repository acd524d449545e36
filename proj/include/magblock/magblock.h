#ifndef MAGBLOCK_MAGBLOCK_H
#define MAGBLOCK_MAGBLOCK_H

/* C interface to the magnon-blockade simulator.
 *
 * Every fallible call returns mb_status; on failure the message is available
 * from mb_last_error() on the same thread until the next failing call.
 * Handles are opaque and owned by the caller; destroy functions accept NULL.
 * Rates are in units of gamma (gamma / 2pi = 1 MHz), angles in radians. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(MAGBLOCK_BUILDING_LIBRARY)
#    define MB_API __declspec(dllexport)
#  else
#    define MB_API __declspec(dllimport)
#  endif
#else
#  define MB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mb_status {
    MB_OK = 0,
    MB_ERR_INVALID_ARGUMENT = 1,
    MB_ERR_CONFIG = 2,
    MB_ERR_DIMENSION = 3,
    MB_ERR_SINGULAR = 4,
    MB_ERR_NON_UNIQUE = 5,
    MB_ERR_NOT_CONVERGED = 6,
    MB_ERR_UNDEFINED = 7,
    MB_ERR_INTERNAL = 8
} mb_status;

/* g2 classification; MB_CLASS_NONE when no engine produced a value. */
enum {
    MB_CLASS_NONE = -1,
    MB_CLASS_BUNCHING = 0,
    MB_CLASS_POISSONIAN = 1,
    MB_CLASS_ANTIBUNCHING = 2
};

MB_API const char* mb_status_string(mb_status status);
MB_API const char* mb_classification_string(int classification);
MB_API const char* mb_last_error(void);
MB_API const char* mb_version(void);

/* ---- configuration: the same key=value vocabulary as config files ---- */

typedef struct mb_config mb_config;

MB_API mb_status mb_config_create(mb_config** out);
MB_API void mb_config_destroy(mb_config* cfg);
MB_API mb_status mb_config_set(mb_config* cfg, const char* key, const char* value);
MB_API mb_status mb_config_load_file(mb_config* cfg, const char* path);
MB_API mb_status mb_config_get_double(const mb_config* cfg, const char* key, double* out);
MB_API mb_status mb_config_engines(const mb_config* cfg, int* numeric, int* analytic);

/* ---- single point ---- */

typedef struct mb_metrics {
    double g2;
    double log10_g2;
    double p1;
    double occupation;
    int n_max;
    int classification;
} mb_metrics;

/* Numeric steady state of mode 1 (fock_cutoff=auto escalates). */
MB_API mb_status mb_steady_metrics(const mb_config* cfg, mb_metrics* out);

typedef struct mb_analytic {
    double g2_exact;
    double g2_approx;
    double p_g1;
    double p_g2;
    int weak_drive_certified;
} mb_analytic;

MB_API mb_status mb_analytic_g2(const mb_config* cfg, mb_analytic* out);

typedef struct mb_optimum {
    double delta_over_j;
    double probe_over_drive;
    double theta_general;
    double theta_exact; /* valid when has_theta_exact */
    int has_theta_exact;
} mb_optimum;

MB_API mb_status mb_optimal_conditions(int n_modes, double r, mb_optimum* out);

/* ---- sweeps ---- */

typedef struct mb_sweep mb_sweep;

typedef struct mb_row {
    double axis_value;
    double g2_numeric;  /* valid when has_numeric */
    double g2_analytic; /* valid when has_analytic */
    double p1;
    double occupation;
    int n_max;
    int classification;
    int has_numeric;
    int has_analytic;
    const char* error; /* NULL on success; owned by the sweep */
} mb_row;

/* Runs the sweep described by cfg (axis, grid_*, engine, threads). Per-row
 * solver failures do not fail the call; see mb_sweep_failures. */
MB_API mb_status mb_sweep_run(const mb_config* cfg, mb_sweep** out);
MB_API size_t mb_sweep_rows(const mb_sweep* sweep);
MB_API size_t mb_sweep_failures(const mb_sweep* sweep);
MB_API mb_status mb_sweep_row(const mb_sweep* sweep, size_t index, mb_row* out);
/* Heap copy of the CSV text; release with mb_string_free. */
MB_API mb_status mb_sweep_csv(const mb_sweep* sweep, char** out);
MB_API void mb_sweep_destroy(mb_sweep* sweep);
MB_API void mb_string_free(char* s);

/* ---- data-set presets ---- */

typedef struct mb_preset mb_preset;

/* NULL past the last name. */
MB_API const char* mb_preset_name(size_t index);
MB_API mb_status mb_preset_run(const char* name, int threads, mb_preset** out);
MB_API size_t mb_preset_curves(const mb_preset* preset);
MB_API const char* mb_preset_label(const mb_preset* preset, size_t index);
/* Borrowed; valid until the preset is destroyed. */
MB_API const mb_sweep* mb_preset_curve(const mb_preset* preset, size_t index);
MB_API void mb_preset_destroy(mb_preset* preset);

/* ---- optimisation ---- */

/* axis: delta_over_j | probe_over_drive | theta | drive_rabi | kappa
 * engine: numeric | analytic;  objective: min-g2 | max-occupation */
MB_API mb_status mb_find_minimum(const mb_config* cfg, const char* axis, double lo, double hi,
                                 const char* engine, const char* objective, double* argmin, double* value);

typedef struct mb_scaling_row {
    int n_modes;
    int fock_cutoff;
    double delta_over_j;
    double probe_over_drive;
    double theta_scaled; /* theta * J / kappa */
    double g2_min;
    mb_status status;
} mb_scaling_row;

/* rows must hold `count` entries. exponents[0..2] are the fitted log-log
 * slopes for the optimal Delta / J, Omega_q / Omega_m and theta J / kappa; NaN when fewer
 * than two N values succeeded. */
MB_API mb_status mb_verify_scaling(const int* n_list, size_t count, double r, mb_scaling_row* rows,
                                   double exponents[3]);

#ifdef __cplusplus
}
#endif

#endif
