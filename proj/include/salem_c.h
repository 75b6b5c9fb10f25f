/* C interface to the salemlab core.
 *
 * Objects are opaque handles released with their matching *_free function
 * (which accepts NULL). Every other function returns a salem_status; on
 * failure salem_last_error() describes the problem. The message is kept per
 * thread and stays valid until the next failing call on that thread.
 */
#ifndef SALEM_C_H
#define SALEM_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SALEM_C_BUILDING)
#    define SALEM_API __declspec(dllexport)
#  else
#    define SALEM_API __declspec(dllimport)
#  endif
#else
#  define SALEM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum salem_status {
  SALEM_OK = 0,
  SALEM_ERR_DOMAIN = 1,
  SALEM_ERR_PARAMETER = 2,
  SALEM_ERR_CONSTRUCTION = 3,
  SALEM_ERR_NO_INTERSECTION = 4,
  SALEM_ERR_MAP_NOT_INCREASING = 5,
  SALEM_ERR_INSUFFICIENT_DATA = 6,
  SALEM_ERR_IO = 7,
  SALEM_ERR_PARSE = 8,
  SALEM_ERR_NULL_ARGUMENT = 9,
  SALEM_ERR_INTERNAL = 10
} salem_status;

typedef struct salem_gapset salem_gapset;
typedef struct salem_schedule salem_schedule;
typedef struct salem_measure salem_measure;
typedef struct salem_sample salem_sample;
typedef struct salem_spectrum salem_spectrum;
typedef struct salem_config salem_config;

SALEM_API const char* salem_version(void);
SALEM_API const char* salem_last_error(void);
SALEM_API const char* salem_status_name(salem_status status);

/* ---- geometry ---------------------------------------------------------- */

/* delta(t) = 1/max(-log t, log 2) if alpha == 0, t^alpha otherwise. */
SALEM_API salem_status salem_delta_of(double t, double alpha, double* out);

/* Gaps as parallel arrays; generations may be NULL (none recorded). */
SALEM_API salem_status salem_gapset_create(double hull_lo, double hull_hi, const double* lo,
                                           const double* hi, const int* generations, size_t n,
                                           salem_gapset** out);
SALEM_API salem_status salem_gapset_read(const char* path, salem_gapset** out);
SALEM_API salem_status salem_gapset_write(const salem_gapset* gaps, const char* path);
SALEM_API salem_status salem_gapset_size(const salem_gapset* gaps, size_t* out);
SALEM_API salem_status salem_gapset_hull(const salem_gapset* gaps, double* lo, double* hi);
/* generation is set to -1 when none is recorded. */
SALEM_API salem_status salem_gapset_get(const salem_gapset* gaps, size_t index, double* lo,
                                        double* hi, int* generation);
SALEM_API void salem_gapset_free(salem_gapset* gaps);

SALEM_API salem_status salem_schedule_build(const salem_gapset* gaps, int m, double alpha,
                                            salem_schedule** out);
SALEM_API salem_status salem_schedule_delta(const salem_schedule* schedule, size_t index,
                                            double* out);
SALEM_API salem_status salem_schedule_total(const salem_schedule* schedule, double* out);
SALEM_API void salem_schedule_free(salem_schedule* schedule);

SALEM_API salem_status salem_psi(const salem_gapset* gaps, const salem_schedule* schedule,
                                 double j_lo, double j_hi, double x, size_t* out);
SALEM_API salem_status salem_raw_gap_count(const salem_gapset* gaps, double j_lo, double j_hi,
                                           double x, size_t* out);

/* ---- constructions and measures ---------------------------------------- */

/* weights may be NULL for uniform weights. */
SALEM_API salem_status salem_ifs_build(const double* ratios, const double* offsets,
                                       const double* weights, size_t n_maps, int depth,
                                       salem_gapset** gaps, salem_measure** measure);
/* c may be NULL for the default sequence; otherwise it holds c_1..c_depth. */
SALEM_API salem_status salem_fat_cantor_build(const double* c, int depth, salem_gapset** gaps,
                                              salem_measure** measure);

SALEM_API salem_status salem_measure_create(const double* positions, const double* weights,
                                            size_t n, double resolution, salem_measure** out);
SALEM_API salem_status salem_measure_read(const char* path, salem_measure** out);
SALEM_API salem_status salem_measure_write(const salem_measure* measure, const char* path);
SALEM_API salem_status salem_measure_size(const salem_measure* measure, size_t* out);
SALEM_API salem_status salem_measure_atom(const salem_measure* measure, size_t index,
                                          double* position, double* weight);
SALEM_API salem_status salem_measure_resolution(const salem_measure* measure, double* out);
SALEM_API salem_status salem_measure_mass(const salem_measure* measure, double j_lo, double j_hi,
                                          double* out);
SALEM_API salem_status salem_frostman_check(const salem_measure* measure, double s,
                                            double* constant, double* witness_lo,
                                            double* witness_hi);
/* t_grid may be NULL for the default grid. `restricted` may be NULL. */
SALEM_API salem_status salem_translate_intersect(const salem_measure* mu, const salem_gapset* set,
                                                 const double* t_grid, size_t n_t,
                                                 unsigned workers, double* t, double* mass,
                                                 salem_measure** restricted);
SALEM_API void salem_measure_free(salem_measure* measure);

/* ---- random maps -------------------------------------------------------- */

/* nu: "uniform" or "raised-cosine". bump_order 0 selects m + 1. */
SALEM_API salem_status salem_sample_draw(const salem_gapset* gaps, const salem_schedule* schedule,
                                         const char* nu, uint64_t seed, int bump_order,
                                         salem_sample** out);
SALEM_API salem_status salem_sample_eval(const salem_sample* sample, double x, double* out);
SALEM_API salem_status salem_sample_eval_restricted(const salem_sample* sample, double x,
                                                    double* out);
SALEM_API salem_status salem_sample_derivative(const salem_sample* sample, double x, int k,
                                               double* out);
SALEM_API salem_status salem_sample_omega(const salem_sample* sample, size_t index, double* out);
SALEM_API salem_status salem_modulus_check(const salem_sample* sample, size_t n_pairs,
                                           uint64_t seed, double* max_ratio, double* bound,
                                           int* pass);
SALEM_API salem_status salem_pushforward(const salem_measure* measure, const salem_sample* sample,
                                         salem_measure** out);
SALEM_API void salem_sample_free(salem_sample* sample);

/* ---- Fourier ------------------------------------------------------------ */

SALEM_API salem_status salem_transform(const salem_measure* measure, const double* xi, size_t n,
                                       unsigned workers, salem_spectrum** out);
SALEM_API salem_status salem_spectrum_size(const salem_spectrum* spectrum, size_t* out);
SALEM_API salem_status salem_spectrum_get(const salem_spectrum* spectrum, size_t index,
                                          double* xi, double* re, double* im);
SALEM_API salem_status salem_spectrum_xi_max_valid(const salem_spectrum* spectrum, double* out);
SALEM_API salem_status salem_estimate_fourier_dim(const salem_spectrum* spectrum, int j_min,
                                                  int j_max, double* s_hat, double* slope,
                                                  double* residual);
SALEM_API void salem_spectrum_free(salem_spectrum* spectrum);

/* ---- experiment runs ---------------------------------------------------- */

SALEM_API salem_status salem_config_new(salem_config** out);
/* Overrides fields from a JSON config file. */
SALEM_API salem_status salem_config_load(salem_config* config, const char* path);
/* Sets one field from text; lists may be comma-separated. */
SALEM_API salem_status salem_config_set(salem_config* config, const char* key, const char* value);
/* Canonical JSON. Writes at most `capacity` bytes including the NUL and
 * stores the full length (without NUL) in *needed when non-NULL. */
SALEM_API salem_status salem_config_json(const salem_config* config, char* buffer,
                                         size_t capacity, size_t* needed);
SALEM_API size_t salem_config_key_count(void);
SALEM_API const char* salem_config_key(size_t index);
SALEM_API void salem_config_free(salem_config* config);

/* Runs a subcommand. *exit_code receives 0 (pass), 1 (property failure) or
 * 2 (configuration or I/O error); in the last two cases salem_last_error()
 * holds the reason. The output directory is copied into `dir_buffer` when it
 * is non-NULL. */
SALEM_API salem_status salem_run(const salem_config* config, const char* command, int* exit_code,
                                 char* dir_buffer, size_t dir_capacity);

#ifdef __cplusplus
}
#endif

#endif /* SALEM_C_H */
