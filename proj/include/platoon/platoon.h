#ifndef PLATOON_PLATOON_H
#define PLATOON_PLATOON_H

/* C interface to the platoon drag/fuel library.
 *
 * Every function returns a platoon_status. On failure the message of the last
 * error on the calling thread is available from platoon_last_error(). Strings
 * returned through char** out-parameters are owned by the caller and released
 * with platoon_string_free(). Handles are released with their _free function;
 * passing NULL to any _free is a no-op.
 */

#include <stddef.h>

#if defined(PLATOON_BUILDING_LIBRARY)
#define PLATOON_API __attribute__((visibility("default")))
#else
#define PLATOON_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2-5 double as CLI exit codes. */
typedef enum {
  PLATOON_OK = 0,
  PLATOON_ERR_PARSE = 2,
  PLATOON_ERR_INVALID_PROBLEM = 3,
  PLATOON_ERR_NON_CONVERGENCE = 4,
  PLATOON_ERR_MISMATCH = 5,
  PLATOON_ERR_DOMAIN = 6,
  PLATOON_ERR_NO_BREAKPOINT = 7,
  PLATOON_ERR_NO_POSITIVE_ROOT = 8,
  PLATOON_ERR_IO = 9,
  PLATOON_ERR_ARGUMENT = 10,
  PLATOON_ERR_INTERNAL = 11
} platoon_status;

typedef enum { PLATOON_LEAD = 0, PLATOON_MIDDLE = 1, PLATOON_TRAIL = 2 } platoon_position;
typedef enum { PLATOON_DRAG_RATIO = 0, PLATOON_FUEL_RATIO = 1 } platoon_series_kind;
typedef enum { PLATOON_GAP_M = 0, PLATOON_TIME_S = 1 } platoon_abscissa;

/* Bit flags for platoon_fit_active_bounds. */
#define PLATOON_BOUND_LOWER 1
#define PLATOON_BOUND_UPPER 2

typedef struct platoon_vehicle platoon_vehicle;
typedef struct platoon_model platoon_model;
typedef struct platoon_series platoon_series;
typedef struct platoon_fit_result platoon_fit_result;
typedef struct platoon_curve platoon_curve;

PLATOON_API const char* platoon_version(void);

/* Message of the last failure on this thread, "" if none. Valid until the next
 * call into the library from the same thread. */
PLATOON_API const char* platoon_last_error(void);
/* Stable category name of a status: "parse", "invalid_problem", ... */
PLATOON_API const char* platoon_status_name(platoon_status status);
PLATOON_API void platoon_string_free(char* s);

/* ---- vehicles ---- */

typedef struct {
  double mass_kg, length_m, width_m, height_m, frontal_area_m2;
  double cd_infinity, driveline_efficiency;
  double alpha0, alpha1, alpha2;
  double rolling_cr, rolling_c1, rolling_c2;
  double altitude_correction, payload_kg;
} platoon_vehicle_params;

/* name may be NULL or "" when the file holds a single vehicle. */
PLATOON_API platoon_status platoon_vehicle_load(const char* path, const char* name, platoon_vehicle** out);
PLATOON_API platoon_status platoon_vehicle_params_get(const platoon_vehicle* v, platoon_vehicle_params* out);
PLATOON_API platoon_status platoon_vehicle_set_payload(platoon_vehicle* v, double payload_kg);
PLATOON_API platoon_status platoon_vehicle_digest(const platoon_vehicle* v, char** out_hex);
PLATOON_API void platoon_vehicle_free(platoon_vehicle* v);

/* ---- drag models ---- */

typedef struct {
  double a, b, c;
  int has_g_o;
  double g_o_m;
  platoon_position position;
  int platoon_size;
} platoon_model_params;

PLATOON_API platoon_status platoon_model_create(const platoon_model_params* params, const char* id,
                                                platoon_model** out);
/* id may be NULL or "" when the file holds a single model. */
PLATOON_API platoon_status platoon_model_load(const char* path, const char* id, platoon_model** out);
PLATOON_API platoon_status platoon_model_params_get(const platoon_model* m, platoon_model_params* out);
PLATOON_API platoon_status platoon_model_write(const platoon_model* m, const char* path);
PLATOON_API platoon_status platoon_model_to_string(const platoon_model* m, char** out);
PLATOON_API platoon_status platoon_model_drag_ratio(const platoon_model* m, double gap_m, double* out);
PLATOON_API platoon_status platoon_model_breakpoint(const platoon_model* m, double* out_m);
PLATOON_API void platoon_model_free(platoon_model* m);

/* ---- measurement series ---- */

PLATOON_API platoon_status platoon_series_load_csv(const char* path, platoon_series** out);
PLATOON_API platoon_status platoon_series_write_csv(const platoon_series* s, const char* path);
PLATOON_API platoon_status platoon_series_to_csv(const platoon_series* s, char** out);
PLATOON_API platoon_status platoon_series_kind_get(const platoon_series* s, platoon_series_kind* out);
PLATOON_API platoon_status platoon_series_size(const platoon_series* s, size_t* out);
PLATOON_API platoon_status platoon_series_point(const platoon_series* s, size_t index, double* gap_m, double* value);
/* Fuel-ratio series to drag-ratio series. speed_kmh <= 0 uses the recorded
 * speed; n is the fuel scale (1 for the plain inversion). */
PLATOON_API platoon_status platoon_series_invert(const platoon_series* fuel, const platoon_vehicle* v,
                                                 double speed_kmh, double n, platoon_series** out);
PLATOON_API void platoon_series_free(platoon_series* s);

/* ---- fitting ---- */

typedef struct {
  int include_g_o;
  int has_bounds;
  double g_o_lower_m, g_o_upper_m;
  int has_initial_guess;
  double initial_a, initial_b, initial_c;
  int initial_has_g_o;
  double initial_g_o_m;
  int max_iterations;
  double tol_gradient, tol_step, tol_cost;
  platoon_position position;
  int platoon_size;
  const char* id; /* copied; may be NULL */
} platoon_fit_options;

/* Defaults: include_g_o, no bounds, 200 iterations, tolerances 1e-10, Trail
 * of a two-vehicle platoon. */
PLATOON_API void platoon_fit_options_init(platoon_fit_options* opts);
PLATOON_API platoon_status platoon_fit(const platoon_series* data, const platoon_fit_options* opts,
                                       platoon_fit_result** out);
PLATOON_API platoon_status platoon_fit_model(const platoon_fit_result* r, platoon_model** out);
PLATOON_API platoon_status platoon_fit_rss(const platoon_fit_result* r, double* out);
PLATOON_API platoon_status platoon_fit_iterations(const platoon_fit_result* r, int* out);
PLATOON_API platoon_status platoon_fit_converged(const platoon_fit_result* r, int* out);
PLATOON_API platoon_status platoon_fit_active_bounds(const platoon_fit_result* r, int* out_flags);
/* Root of a fit made without G_o. */
PLATOON_API platoon_status platoon_fit_extrapolated_breakpoint(const platoon_fit_result* r, double* out_m);
PLATOON_API platoon_status platoon_fit_report_json(const platoon_fit_result* r, char** out);
PLATOON_API void platoon_fit_result_free(platoon_fit_result* r);

/* ---- analysis ---- */

PLATOON_API platoon_status platoon_fuel_reduction(const platoon_vehicle* v, const platoon_model* m, double gap_m,
                                                  double speed_kmh, double* out);
PLATOON_API platoon_status platoon_headway(const platoon_vehicle* v, double gap_time_s, double speed_kmh,
                                           double* headway_s, double* flow_veh_per_hr);

/* middle may be NULL for a two-vehicle platoon. The curve samples
 * [start, stop] every step along the chosen abscissa. */
PLATOON_API platoon_status platoon_curve_compute(const platoon_vehicle* v, const platoon_model* lead,
                                                 const platoon_model* middle, const platoon_model* trail,
                                                 int size, double speed_kmh, platoon_abscissa abscissa,
                                                 double start, double stop, double step, platoon_curve** out);
PLATOON_API platoon_status platoon_curve_csv(const platoon_curve* c, char** out);
PLATOON_API platoon_status platoon_curve_json(const platoon_curve* c, char** out);
PLATOON_API void platoon_curve_free(platoon_curve* c);

/* ---- reproduction and digests ---- */

/* target: "table2", "headways" or "savings_summary". Writes the report text
 * and returns PLATOON_ERR_MISMATCH when any line fails. */
PLATOON_API platoon_status platoon_reproduce(const char* target, const char* fixture_dir, char** out_report,
                                             int* out_failures);
PLATOON_API platoon_status platoon_sha256_file(const char* path, char** out_hex);

#ifdef __cplusplus
}
#endif

#endif /* PLATOON_PLATOON_H */
