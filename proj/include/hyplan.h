/* hyplan: coordinated renewable / HVDC / power-to-gas / hydrogen-pipeline
 * capacity planning. C interface over the C++ core: opaque handles, integer
 * status codes, JSON/CSV payloads as malloc'd strings released through
 * hyp_string_free.
 */
#ifndef HYPLAN_H
#define HYPLAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hyp_config hyp_config;
typedef struct hyp_scenarios hyp_scenarios;
typedef struct hyp_moments hyp_moments;
typedef struct hyp_model hyp_model;
typedef struct hyp_solution hyp_solution;

typedef enum {
  HYP_OK = 0,
  HYP_ERR_VALIDATION = 2,
  HYP_ERR_SOLVE = 3,
  HYP_ERR_IO = 4,
  HYP_ERR_INVALID = 5
} hyp_status;

const char* hyp_version(void);
/* Message for the most recent failure on this thread. */
const char* hyp_last_error(void);
void hyp_string_free(char* s);

/* ---- input deck ---- */
hyp_status hyp_config_load(const char* path, hyp_config** out);
hyp_status hyp_config_parse(const char* json_text, const char* base_dir, hyp_config** out);
hyp_status hyp_config_to_json(const hyp_config* cfg, char** out_json);
void hyp_config_free(hyp_config* cfg);

/* Deck diagnostics: clusters the deck's profiles at `scenario_count`,
 * assembles the model, and checks the variable/row/cone counts against their
 * closed-form predictions. Fails with HYP_ERR_VALIDATION on any mismatch. */
hyp_status hyp_audit_json(const hyp_config* cfg, int scenario_count, uint64_t seed,
                          char** out_json);

/* ---- typical days and forecast-error moments ---- */
hyp_status hyp_cluster(const hyp_config* cfg, int scenario_count, uint64_t seed,
                       hyp_scenarios** out_scen, hyp_moments** out_mom);
hyp_status hyp_scenarios_save(const hyp_scenarios* s, const char* path);
hyp_status hyp_scenarios_load(const char* path, hyp_scenarios** out);
hyp_status hyp_moments_save(const hyp_moments* m, const char* path);
hyp_status hyp_moments_load(const char* path, hyp_moments** out);
void hyp_scenarios_free(hyp_scenarios* s);
void hyp_moments_free(hyp_moments* m);

/* ---- model build and solve ---- */
typedef struct {
  int use_drcc;            /* 0: nominal constraints only */
  double epsilon;          /* <= 0: take the deck's value */
  int relax_integers;      /* relax per-hour ON/BOOTING counts */
  int quadratic_hydrogen;  /* tangent envelope of the conversion curve */
  int envelope_pieces;
  double gap_tol;
  double int_tol;
  double time_limit_s; /* <= 0: none */
  long node_limit;     /* <= 0: none */
  int planning_priority;
  uint64_t seed;
} hyp_options;

void hyp_options_init(hyp_options* opt);

hyp_status hyp_build(const hyp_config* cfg, const hyp_scenarios* scen, const hyp_moments* mom,
                     const hyp_options* opt, hyp_model** out);
hyp_status hyp_model_stats_json(const hyp_model* model, char** out_json);
/* Plain-text model exchange format (also re-importable). */
hyp_status hyp_model_export_text(const hyp_model* model, char** out_text);
void hyp_model_free(hyp_model* model);

hyp_status hyp_solve(hyp_model* model, const hyp_options* opt, hyp_solution** out);
hyp_status hyp_solution_solve_report_json(const hyp_solution* sol, char** out_json);
hyp_status hyp_solution_plan_report_json(const hyp_solution* sol, char** out_json);
hyp_status hyp_solution_plan_report_csv(const hyp_solution* sol, char** out_csv);
hyp_status hyp_solution_plotdata_csv(const hyp_solution* sol, char** out_csv);
hyp_status hyp_solution_values_text(const hyp_solution* sol, char** out_text);
double hyp_solution_wall_time_s(const hyp_solution* sol);
void hyp_solution_free(hyp_solution* sol);

/* ---- sensitivity sweeps ----
 * axis: "scenario_count" | "epsilon" | "re_price_path" | "transport_demand_path"
 * grid: comma-separated labels, e.g. "off,0.1,0.01" or "2,4".
 */
hyp_status hyp_sweep_json(const hyp_config* cfg, const hyp_scenarios* scen,
                          const hyp_moments* mom, const char* axis, const char* grid,
                          const hyp_options* opt, char** out_json, char** out_csv);

/* ---- utilities for manifest writing ---- */
hyp_status hyp_sha256_file(const char* path, char out_hex[65]);

#ifdef __cplusplus
}
#endif

#endif /* HYPLAN_H */
