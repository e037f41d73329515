#ifndef OSCFLOW_H
#define OSCFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(OSCFLOW_BUILDING_LIBRARY)
#define OSCFLOW_API __attribute__((visibility("default")))
#else
#define OSCFLOW_API
#endif

typedef enum oscflow_status {
  OSCFLOW_OK = 0,
  OSCFLOW_ERR_INVALID_ARGUMENT = 1,
  OSCFLOW_ERR_GEOMETRY = 2,
  OSCFLOW_ERR_RESOLUTION = 3,
  OSCFLOW_ERR_RESONANT = 4,
  OSCFLOW_ERR_NO_CONVERGENCE = 5,
  OSCFLOW_ERR_INTEGRATOR = 6,
  OSCFLOW_ERR_INCONSISTENT = 7,
  OSCFLOW_ERR_CONFIG = 8,
  OSCFLOW_ERR_IO = 9,
  OSCFLOW_ERR_BUFFER_TOO_SMALL = 10,
  OSCFLOW_ERR_INTERNAL = 11
} oscflow_status;

typedef struct oscflow_config oscflow_config;
typedef struct oscflow_solution oscflow_solution;

typedef struct oscflow_summary {
  int converged;
  int iterations;
  int gates_pass;
  int failed_gates;
  int warnings;
  int modes;
  int samples;
  double period;
  double ode_residual;
  double periodicity_defect;
  double energy_residual;
  double max_energy;
  double cq;
  double flow_scale;
} oscflow_summary;

OSCFLOW_API const char* oscflow_version(void);
OSCFLOW_API const char* oscflow_status_string(oscflow_status status);
/* Message of the last failed call on this thread; "" after a success. */
OSCFLOW_API const char* oscflow_last_error(void);
/* Summary line of the last oscflow_run_command on this thread. */
OSCFLOW_API const char* oscflow_last_message(void);
/* Worker threads for parallel loops; 0 or 1 runs everything on the caller (the default). */
OSCFLOW_API oscflow_status oscflow_set_threads(int threads);

OSCFLOW_API oscflow_status oscflow_config_load(const char* path, oscflow_config** out);
OSCFLOW_API oscflow_status oscflow_config_parse(const char* text, oscflow_config** out);
OSCFLOW_API void oscflow_config_free(oscflow_config* cfg);
OSCFLOW_API oscflow_status oscflow_config_set_seed(oscflow_config* cfg, uint64_t seed);
OSCFLOW_API oscflow_status oscflow_config_set_warn_only(oscflow_config* cfg, int warn_only);

/* String getters copy into buf (len bytes including the terminator) and store
   the required size in *needed when it is not NULL. buf may be NULL to query. */
OSCFLOW_API oscflow_status oscflow_config_hash(const oscflow_config* cfg, char* buf, size_t len, size_t* needed);
OSCFLOW_API oscflow_status oscflow_config_out_dir(const oscflow_config* cfg, char* buf, size_t len, size_t* needed);

/* Runs "poiseuille", "solve" or "resonance", writing into out_dir (NULL uses the
   config's output dir). *exit_code gets 0 pass, 2 gate failure, 3 config error,
   4 non-convergence, 1 other failure. The return status only reports misuse. */
OSCFLOW_API oscflow_status oscflow_run_command(const oscflow_config* cfg, const char* command, const char* out_dir,
                                               int* exit_code);

/* chi(x2[i], t) of the channel flow for the config's flow rate. */
OSCFLOW_API oscflow_status oscflow_poiseuille_profile(const oscflow_config* cfg, double t, const double* x2,
                                                      size_t count, double* chi);

OSCFLOW_API oscflow_status oscflow_solve(const oscflow_config* cfg, oscflow_solution** out);
OSCFLOW_API void oscflow_solution_free(oscflow_solution* sol);
OSCFLOW_API oscflow_status oscflow_solution_summary(const oscflow_solution* sol, oscflow_summary* out);
/* z and z' on the coarse grid; count must equal summary.samples. Either pointer may be NULL. */
OSCFLOW_API oscflow_status oscflow_solution_trajectory(const oscflow_solution* sol, double* z, double* zdot,
                                                       size_t count);
OSCFLOW_API oscflow_status oscflow_solution_ledger_json(const oscflow_solution* sol, char* buf, size_t len,
                                                        size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
