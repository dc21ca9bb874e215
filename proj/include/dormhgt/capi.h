/* C interface to the dormhgt core: opaque model handles, integer status
 * codes, and string results released with dh_string_free(). All functions
 * are thread-safe on distinct handles; dh_last_error() is thread-local. */
#ifndef DORMHGT_CAPI_H
#define DORMHGT_CAPI_H

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32
#define DH_API __declspec(dllexport)
#else
#define DH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dh_status {
  DH_OK = 0,
  DH_ERR_USAGE = 1,        /* bad arguments, malformed config */
  DH_ERR_INAPPLICABLE = 2, /* boundary / critical / unfit-resident case */
  DH_ERR_RUNTIME = 3,      /* internal failure */
} dh_status;

typedef struct dh_model dh_model;

DH_API const char* dh_version(void);

/* Message for the most recent failing call on this thread. */
DH_API const char* dh_last_error(void);

/* Parameters in the order lambda1, lambda2, mu, C, p, kappa, sigma, tau. */
DH_API dh_status dh_model_create(const double params[8], dh_model** out);

/* {"lambda1":..,"lambda2":..,"mu":..,"C":..,"p":..,"kappa":..,"sigma":..,
 *  "tau":..}; unknown keys are rejected. */
DH_API dh_status dh_model_from_json(const char* json_text, dh_model** out);

DH_API void dh_model_free(dh_model* model);

/* Re-serializes the model block (the config echo used by the CLI). */
DH_API dh_status dh_model_to_json(const dh_model* model, char** json_out);

/* ---- scalar analysis ---- */

DH_API dh_status dh_trait2_equilibrium(const dh_model* model, double* bar_n2);
DH_API dh_status dh_trait1_equilibrium(const dh_model* model, double* bar_n1a,
                                       double* bar_n1d);
/* exists is 0/1; out3 is filled only when it exists */
DH_API dh_status dh_coexistence_equilibrium(const dh_model* model,
                                            double out3[3], int* exists);
DH_API dh_status dh_lambda_hat(const dh_model* model, double* value);
DH_API dh_status dh_lambda_tilde(const dh_model* model, double* value);
DH_API dh_status dh_q1(const dh_model* model, double* value);
DH_API dh_status dh_q2(const dh_model* model, double* value);
DH_API dh_status dh_pi_proportions(const dh_model* model, double* pi_active,
                                   double* pi_dormant);
/* Writes the regime label ("I", "II'", "stable-coexistence", ...) into buf. */
DH_API dh_status dh_regime(const dh_model* model, char* buf, size_t buf_len);

/* ---- command-level entry points; options are JSON blocks ----
 *
 * Every function stores a heap string in *out (release with
 * dh_string_free). On DH_ERR_INAPPLICABLE, dh_classify_json still produces
 * a structured report with a "status" field. */

DH_API dh_status dh_classify_json(const dh_model* model, char** json_out);

/* options: {"system":"full|p0|tau0|reduced","init":[..],"t_max":..,
 *           "samples":..,"rtol":..,"atol":..}  -> trajectory CSV */
DH_API dh_status dh_ode_csv(const dh_model* model, const char* options_json,
                            char** csv_out);

/* options: same block plus {"match_tol":..,"t_cap":..} -> convergence JSON */
DH_API dh_status dh_ode_converge_json(const dh_model* model,
                                      const char* options_json,
                                      char** json_out);

/* options: {"K":..,"init":[N1a,N1d,N2],"seed":..,"sample_dt":..,"t_cap":..,
 *           "event_cap":..,"scaled":bool,
 *           "stop":{"mutant_extinct":1|2,"level_trait":1|2,"level_x":..,
 *                   "fix1":bool,"fix2":bool,"coex":bool,"beta":..}}
 * outcome JSON always; trajectory CSV only when sample_dt > 0 (counts, or
 * densities when "scaled" is true). */
DH_API dh_status dh_ssa_run(const dh_model* model, const char* options_json,
                            char** outcome_json_out, char** traj_csv_out);

/* options: {"verify_mc":N,"seed":..,"threads":..,"event_cap":..,
 *           "survival_threshold":..} -> fitness report JSON */
DH_API dh_status dh_branching_json(const dh_model* model,
                                   const char* options_json, char** json_out);

/* options: {"direction":"2into1|1into2","K_list":[..],"trials":..,
 *           "beta":..,"seed":..,"threads":..,"t_cap":..,"event_cap":..,
 *           "per_trial":bool}
 * summary JSON + per-K CSV; per-trial CSV appended to *trials_csv_out when
 * requested (pass NULL to skip). */
DH_API dh_status dh_invade_json(const dh_model* model,
                                const char* options_json, char** json_out,
                                char** csv_out, char** trials_csv_out);

/* options: {"lambda1":[min,max,n],"lambda2":[min,max,n]} -> CSV grid */
DH_API dh_status dh_regime_map_csv(const dh_model* model,
                                   const char* options_json, char** csv_out);

DH_API void dh_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
