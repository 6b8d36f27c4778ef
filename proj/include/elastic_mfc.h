/* Copyright 2026 The elastic-mfc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* elastic-mfc shared-library C API.
 *
 * Opaque handles + status codes. Every function that can fail returns an
 * emfc_status; on failure emfc_last_error() holds a human-readable message
 * for the calling thread. Handles are freed with their matching *_free; all
 * functions tolerate NULL handles by returning EMFC_ERR_INVALID_ARGUMENT.
 */

#ifndef ELASTIC_MFC_H
#define ELASTIC_MFC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EMFC_BUILD_SHARED)
#    define EMFC_API __declspec(dllexport)
#  else
#    define EMFC_API __declspec(dllimport)
#  endif
#else
#  define EMFC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum emfc_status {
  EMFC_OK = 0,
  EMFC_ERR_INVALID_ARGUMENT = 1,
  EMFC_ERR_CONFIG = 2,  /* bad key, bad value, broken invariant */
  EMFC_ERR_RUNTIME = 3,
  EMFC_ERR_IO = 4
} emfc_status;

typedef struct emfc_config emfc_config;
typedef struct emfc_trace emfc_trace;
typedef struct emfc_run emfc_run;
typedef struct emfc_controller emfc_controller;

/* Mirrors one telemetry row of steps_<policy>.csv. */
typedef struct emfc_step_record {
  double t;
  int64_t arrivals;
  int64_t served;
  int64_t failed;
  double y;
  double y_d;
  double e;
  double f_estim;
  double u_raw;
  int32_t m_commanded;
  int32_t m_active;
  double avg_cpu_pct;
  double response_time_proxy;
} emfc_step_record;

typedef struct emfc_kpi_report {
  double vm_seconds;
  double mean_cpu_deviation_pct;
  int64_t failed_requests;
  int64_t unavailable_periods;
  char policy[32];
  char config_fingerprint[17];
} emfc_kpi_report;

typedef struct emfc_controller_params {
  double alpha;
  double k_p;
  double tau;
  double h;
  int32_t estimator;       /* 0 = algebraic, 1 = online */
  int32_t online_kp_sign;  /* 0 = paper, 1 = rearranged */
  double u_min;
  double u_max;
} emfc_controller_params;

typedef struct emfc_control_output {
  double u;
  double u_raw;
  double f_estim;
  int32_t clamped;
  int32_t warming_up;
} emfc_control_output;

EMFC_API const char* emfc_version(void);
EMFC_API const char* emfc_status_name(emfc_status status);
/* Message from the last failing call on this thread ("" if none). */
EMFC_API const char* emfc_last_error(void);
/* Frees strings returned by emfc_* functions documented as caller-owned. */
EMFC_API void emfc_string_free(char* s);

/* --- experiment configuration ------------------------------------------- */

EMFC_API emfc_config* emfc_config_new(void);
EMFC_API void emfc_config_free(emfc_config* cfg);
EMFC_API emfc_status emfc_config_load_file(emfc_config* cfg, const char* path);
EMFC_API emfc_status emfc_config_set(emfc_config* cfg, const char* key,
                                     const char* value);
/* Caller-owned string out; free with emfc_string_free. */
EMFC_API emfc_status emfc_config_get(const emfc_config* cfg, const char* key,
                                     char** value_out);
EMFC_API emfc_status emfc_config_validate(const emfc_config* cfg);
/* Newline-separated diagnostics, "" when clean. Caller-owned. */
EMFC_API emfc_status emfc_config_diagnostics(const emfc_config* cfg,
                                             char** text_out);
EMFC_API emfc_status emfc_config_fingerprint(const emfc_config* cfg,
                                             char fingerprint_out[17]);

/* --- workload traces ------------------------------------------------------ */

/* kind: "step", "spiky", or "csv:<path>"; seed and shape come from cfg. */
EMFC_API emfc_status emfc_trace_create(const emfc_config* cfg, const char* kind,
                                       emfc_trace** trace_out);
EMFC_API emfc_status emfc_trace_load_csv(const char* path,
                                         emfc_trace** trace_out);
EMFC_API emfc_status emfc_trace_save_csv(const emfc_trace* trace,
                                         const char* path);
EMFC_API emfc_status emfc_trace_compress(const emfc_trace* trace, double factor,
                                         emfc_trace** trace_out);
EMFC_API void emfc_trace_free(emfc_trace* trace);
EMFC_API size_t emfc_trace_size(const emfc_trace* trace);
EMFC_API emfc_status emfc_trace_sample(const emfc_trace* trace, size_t index,
                                       double* t_out, double* rate_out);
EMFC_API double emfc_trace_spacing(const emfc_trace* trace);
EMFC_API double emfc_trace_total_requests(const emfc_trace* trace);

/* --- simulation runs ------------------------------------------------------ */

/* policy: "mfc", "target_tracking", "static", "static_<N>". */
EMFC_API emfc_status emfc_run_policy(const emfc_config* cfg,
                                     const emfc_trace* trace,
                                     const char* policy, emfc_run** run_out);
EMFC_API void emfc_run_free(emfc_run* run);
EMFC_API size_t emfc_run_step_count(const emfc_run* run);
EMFC_API emfc_status emfc_run_step(const emfc_run* run, size_t index,
                                   emfc_step_record* record_out);
EMFC_API emfc_status emfc_run_kpi(const emfc_run* run,
                                  emfc_kpi_report* report_out);
EMFC_API emfc_status emfc_run_write_steps_csv(const emfc_run* run,
                                              const char* path);

/* KPI comparison across runs (at least two). */
EMFC_API emfc_status emfc_kpi_write_csv(const emfc_run* const* runs,
                                        size_t count, const char* path);
/* Aligned plain-text table; caller-owned. */
EMFC_API emfc_status emfc_kpi_table(const emfc_run* const* runs, size_t count,
                                    char** text_out);

/* --- standalone controller ------------------------------------------------ */

EMFC_API emfc_status emfc_controller_new(const emfc_controller_params* params,
                                         emfc_controller** controller_out);
EMFC_API void emfc_controller_free(emfc_controller* controller);
/* Backward-difference reference derivative. */
EMFC_API emfc_status emfc_controller_step(emfc_controller* controller, double t,
                                          double y, double y_d,
                                          emfc_control_output* out);
/* Caller-supplied reference derivative. */
EMFC_API emfc_status emfc_controller_step_with(emfc_controller* controller,
                                               double t, double y, double y_d,
                                               double yd_dot,
                                               emfc_control_output* out);
EMFC_API emfc_status emfc_controller_reset(emfc_controller* controller);
EMFC_API double emfc_controller_f_estim(const emfc_controller* controller);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ELASTIC_MFC_H */
