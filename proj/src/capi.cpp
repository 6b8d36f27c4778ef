// Copyright 2026 The elastic-mfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "elastic_mfc.h"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "elastic_mfc/config.hpp"
#include "elastic_mfc/controller.hpp"
#include "elastic_mfc/experiment.hpp"
#include "elastic_mfc/kpi.hpp"
#include "elastic_mfc/workload.hpp"

// Handle definitions. Each opaque struct owns one C++ object.
struct emfc_config {
  emfc::ExperimentConfig cfg;
};
struct emfc_trace {
  emfc::WorkloadTrace trace;
};
struct emfc_run {
  emfc::PolicyRun pr;
};
struct emfc_controller {
  emfc::Controller ctl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what == nullptr ? "" : what; }

template <typename Fn>
emfc_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return EMFC_OK;
  } catch (const emfc::ValidationError& ex) {
    set_error(ex.what());
    return EMFC_ERR_CONFIG;
  } catch (const emfc::IoError& ex) {
    set_error(ex.what());
    return EMFC_ERR_IO;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return EMFC_ERR_RUNTIME;
  } catch (const std::exception& ex) {
    set_error(ex.what());
    return EMFC_ERR_RUNTIME;
  } catch (...) {
    set_error("unknown error");
    return EMFC_ERR_RUNTIME;
  }
}

emfc_status invalid(const char* what) {
  set_error(what);
  return EMFC_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void fill_step(const emfc::StepRecord& s, emfc_step_record* out) {
  out->t = s.t;
  out->arrivals = s.arrivals;
  out->served = s.served;
  out->failed = s.failed;
  out->y = s.y;
  out->y_d = s.y_d;
  out->e = s.e;
  out->f_estim = s.f_estim;
  out->u_raw = s.u_raw;
  out->m_commanded = s.m_commanded;
  out->m_active = s.m_active;
  out->avg_cpu_pct = s.avg_cpu_pct;
  out->response_time_proxy = s.response_time_proxy;
}

void fill_kpi(const emfc::KpiReport& r, emfc_kpi_report* out) {
  out->vm_seconds = r.vm_seconds;
  out->mean_cpu_deviation_pct = r.mean_cpu_deviation_pct;
  out->failed_requests = r.failed_requests;
  out->unavailable_periods = r.unavailable_periods;
  std::snprintf(out->policy, sizeof out->policy, "%s", r.policy.c_str());
  std::snprintf(out->config_fingerprint, sizeof out->config_fingerprint, "%s",
                r.config_fingerprint.c_str());
}

void fill_output(const emfc::ControlOutput& o, emfc_control_output* out) {
  out->u = o.u;
  out->u_raw = o.u_raw;
  out->f_estim = o.f_estim;
  out->clamped = o.clamped ? 1 : 0;
  out->warming_up = o.warming_up ? 1 : 0;
}

}  // namespace

extern "C" {

const char* emfc_version(void) { return "0.1.0"; }

const char* emfc_status_name(emfc_status status) {
  switch (status) {
    case EMFC_OK: return "ok";
    case EMFC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case EMFC_ERR_CONFIG: return "config error";
    case EMFC_ERR_RUNTIME: return "runtime error";
    case EMFC_ERR_IO: return "io error";
  }
  return "unknown status";
}

const char* emfc_last_error(void) { return g_last_error.c_str(); }

void emfc_string_free(char* s) { delete[] s; }

/* --- config ---------------------------------------------------------------- */

emfc_config* emfc_config_new(void) { return new (std::nothrow) emfc_config{}; }

void emfc_config_free(emfc_config* cfg) { delete cfg; }

emfc_status emfc_config_load_file(emfc_config* cfg, const char* path) {
  if (cfg == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { cfg->cfg = emfc::ExperimentConfig::load_file(path); });
}

emfc_status emfc_config_set(emfc_config* cfg, const char* key,
                            const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr)
    return invalid("null argument");
  return guarded([&] { cfg->cfg.set(key, value); });
}

emfc_status emfc_config_get(const emfc_config* cfg, const char* key,
                            char** value_out) {
  if (cfg == nullptr || key == nullptr || value_out == nullptr)
    return invalid("null argument");
  return guarded([&] { *value_out = dup_string(cfg->cfg.get(key)); });
}

emfc_status emfc_config_validate(const emfc_config* cfg) {
  if (cfg == nullptr) return invalid("null argument");
  return guarded([&] { cfg->cfg.validate(); });
}

emfc_status emfc_config_diagnostics(const emfc_config* cfg, char** text_out) {
  if (cfg == nullptr || text_out == nullptr) return invalid("null argument");
  return guarded([&] {
    std::string joined;
    for (const std::string& d : cfg->cfg.diagnostics()) {
      joined += d;
      joined += '\n';
    }
    *text_out = dup_string(joined);
  });
}

emfc_status emfc_config_fingerprint(const emfc_config* cfg,
                                    char fingerprint_out[17]) {
  if (cfg == nullptr || fingerprint_out == nullptr)
    return invalid("null argument");
  return guarded([&] {
    const std::string fp = cfg->cfg.fingerprint();
    std::snprintf(fingerprint_out, 17, "%s", fp.c_str());
  });
}

/* --- traces ----------------------------------------------------------------- */

emfc_status emfc_trace_create(const emfc_config* cfg, const char* kind,
                              emfc_trace** trace_out) {
  if (cfg == nullptr || kind == nullptr || trace_out == nullptr)
    return invalid("null argument");
  return guarded([&] {
    emfc::ExperimentConfig c = cfg->cfg;
    c.trace = kind;
    *trace_out = new emfc_trace{emfc::trace_from_config(c)};
  });
}

emfc_status emfc_trace_load_csv(const char* path, emfc_trace** trace_out) {
  if (path == nullptr || trace_out == nullptr) return invalid("null argument");
  return guarded([&] { *trace_out = new emfc_trace{emfc::load_trace_csv(path)}; });
}

emfc_status emfc_trace_save_csv(const emfc_trace* trace, const char* path) {
  if (trace == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { emfc::save_trace_csv(trace->trace, path); });
}

emfc_status emfc_trace_compress(const emfc_trace* trace, double factor,
                                emfc_trace** trace_out) {
  if (trace == nullptr || trace_out == nullptr) return invalid("null argument");
  return guarded([&] {
    *trace_out = new emfc_trace{emfc::compress_trace(trace->trace, factor)};
  });
}

void emfc_trace_free(emfc_trace* trace) { delete trace; }

size_t emfc_trace_size(const emfc_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.size();
}

emfc_status emfc_trace_sample(const emfc_trace* trace, size_t index,
                              double* t_out, double* rate_out) {
  if (trace == nullptr || t_out == nullptr || rate_out == nullptr)
    return invalid("null argument");
  if (index >= trace->trace.size()) return invalid("trace index out of range");
  const emfc::TracePoint& p = trace->trace.samples()[index];
  *t_out = p.t;
  *rate_out = p.rate;
  return EMFC_OK;
}

double emfc_trace_spacing(const emfc_trace* trace) {
  return trace == nullptr ? 0.0 : trace->trace.spacing();
}

double emfc_trace_total_requests(const emfc_trace* trace) {
  return trace == nullptr ? 0.0 : trace->trace.total_requests();
}

/* --- runs ------------------------------------------------------------------- */

emfc_status emfc_run_policy(const emfc_config* cfg, const emfc_trace* trace,
                            const char* policy, emfc_run** run_out) {
  if (cfg == nullptr || trace == nullptr || policy == nullptr ||
      run_out == nullptr)
    return invalid("null argument");
  return guarded([&] {
    *run_out = new emfc_run{emfc::run_policy(cfg->cfg, trace->trace, policy)};
  });
}

void emfc_run_free(emfc_run* run) { delete run; }

size_t emfc_run_step_count(const emfc_run* run) {
  return run == nullptr ? 0 : run->pr.run.steps.size();
}

emfc_status emfc_run_step(const emfc_run* run, size_t index,
                          emfc_step_record* record_out) {
  if (run == nullptr || record_out == nullptr) return invalid("null argument");
  if (index >= run->pr.run.steps.size())
    return invalid("step index out of range");
  fill_step(run->pr.run.steps[index], record_out);
  return EMFC_OK;
}

emfc_status emfc_run_kpi(const emfc_run* run, emfc_kpi_report* report_out) {
  if (run == nullptr || report_out == nullptr) return invalid("null argument");
  fill_kpi(run->pr.kpi, report_out);
  return EMFC_OK;
}

emfc_status emfc_run_write_steps_csv(const emfc_run* run, const char* path) {
  if (run == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { emfc::write_steps_csv(run->pr.run, path); });
}

/* --- KPI comparison ----------------------------------------------------------- */

namespace {

emfc_status collect_reports(const emfc_run* const* runs, size_t count,
                            std::vector<emfc::KpiReport>* out) {
  if (runs == nullptr) return invalid("null argument");
  for (size_t i = 0; i < count; ++i) {
    if (runs[i] == nullptr) return invalid("null run handle");
    out->push_back(runs[i]->pr.kpi);
  }
  return EMFC_OK;
}

}  // namespace

emfc_status emfc_kpi_write_csv(const emfc_run* const* runs, size_t count,
                               const char* path) {
  if (path == nullptr) return invalid("null argument");
  std::vector<emfc::KpiReport> reports;
  const emfc_status st = collect_reports(runs, count, &reports);
  if (st != EMFC_OK) return st;
  return guarded([&] {
    const emfc::KpiComparison cmp = emfc::compare(reports);
    std::FILE* f = std::fopen(path, "wb");
    if (f == nullptr) throw emfc::IoError(std::string("cannot write ") + path);
    const std::string csv = emfc::comparison_csv(cmp);
    const bool ok = std::fwrite(csv.data(), 1, csv.size(), f) == csv.size();
    std::fclose(f);
    if (!ok) throw emfc::IoError(std::string("failed writing ") + path);
  });
}

emfc_status emfc_kpi_table(const emfc_run* const* runs, size_t count,
                           char** text_out) {
  if (text_out == nullptr) return invalid("null argument");
  std::vector<emfc::KpiReport> reports;
  const emfc_status st = collect_reports(runs, count, &reports);
  if (st != EMFC_OK) return st;
  return guarded([&] {
    *text_out =
        dup_string(emfc::format_comparison_table(emfc::compare(reports)));
  });
}

/* --- controller ----------------------------------------------------------------- */

emfc_status emfc_controller_new(const emfc_controller_params* params,
                                emfc_controller** controller_out) {
  if (params == nullptr || controller_out == nullptr)
    return invalid("null argument");
  return guarded([&] {
    emfc::ControllerConfig cfg;
    cfg.alpha = params->alpha;
    cfg.k_p = params->k_p;
    cfg.tau = params->tau;
    cfg.h = params->h;
    cfg.estimator = params->estimator == 0 ? emfc::EstimatorKind::kAlgebraic
                                           : emfc::EstimatorKind::kOnline;
    cfg.online_kp_sign = params->online_kp_sign == 1
                             ? emfc::OnlineKpSign::kRearranged
                             : emfc::OnlineKpSign::kPaper;
    cfg.u_min = params->u_min;
    cfg.u_max = params->u_max;
    *controller_out = new emfc_controller{emfc::Controller(cfg)};
  });
}

void emfc_controller_free(emfc_controller* controller) { delete controller; }

emfc_status emfc_controller_step(emfc_controller* controller, double t,
                                 double y, double y_d,
                                 emfc_control_output* out) {
  if (controller == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { fill_output(controller->ctl.step(t, y, y_d), out); });
}

emfc_status emfc_controller_step_with(emfc_controller* controller, double t,
                                      double y, double y_d, double yd_dot,
                                      emfc_control_output* out) {
  if (controller == nullptr || out == nullptr) return invalid("null argument");
  return guarded(
      [&] { fill_output(controller->ctl.step(t, y, y_d, yd_dot), out); });
}

emfc_status emfc_controller_reset(emfc_controller* controller) {
  if (controller == nullptr) return invalid("null argument");
  return guarded([&] { controller->ctl.reset(); });
}

double emfc_controller_f_estim(const emfc_controller* controller) {
  return controller == nullptr ? 0.0 : controller->ctl.f_estim();
}

}  // extern "C"
