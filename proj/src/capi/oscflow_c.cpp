#include "oscflow/oscflow.h"

#include <cstring>
#include <string>

#include "oscflow/commands.hpp"
#include "oscflow/config.hpp"
#include "oscflow/parallel.hpp"
#include "oscflow/report_io.hpp"

struct oscflow_config {
  oscflow::RunConfig cfg;
};

struct oscflow_solution {
  oscflow::SolveOutcome outcome;
  std::string hash;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_message;

oscflow_status status_for(oscflow::ErrorCode code) {
  using oscflow::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return OSCFLOW_ERR_INVALID_ARGUMENT;
    case ErrorCode::Geometry: return OSCFLOW_ERR_GEOMETRY;
    case ErrorCode::Resolution: return OSCFLOW_ERR_RESOLUTION;
    case ErrorCode::ResonantOrNonUnique: return OSCFLOW_ERR_RESONANT;
    case ErrorCode::NoConvergence: return OSCFLOW_ERR_NO_CONVERGENCE;
    case ErrorCode::Integrator: return OSCFLOW_ERR_INTEGRATOR;
    case ErrorCode::Inconsistent: return OSCFLOW_ERR_INCONSISTENT;
    case ErrorCode::Config: return OSCFLOW_ERR_CONFIG;
    case ErrorCode::Io: return OSCFLOW_ERR_IO;
  }
  return OSCFLOW_ERR_INTERNAL;
}

oscflow_status misuse(const char* msg) {
  g_last_error = msg;
  return OSCFLOW_ERR_INVALID_ARGUMENT;
}

template <class F>
oscflow_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const oscflow::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OSCFLOW_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return OSCFLOW_ERR_INTERNAL;
  }
}

oscflow_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed != nullptr) *needed = s.size() + 1;
  if (buf == nullptr) return OSCFLOW_OK;
  if (len < s.size() + 1) {
    g_last_error = "buffer too small";
    return OSCFLOW_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return OSCFLOW_OK;
}

}  // namespace

extern "C" {

const char* oscflow_version(void) { return "0.1.0"; }

const char* oscflow_status_string(oscflow_status status) {
  switch (status) {
    case OSCFLOW_OK: return "ok";
    case OSCFLOW_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OSCFLOW_ERR_GEOMETRY: return "geometry";
    case OSCFLOW_ERR_RESOLUTION: return "resolution";
    case OSCFLOW_ERR_RESONANT: return "resonant or non-unique";
    case OSCFLOW_ERR_NO_CONVERGENCE: return "no convergence";
    case OSCFLOW_ERR_INTEGRATOR: return "integrator";
    case OSCFLOW_ERR_INCONSISTENT: return "inconsistent";
    case OSCFLOW_ERR_CONFIG: return "config";
    case OSCFLOW_ERR_IO: return "io";
    case OSCFLOW_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case OSCFLOW_ERR_INTERNAL: return "internal";
  }
  return "unknown status";
}

const char* oscflow_last_error(void) { return g_last_error.c_str(); }
const char* oscflow_last_message(void) { return g_last_message.c_str(); }

oscflow_status oscflow_set_threads(int threads) {
  if (threads < 0) return misuse("threads must be >= 0");
  return guarded([&] {
    oscflow::set_thread_count(threads);
    return OSCFLOW_OK;
  });
}

oscflow_status oscflow_config_load(const char* path, oscflow_config** out) {
  if (path == nullptr || out == nullptr) return misuse("null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new oscflow_config{oscflow::load_config(path)};
    return OSCFLOW_OK;
  });
}

oscflow_status oscflow_config_parse(const char* text, oscflow_config** out) {
  if (text == nullptr || out == nullptr) return misuse("null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new oscflow_config{oscflow::parse_config(text)};
    return OSCFLOW_OK;
  });
}

void oscflow_config_free(oscflow_config* cfg) { delete cfg; }

oscflow_status oscflow_config_set_seed(oscflow_config* cfg, uint64_t seed) {
  if (cfg == nullptr) return misuse("null config");
  cfg->cfg.problem.seed = seed;
  g_last_error.clear();
  return OSCFLOW_OK;
}

oscflow_status oscflow_config_set_warn_only(oscflow_config* cfg, int warn_only) {
  if (cfg == nullptr) return misuse("null config");
  cfg->cfg.problem.warn_only = warn_only != 0;
  g_last_error.clear();
  return OSCFLOW_OK;
}

oscflow_status oscflow_config_hash(const oscflow_config* cfg, char* buf, size_t len, size_t* needed) {
  if (cfg == nullptr) return misuse("null config");
  return copy_out(cfg->cfg.hash, buf, len, needed);
}

oscflow_status oscflow_config_out_dir(const oscflow_config* cfg, char* buf, size_t len, size_t* needed) {
  if (cfg == nullptr) return misuse("null config");
  return copy_out(cfg->cfg.out_dir, buf, len, needed);
}

oscflow_status oscflow_run_command(const oscflow_config* cfg, const char* command, const char* out_dir,
                                   int* exit_code) {
  if (cfg == nullptr || command == nullptr || exit_code == nullptr) return misuse("null argument");
  return guarded([&] {
    const std::string dir = out_dir != nullptr ? out_dir : cfg->cfg.out_dir;
    const std::string cmd = command;
    oscflow::CommandResult res;
    if (cmd == "poiseuille") {
      res = oscflow::cmd_poiseuille(cfg->cfg, dir);
    } else if (cmd == "solve") {
      res = oscflow::cmd_solve(cfg->cfg, dir);
    } else if (cmd == "resonance") {
      res = oscflow::cmd_resonance(cfg->cfg, dir);
    } else {
      return misuse("unknown command");
    }
    *exit_code = res.exit_code;
    g_last_message = res.summary;
    return OSCFLOW_OK;
  });
}

oscflow_status oscflow_poiseuille_profile(const oscflow_config* cfg, double t, const double* x2, size_t count,
                                          double* chi) {
  if (cfg == nullptr || (count > 0 && (x2 == nullptr || chi == nullptr))) return misuse("null argument");
  return guarded([&] {
    const oscflow::ProblemSpec& ps = cfg->cfg.problem;
    const oscflow::PoiseuilleFlow flow = oscflow::PoiseuilleFlow::solve(ps.flowrate, ps.params, ps.cheb_order);
    for (size_t i = 0; i < count; ++i) {
      if (!(x2[i] >= -1.0 && x2[i] <= 1.0)) oscflow::fail(oscflow::ErrorCode::InvalidArgument, "x2 outside [-1, 1]");
      chi[i] = flow.value(x2[i], t);
    }
    return OSCFLOW_OK;
  });
}

oscflow_status oscflow_solve(const oscflow_config* cfg, oscflow_solution** out) {
  if (cfg == nullptr || out == nullptr) return misuse("null argument");
  *out = nullptr;
  return guarded([&] {
    auto* sol = new oscflow_solution{oscflow::galerkin_solve(cfg->cfg.problem), cfg->cfg.hash};
    *out = sol;
    return OSCFLOW_OK;
  });
}

void oscflow_solution_free(oscflow_solution* sol) { delete sol; }

oscflow_status oscflow_solution_summary(const oscflow_solution* sol, oscflow_summary* out) {
  if (sol == nullptr || out == nullptr) return misuse("null argument");
  const oscflow::SolveOutcome& o = sol->outcome;
  const oscflow::FixedPointReport& rep = o.result.report;
  oscflow_summary s{};
  s.converged = rep.converged;
  s.iterations = rep.iterations;
  s.gates_pass = o.gates_pass;
  for (const auto& r : o.checks) s.failed_gates += (r.gate && !r.pass) ? 1 : 0;
  s.warnings = static_cast<int>(o.warnings.size());
  s.modes = o.result.solution.modes();
  s.samples = o.result.solution.samples();
  s.period = o.result.solution.period();
  s.ode_residual = rep.ode_residual;
  s.periodicity_defect = rep.defect;
  s.energy_residual = o.diagnostics.energy.max_residual;
  s.max_energy = o.diagnostics.energy.max_energy;
  s.cq = o.problem.cq.value;
  s.flow_scale = o.problem.flow_scale;
  *out = s;
  g_last_error.clear();
  return OSCFLOW_OK;
}

oscflow_status oscflow_solution_trajectory(const oscflow_solution* sol, double* z, double* zdot, size_t count) {
  if (sol == nullptr) return misuse("null solution");
  const oscflow::PeriodicTrajectory& tr = sol->outcome.result.solution;
  if (count != static_cast<size_t>(tr.samples())) return misuse("count must equal the number of samples");
  for (int j = 0; j < tr.samples(); ++j) {
    if (z != nullptr) z[j] = tr.z(j);
    if (zdot != nullptr) zdot[j] = tr.zdot(j);
  }
  g_last_error.clear();
  return OSCFLOW_OK;
}

oscflow_status oscflow_solution_ledger_json(const oscflow_solution* sol, char* buf, size_t len, size_t* needed) {
  if (sol == nullptr) return misuse("null solution");
  return guarded([&] { return copy_out(oscflow::ledger_json(sol->outcome, sol->hash).dump(), buf, len, needed); });
}

}  // extern "C"
