#include "oscflow/commands.hpp"

#include <filesystem>
#include <sstream>

#include "oscflow/report_io.hpp"
#include "oscflow/womersley.hpp"

namespace oscflow {
namespace {

namespace fs = std::filesystem;

nlohmann::json manifest_base(const RunConfig& cfg, const std::string& command) {
  const ProblemSpec& ps = cfg.problem;
  return {{"command", command},
          {"config", cfg.source},
          {"config_sha256", cfg.hash},
          {"seed", ps.seed},
          {"warn_only", ps.warn_only},
          {"resolution",
           {{"modes", ps.modes}, {"steps", ps.steps}, {"mesh_h", ps.mesh_h}, {"gauss", ps.gauss},
            {"cheb_order", ps.cheb_order}}}};
}

std::string prepare_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  return out_dir;
}

// Runs `body`, turning core errors into an exit code and a manifest entry.
template <class F>
CommandResult guarded(const RunConfig& cfg, const std::string& command, const std::string& out_dir, F&& body) {
  CommandResult res;
  nlohmann::json manifest = manifest_base(cfg, command);
  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  try {
    prepare_dir(out_dir);
    body(res, manifest);
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e.code());
    res.summary = std::string(to_string(e.code())) + ": " + e.what();
    manifest["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  } catch (const std::exception& e) {
    res.exit_code = kExitInternal;
    res.summary = std::string("internal error: ") + e.what();
    manifest["error"] = {{"code", "Internal"}, {"message", e.what()}};
  }
  manifest["exit_code"] = res.exit_code;
  auto files = nlohmann::json::array();
  for (const std::string& f : res.files) files.push_back(fs::path(f).filename().string());
  manifest["files"] = files;
  try {
    write_json(manifest_path, manifest);
    res.files.push_back(manifest_path);
  } catch (const Error& e) {
    if (res.exit_code == kExitPass) res.exit_code = exit_code_for(e.code());
    res.summary += std::string(" (manifest not written: ") + e.what() + ")";
  }
  return res;
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Geometry:
      return kExitConfig;
    case ErrorCode::NoConvergence:
    case ErrorCode::ResonantOrNonUnique:
      return kExitNoConvergence;
    default:
      return kExitInternal;
  }
}

CommandResult cmd_poiseuille(const RunConfig& cfg, const std::string& out_dir) {
  return guarded(cfg, "poiseuille", out_dir, [&](CommandResult& res, nlohmann::json& manifest) {
    const ProblemSpec& ps = cfg.problem;
    const PoiseuilleFlow flow = PoiseuilleFlow::solve(ps.flowrate, ps.params, ps.cheb_order);
    const std::string profile = join(out_dir, "profile.csv");
    write_profile_csv(profile, flow, cfg.profile_points, cfg.profile_times, cfg.hash);
    res.files.push_back(profile);

    nlohmann::json psi = nlohmann::json::parse(flow.pressure_signal().to_json());
    psi["config_sha256"] = cfg.hash;
    const std::string psi_path = join(out_dir, "pressure_signal.json");
    write_json(psi_path, psi);
    res.files.push_back(psi_path);

    auto rows = nlohmann::json::array();
    for (const NormRow& r : chi_norm_report(flow, ps.steps)) {
      nlohmann::json row = to_json(r);
      row["ref"] = "poiseuille.norms";
      rows.push_back(row);
    }
    const std::string norms_path = join(out_dir, "chi_norms.json");
    write_json(norms_path, {{"config_sha256", cfg.hash}, {"rows", rows}});
    res.files.push_back(norms_path);

    manifest["flowrate_w12"] = ps.flowrate.sobolev_norm(1);
    manifest["outcome"] = "written";
    std::ostringstream s;
    s << "poiseuille: " << flow.max_harmonic() << " harmonics, wrote " << res.files.size() << " files";
    res.summary = s.str();
  });
}

CommandResult cmd_solve(const RunConfig& cfg, const std::string& out_dir) {
  return guarded(cfg, "solve", out_dir, [&](CommandResult& res, nlohmann::json& manifest) {
    SolveOutcome out;
    try {
      out = galerkin_solve(cfg.problem);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoConvergence) manifest["outcome"] = "no_convergence";
      throw;
    }
    const std::string traj = join(out_dir, "trajectory.csv");
    const std::string energy = join(out_dir, "energy.csv");
    const std::string ledger = join(out_dir, "ledger.json");
    write_trajectory_csv(traj, out.result.solution, cfg.hash);
    write_energy_csv(energy, out.result.solution, out.diagnostics, cfg.hash);
    write_json(ledger, ledger_json(out, cfg.hash));
    res.files = {traj, energy, ledger};

    auto failed = nlohmann::json::array();
    for (const LedgerRow& r : out.checks)
      if (r.gate && !r.pass) failed.push_back(r.id);
    manifest["iterations"] = to_json(out.result.report);
    manifest["warnings"] = out.warnings;
    manifest["gates_pass"] = out.gates_pass;
    manifest["failed_gates"] = failed;
    manifest["ledger"] = "ledger.json";
    manifest["energy_series"] = "energy.csv";
    manifest["flow_scale"] = out.problem.flow_scale;
    manifest["outcome"] = !out.result.report.converged ? "no_convergence_warned"
                          : out.gates_pass            ? (out.warnings.empty() ? "pass" : "pass_with_warnings")
                                                      : "gate_failure";
    res.exit_code = out.gates_pass ? kExitPass : kExitGateFailure;
    if (!out.result.report.converged) res.exit_code = kExitNoConvergence;
    std::ostringstream s;
    s << "solve: " << manifest["outcome"].get<std::string>() << ", " << out.result.report.iterations
      << " iterations, " << failed.size() << " failed gates";
    for (const std::string& w : out.warnings) s << "\nwarning: " << w;
    res.summary = s.str();
  });
}

CommandResult cmd_resonance(const RunConfig& cfg, const std::string& out_dir) {
  return guarded(cfg, "resonance", out_dir, [&](CommandResult& res, nlohmann::json& manifest) {
    const std::vector<ResonanceRow> rows = resonance_sweep(cfg.problem, cfg.resonance_ratios);
    const std::string csv = join(out_dir, "resonance.csv");
    write_resonance_csv(csv, rows, cfg.hash);
    auto arr = nlohmann::json::array();
    for (const ResonanceRow& r : rows) {
      nlohmann::json row = to_json(r);
      row["ref"] = "resonance.period_sweep";
      arr.push_back(row);
    }
    const std::string json = join(out_dir, "resonance.json");
    write_json(json, {{"config_sha256", cfg.hash}, {"natural_period", cfg.problem.params.natural_period()},
                      {"rows", arr}});
    res.files = {csv, json};
    bool all = true;
    for (const ResonanceRow& r : rows) all = all && r.coupled_converged;
    manifest["outcome"] = all ? "all_converged" : "some_failed";
    res.exit_code = all ? kExitPass : kExitNoConvergence;
    std::ostringstream s;
    s << "resonance: " << rows.size() << " periods";
    for (const ResonanceRow& r : rows)
      s << "\n  T/T_nat=" << r.ratio << " coupled=" << (r.coupled_converged ? "converged" : "failed")
        << " decoupled=" << (r.decoupled_singular ? "singular" : "regular");
    res.summary = s.str();
  });
}

}  // namespace oscflow
