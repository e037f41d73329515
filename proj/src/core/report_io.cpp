#include "oscflow/report_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "oscflow/error.hpp"

namespace oscflow {
namespace {

nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

std::ofstream open_csv(const std::string& path, const std::string& hash, const std::string& header) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << "# config_sha256=" << hash << '\n' << header << '\n' << std::setprecision(17);
  return out;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_profile_csv(const std::string& path, const PoiseuilleFlow& flow, int points, int times,
                       const std::string& hash) {
  std::ofstream out = open_csv(path, hash, "t,x2,chi");
  for (int j = 0; j < times; ++j) {
    const double t = flow.period() * j / times;
    for (int i = 0; i < points; ++i) {
      const double x2 = -1.0 + 2.0 * i / (points - 1);
      out << t << ',' << x2 << ',' << flow.value(x2, t) << '\n';
    }
  }
}

void write_trajectory_csv(const std::string& path, const PeriodicTrajectory& traj, const std::string& hash) {
  std::string header = "t,z,zdot";
  for (int i = 0; i < traj.modes(); ++i) header += ",a" + std::to_string(i + 1);
  std::ofstream out = open_csv(path, hash, header);
  for (int j = 0; j < traj.samples(); ++j) {
    out << traj.time(j) << ',' << traj.z(j) << ',' << traj.zdot(j);
    const Eigen::VectorXd a = traj.a(j);
    for (int i = 0; i < traj.modes(); ++i) out << ',' << a(i);
    out << '\n';
  }
}

void write_energy_csv(const std::string& path, const PeriodicTrajectory& traj, const DiagnosticsBundle& d,
                      const std::string& hash) {
  std::ofstream out = open_csv(path, hash, "t,E,G,grad_v_sq,vprime_sq,zddot,coefficient");
  const StrongRegularityReport& s = d.strong;
  auto at = [](const Eigen::VectorXd& v, int j) { return j < v.size() ? v(j) : std::nan(""); };
  for (int j = 0; j < traj.samples(); ++j) {
    const double gv = at(s.grad_v, j);
    out << traj.time(j) << ',' << at(d.E, j) << ',' << at(d.G, j) << ',' << gv * gv << ',' << at(s.vprime_sq, j)
        << ',' << at(s.zddot, j) << ',' << at(s.coefficient, j) << '\n';
  }
}

void write_resonance_csv(const std::string& path, const std::vector<ResonanceRow>& rows, const std::string& hash) {
  std::ofstream out = open_csv(path, hash,
                               "period,ratio,coupled_converged,coupled_sup_energy,coupled_sigma_min,"
                               "decoupled_singular,decoupled_sigma_min,decoupled_norm");
  for (const ResonanceRow& r : rows)
    out << r.period << ',' << r.ratio << ',' << int(r.coupled_converged) << ',' << r.coupled_sup_energy << ','
        << r.coupled_sigma_min << ',' << int(r.decoupled_singular) << ',' << r.decoupled_sigma_min << ','
        << r.decoupled_norm << '\n';
}

nlohmann::json to_json(const LedgerRow& r) {
  return {{"id", r.id}, {"ref", r.ref},   {"lhs", num(r.lhs)},  {"rhs", num(r.rhs)},
          {"slack", num(r.slack)}, {"pass", r.pass}, {"gate", r.gate}};
}

nlohmann::json to_json(const NormRow& r) {
  return {{"name", r.name}, {"value", num(r.value)}, {"phi_norm", num(r.phi_norm)}, {"ratio", num(r.ratio)}};
}

nlohmann::json to_json(const ResonanceRow& r) {
  nlohmann::json j = {{"period", r.period},
                      {"ratio", r.ratio},
                      {"coupled_converged", r.coupled_converged},
                      {"coupled_sup_energy", num(r.coupled_sup_energy)},
                      {"coupled_sigma_min", num(r.coupled_sigma_min)},
                      {"decoupled_singular", r.decoupled_singular},
                      {"decoupled_sigma_min", num(r.decoupled_sigma_min)},
                      {"decoupled_norm", num(r.decoupled_norm)}};
  if (!r.coupled_error.empty()) j["coupled_error"] = r.coupled_error;
  return j;
}

nlohmann::json to_json(const FixedPointReport& rep) {
  auto hist = nlohmann::json::array();
  for (double h : rep.history) hist.push_back(num(h));
  nlohmann::json j = {{"converged", rep.converged},
          {"iterations", rep.iterations},
          {"history", hist},
          {"ode_residual", num(rep.ode_residual)},
          {"kinematic_residual", num(rep.kinematic_residual)},
          {"periodicity_defect", num(rep.defect)},
          {"min_sigma", num(rep.min_sigma)},
          {"substeps", rep.substeps}};
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  return j;
}

nlohmann::json ledger_json(const SolveOutcome& out, const std::string& hash) {
  const DiagnosticsBundle& d = out.diagnostics;
  const Problem& p = out.problem;
  nlohmann::json j;
  j["config_sha256"] = hash;
  j["seed"] = p.spec.seed;
  auto checks = nlohmann::json::array();
  for (const LedgerRow& r : out.checks) checks.push_back(to_json(r));
  j["checks"] = checks;
  j["constants"] = {
      {"cq", num(p.cq.value)},
      {"cq_sampled", num(p.cq.sampled)},
      {"cq_sampled_half", num(p.cq.sampled_half)},
      {"flow_scale", num(p.flow_scale)},
      {"delta", num(d.delta)},
      {"c3", num(d.partial.c3)},
      {"c5", num(d.particular.c5)},
      {"C2", num(d.particular.C2)},
      {"C3", num(d.particular.C3)},
      {"C4", num(d.particular.C4)},
      {"c8", num(d.strong.c8)},
      {"c9", num(d.strong.c9)},
      {"c10", num(d.strong.c10)},
      {"c12", num(d.strong.c12)},
      {"c13", num(d.strong.c13)},
      {"C14", num(d.strong.C14)},
  };
  j["energy"] = {{"max_E", num(d.E.size() ? d.E.maxCoeff() : 0.0)},
                 {"max_G", num(d.G.size() ? d.G.maxCoeff() : 0.0)},
                 {"identity_residual", num(d.energy.max_residual)},
                 {"telescoping", num(d.energy.telescoping)},
                 {"cubic_max", num(d.energy.cubic_max)},
                 {"partial_lhs", num(d.partial.lhs)},
                 {"partial_rhs_data", num(d.partial.rhs_data)},
                 {"partial_zero_data", d.partial.zero_data}};
  j["regularity"] = {{"min_coefficient", num(d.strong.min_coefficient)},
                     {"sup_prime", num(d.strong.sup_prime)},
                     {"t_star", num(d.strong.t_star)},
                     {"t_bar", d.strong.t_bar_found ? num(d.strong.t_bar) : nlohmann::json(nullptr)},
                     {"stokes_rhs_sup", d.stokes ? num(d.stokes->sup) : nlohmann::json(nullptr)}};
  auto bounds = nlohmann::json::array();
  for (const BoundRow& b : d.force_bounds)
    bounds.push_back({{"id", b.id}, {"ref", "forces.bound"}, {"lhs", num(b.lhs)}, {"rhs", num(b.rhs)},
                      {"constant", num(b.constant)}, {"slack", num(b.slack)}, {"pass", b.pass}});
  j["force_bounds"] = bounds;
  auto chi = nlohmann::json::array();
  for (const NormRow& r : d.chi_norms) chi.push_back(to_json(r));
  j["chi_norms"] = chi;
  auto far = nlohmann::json::array();
  for (const FarFieldRow& r : d.far_field)
    far.push_back({{"x", r.x}, {"norm", num(r.norm)}, {"beyond_support", r.beyond_support}});
  j["far_field"] = far;
  if (out.homotopy) {
    auto rows = nlohmann::json::array();
    for (const HomotopyRow& r : out.homotopy->rows) {
      nlohmann::json row = {{"alpha", r.alpha}, {"converged", r.converged}, {"iterations", r.iterations},
                            {"sup_energy", num(r.sup_energy)}};
      if (!r.error.empty()) row["error"] = r.error;
      rows.push_back(row);
    }
    j["homotopy"] = {{"rows", rows}, {"max_sup_energy", num(out.homotopy->max_sup_energy)},
                     {"all_converged", out.homotopy->all_converged}};
  }
  return j;
}

}  // namespace oscflow
