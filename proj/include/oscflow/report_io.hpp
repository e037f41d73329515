#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oscflow/solver.hpp"

namespace oscflow {

// Output formats. CSV files start with a "# config_sha256=<hash>" line followed
// by a header row; numbers are written with 17 significant digits. JSON files
// carry "config_sha256" at the top level; unbounded values are written as null.

void write_text(const std::string& path, const std::string& text);

// Long format: t, x2, chi at `times` uniform times and `points` uniform heights in [-1, 1].
void write_profile_csv(const std::string& path, const PoiseuilleFlow& flow, int points, int times,
                       const std::string& hash);
// t, z, zdot, a1..an on the coarse grid.
void write_trajectory_csv(const std::string& path, const PeriodicTrajectory& traj, const std::string& hash);
// t, E, G, grad_v_sq, vprime_sq, zddot, coefficient on the coarse grid.
void write_energy_csv(const std::string& path, const PeriodicTrajectory& traj, const DiagnosticsBundle& d,
                      const std::string& hash);
void write_resonance_csv(const std::string& path, const std::vector<ResonanceRow>& rows, const std::string& hash);

nlohmann::json to_json(const LedgerRow& row);
nlohmann::json to_json(const NormRow& row);
nlohmann::json to_json(const ResonanceRow& row);
nlohmann::json to_json(const FixedPointReport& rep);
// Checks, fitted constants, force bounds, far field and homotopy of one run.
nlohmann::json ledger_json(const SolveOutcome& out, const std::string& hash);

// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace oscflow
