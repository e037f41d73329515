#pragma once

#include <string>
#include <vector>

#include "oscflow/solver.hpp"

namespace oscflow {

// Parsed run configuration. See configs/reference.yaml for the layout.
struct RunConfig {
  ProblemSpec problem;
  std::vector<double> resonance_ratios{0.8, 1.0, 1.2};  // periods in units of the natural period
  int profile_points = 101;   // x2 nodes of the written Poiseuille profile
  int profile_times = 16;     // time samples of the written profile
  std::string out_dir = "out";
  std::string source = "<string>";
  std::string hash;           // SHA-256 of the config text
};

// Errors are Config and name the source, line and field.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& bytes);

}  // namespace oscflow
