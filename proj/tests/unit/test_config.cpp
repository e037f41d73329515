#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "oscflow/commands.hpp"
#include "oscflow/config.hpp"
#include "oscflow/error.hpp"

using namespace oscflow;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  return "";
}

const char* kMinimal = R"(flowrate:
  period: 4.0
  sine: {amplitude: 0.5, harmonic: 2, offset: 0.1}
)";

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.problem.flowrate.period() == 4.0);
  CHECK(c.problem.flowrate(0.5) == doctest::Approx(0.6));
  CHECK(c.problem.modes == 8);
  CHECK(c.problem.fixed_point.integrator.steps == c.problem.steps);
  CHECK(c.resonance_ratios.size() == 3);
  CHECK(c.hash == sha256_hex(kMinimal));
  CHECK(c.hash.size() == 64);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("signal variants") {
  const RunConfig c = parse_config(R"(flowrate:
  period: 2.0
  harmonics: [[0, 1.0, 0.0], [1, 0.0, -0.5]]
forces:
  g_tilde: {constant: 0.3}
  f_tilde:
    center: [2.0, 0.0]
    radius: 0.4
    direction: [0.0, 1.0]
    signal: {period: 2.0, zero: true}
solver: {modes: 6, steps: 128, alphas: [0.5, 1.0]}
)");
  CHECK(c.problem.flowrate(0.5) == doctest::Approx(1.0 + 1.0));
  CHECK(c.problem.g_tilde.period() == 2.0);
  CHECK(c.problem.g_tilde(0.1) == doctest::Approx(0.3));
  CHECK_FALSE(c.problem.f_tilde.active());
  CHECK(c.problem.f_tilde.dir2 == 1.0);
  CHECK(c.problem.steps == 128);
  CHECK(c.problem.alphas.size() == 2);
}

TEST_CASE("errors name the line and field") {
  const std::string missing = config_error("flowrate:\n  sine: {amplitude: 1}\n");
  CHECK(missing.find("t.yaml:2: flowrate: missing field 'period'") == 0);

  const std::string unknown = config_error(std::string(kMinimal) + "solver:\n  modez: 3\n");
  CHECK(unknown.find("t.yaml:5") == 0);
  CHECK(unknown.find("modez") != std::string::npos);

  const std::string two = config_error("flowrate: {period: 1, constant: 1, zero: true}\n");
  CHECK(two.find("exactly one") != std::string::npos);

  CHECK(config_error("flowrate: {period: [1, 2], constant: 1}\n").find("period") != std::string::npos);
  CHECK(config_error("flowrate: [\n").find("t.yaml:") == 0);
  CHECK(!config_error("").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/run.yaml"), Error);
}

TEST_CASE("exit codes per error kind") {
  CHECK(exit_code_for(ErrorCode::Config) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::Geometry) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::InvalidArgument) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::NoConvergence) == kExitNoConvergence);
  CHECK(exit_code_for(ErrorCode::ResonantOrNonUnique) == kExitNoConvergence);
  CHECK(exit_code_for(ErrorCode::Io) == kExitInternal);
}
