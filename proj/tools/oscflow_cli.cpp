// oscflow command line. Talks to the library through the C API only.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oscflow/oscflow.h"

namespace {

constexpr int kExitConfig = 3;
constexpr int kExitInternal = 1;

int run(const std::string& command, const std::string& config, const std::string& out, int threads,
        const std::vector<unsigned long long>& seed, bool warn_only) {
  if (oscflow_set_threads(threads) != OSCFLOW_OK) {
    std::fprintf(stderr, "error: %s\n", oscflow_last_error());
    return kExitConfig;
  }
  oscflow_config* cfg = nullptr;
  if (oscflow_config_load(config.c_str(), &cfg) != OSCFLOW_OK) {
    std::fprintf(stderr, "config error: %s\n", oscflow_last_error());
    return kExitConfig;
  }
  if (!seed.empty()) oscflow_config_set_seed(cfg, seed.front());
  oscflow_config_set_warn_only(cfg, warn_only ? 1 : 0);
  int code = kExitInternal;
  const oscflow_status st = oscflow_run_command(cfg, command.c_str(), out.empty() ? nullptr : out.c_str(), &code);
  if (st != OSCFLOW_OK) {
    std::fprintf(stderr, "error: %s\n", oscflow_last_error());
    code = kExitInternal;
  } else {
    std::printf("%s\n", oscflow_last_message());
  }
  oscflow_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic channel flow past a spring-mounted body"};
  app.require_subcommand(1);
  app.set_version_flag("--version", oscflow_version());

  std::string config, out;
  int threads = 1;
  std::vector<unsigned long long> seed;
  bool warn_only = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default: output.dir of the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "seed for random probes (overrides the config)")->expected(1);
    sub->add_flag("--warn-only", warn_only, "report smallness violations as warnings");
  };
  add_common(app.add_subcommand("poiseuille", "channel flow profile and pressure factor"));
  add_common(app.add_subcommand("solve", "periodic solution with the full diagnostics ledger"));
  add_common(app.add_subcommand("resonance", "coupled and decoupled solves over a period grid"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  return run(app.get_subcommands().front()->get_name(), config, out, threads, seed, warn_only);
}
