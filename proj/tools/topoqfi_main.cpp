// topoqfi: momentum-resolved quantum Fisher information for lattice Chern
// insulators, with topological bound checks and quantum-speed-limit estimates.
#include "topoqfi/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// exit codes: 0 ok, 1 bound failure, 2 config error, 3 compute error
constexpr int kOk = 0;
constexpr int kBoundFailure = 1;
constexpr int kConfigError = 2;
constexpr int kComputeError = 3;

struct CliOptions {
  std::string config_path;
  std::string out_override;
  std::string grid_override;
  bool quiet = false;
};

int run_stage(const std::string& stage_name, const CliOptions& opts) {
  topoqfi::RunConfig config;
  try {
    std::ifstream in(opts.config_path);
    if (!in) {
      std::cerr << "cannot read config file: " << opts.config_path << "\n";
      return kConfigError;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    config = topoqfi::parse_config(buffer.str());

    if (!opts.out_override.empty()) config.output = opts.out_override;
    if (!opts.grid_override.empty()) {
      const auto sep = opts.grid_override.find_first_of("xX");
      int nx = 0, ny = 0;
      try {
        nx = std::stoi(opts.grid_override.substr(0, sep));
        ny = sep == std::string::npos ? nx : std::stoi(opts.grid_override.substr(sep + 1));
      } catch (const std::exception&) {
        nx = 0;
      }
      if (nx < 8 || ny < 8) {
        std::cerr << "--grid expects NxN with N >= 8, got '" << opts.grid_override << "'\n";
        return kConfigError;
      }
      config.nx = nx;
      config.ny = ny;
    }
  } catch (const topoqfi::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }

  try {
    const topoqfi::RunReport report =
        topoqfi::run_pipeline(config, topoqfi::stage_from_name(stage_name), opts.quiet);
    if (report.any_bound_failed()) {
      if (!opts.quiet) std::cerr << "one or more bound checks failed\n";
      return kBoundFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return kComputeError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum Fisher information and topological bounds on BZ grids"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string invoked_stage;
  for (const char* name : {"geometry", "qfi", "bounds", "speedlimit", "all"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " stage");
    sub->add_option("config", opts.config_path, "run config (JSON)")->required();
    sub->add_option("--out", opts.out_override, "output directory override");
    sub->add_option("--grid", opts.grid_override, "grid override, e.g. 128x128");
    sub->add_flag("--quiet", opts.quiet, "suppress console summary");
    sub->callback([name, &invoked_stage] { invoked_stage = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return run_stage(invoked_stage, opts);
}
