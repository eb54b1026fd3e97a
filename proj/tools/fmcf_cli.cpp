#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "fmcf/cases.hpp"
#include "fmcf/config.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
};

int execute(const std::string& mode, const Flags& f) {
  fmcf::RunConfig cfg;
  try {
    cfg = fmcf::load_config(f.config);
  } catch (const fmcf::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  if (cfg.mode != mode) {
    std::fprintf(stderr, "%s: config mode is '%s', not '%s'\n", f.config.c_str(), cfg.mode.c_str(), mode.c_str());
    return 2;
  }
  fmcf::RunOptions opt;
  opt.threads = f.threads;
  opt.out_dir = f.out;
  try {
    const auto rep = fmcf::run_case(cfg, opt);
    for (const auto& [k, v] : rep.summary) std::printf("%s = %.17g\n", k.c_str(), v);
    for (const auto& file : rep.files) std::printf("wrote %s\n", file.c_str());
    std::printf("%s (%.2f s)\n", fmcf::summary_line(rep).c_str(), rep.seconds);
    return rep.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "FAIL %s: %s\n", cfg.name.c_str(), e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set forced mean curvature flow with Neumann boundary conditions"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  const std::pair<const char*, const char*> modes[] = {
      {"simulate", "evolve a level-set field and write diagnostics and snapshots"},
      {"radial-limit", "radial reduction: region classification and the large-time limit"},
      {"channel-analyze", "parabolic channel: stationary arcs, barriers and convergence"},
      {"check-condition", "evaluate the forcing condition on the domain boundary"},
      {"bounds", "compare measured sup and Lipschitz norms with the predicted bounds"}};
  for (const auto& [mode, help] : modes) {
    auto* sub = app.add_subcommand(mode, help);
    sub->add_option("--config", flags.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", flags.threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output directory (overrides the config)");
    sub->callback([&chosen, mode] { chosen = mode; });
  }
  CLI11_PARSE(app, argc, argv);
  return execute(chosen, flags);
}
