#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace iab::cli;

  CLI::App app{"Integrated access and backhaul planning: rate allocation, fiber-drop sweeps, self-checks"};
  app.set_version_flag("--version", "iabplan " IABPLAN_VERSION);
  app.set_config("--config", "", "Flat `key = value` file; command-line options override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  add_options(app, cfg);

  CLI::App* run = app.add_subcommand("run", "Solve the configured scenarios and write reports");
  CLI::App* sweep = app.add_subcommand("sweep", "GM versus number of fiber drops");
  CLI::App* verify = app.add_subcommand("verify", "Analytic, oracle, ordering and certificate checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return guarded([&] { return cmd_run(cfg, std::cout); }, std::cerr);
  if (sweep->parsed()) return guarded([&] { return cmd_sweep(cfg, std::cout); }, std::cerr);
  if (verify->parsed()) return guarded([&] { return cmd_verify(cfg, std::cout); }, std::cerr);
  return kExitConfig;
}
