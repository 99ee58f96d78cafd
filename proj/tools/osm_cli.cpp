#include <iostream>

#include "CLI11.hpp"
#include "osm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Skeleton solver and spectral harness for the Helmholtz cavity"};
  app.require_subcommand(1);
  std::string config;
  std::uint64_t seed = 42;
  std::string out;
  for (const char* name : {"solve", "verify", "spectrum", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_option("--out", out, "output directory (default: config 'output')");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : osm::exit_config;
  }
  return osm::run_command(app.get_subcommands().front()->get_name(), config, seed, out, std::cout, std::cerr);
}
