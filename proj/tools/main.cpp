#include "fracham/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Ground states of fractional Hamiltonian systems by Nehari-manifold minimisation"};
  app.require_subcommand(1);

  fracham::CommandConfig cmd;
  std::string config_path, output_dir;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> subs[] = {
      {"validate", "Check the structural hypotheses on the potential and weight"},
      {"operators", "Grid-refinement and consistency study of the fractional operators"},
      {"solve", "Ground state of the truncated line problem at problem.lambda"},
      {"bvp", "Ground state of the Dirichlet problem on [0, T_end]"},
      {"sweep", "Lambda sweep comparing line ground states with the Dirichlet one"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* sc = app.add_subcommand(name, help);
    sc->add_option("-c,--config", config_path, "INI configuration file");
    sc->add_option("-o,--output-dir", output_dir,
                   std::string("Output directory (overrides run.output_dir and ") + fracham::kOutputDirEnv + ")");
    sc->add_option("-s,--seed", seed, "Random seed (overrides run.seed)");
    sc->add_option("--set", cmd.overrides, "Override a key: section.key=value (repeatable)");
    sc->callback([&cmd, name = std::string(name)] { cmd.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fracham::kExitConfig;
  }

  for (CLI::App* sc : app.get_subcommands()) {
    if (sc->count("--config"))
      cmd.config_path = config_path;
    if (sc->count("--output-dir"))
      cmd.output_dir = output_dir;
    if (sc->count("--seed"))
      cmd.seed = seed;
  }
  return fracham::run(cmd, std::cout, std::cerr);
}
