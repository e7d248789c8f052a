// stratasim: strategic-classification response and loss experiments.
//
//   stratasim <respond|optimize|example1|study> --config <path> [--out <dir>] [--seed <u64>]
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime error.

#include <CLI11.hpp>
#include <iostream>

#include "stratasim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"strategic classification simulation toolkit"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
  };

  std::map<std::string, Args> args;
  for (const char* name : {"respond", "optimize", "example1", "study"}) {
    auto* sub = app.add_subcommand(name);
    auto& a = args[name];
    sub->add_option("--config", a.config, "run configuration file")->required();
    sub->add_option("--out", a.out, "output directory (overrides [run] out)");
    sub->add_option("--seed", a.seed, "seed (overrides [run] seed)")
        ->each([&a](const std::string&) { a.seed_given = true; });
  }

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  const Args& a = args[cmd];
  try {
    stratasim::RunConfig rc = stratasim::load_run_config_file(a.config);
    if (!a.out.empty()) rc.out_dir = a.out;
    if (a.seed_given) {
      rc.seed = a.seed;
      rc.seed_explicit = true;
      if (!rc.population_seed_explicit) {
        rc.population_seed = a.seed;
        rc.gaussian.seed = a.seed;
      }
    }
    if (cmd == "respond")
      stratasim::cmd_respond(rc);
    else if (cmd == "optimize")
      stratasim::cmd_optimize(rc);
    else if (cmd == "example1")
      stratasim::cmd_example1(rc);
    else
      stratasim::cmd_study(rc);
  } catch (const stratasim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
