#include "hypoou/cli/commands.hpp"
#include "hypoou/errors.hpp"
#include "hypoou/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace hypoou;

  std::string commands;
  for (const auto& name : cli::command_names()) commands += "  " + name + "\n";

  CLI::App app{"Numerical checks for degenerate Ornstein-Uhlenbeck operators"};
  app.footer("commands:\n" + commands + "\n" + cli::config_reference() +
             "\nexit status: 0 passed, 2 an assertion failed, 1 error");

  std::string configPath, group, action;
  cli::Options opts;
  unsigned threads = 0;
  int order = -1;
  app.add_option("config", configPath, "run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("group", group, "command group")->required();
  app.add_option("action", action, "command within the group")->required();
  app.add_option("--out", opts.out, "report directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (default: hardware)");
  app.add_option("--order", order, "derivative order for bounds commands")->check(CLI::Range(0, 2));
  app.add_flag("--quiet", opts.quiet, "no per-assertion log");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::RunConfig cfg = cli::load_config(configPath);
    if (const char* s = std::getenv("HYPOOU_SEED")) cfg.seed = std::stoull(s);
    if (threads > 0) set_thread_count(threads);
    if (order >= 0) opts.order = order;
    return cli::dispatch(cfg, group, action, opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
