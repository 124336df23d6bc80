#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "hermite_riesz/error.hpp"

extern "C" void openblas_set_num_threads(int);

using namespace hermite_riesz;

int main(int argc, char** argv)
{
  CLI::App app{"Bochner-Riesz means of the Hermite operator: experiment runner"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config_path, out_dir, cache_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;

  std::string chosen;
  for (const auto& [name, section] : cli::subcommand_sections()) {
    auto* sub = app.add_subcommand(name, "reads the [" + section + "] section");
    sub->add_option("--config", config_path, "INI file with [experiment] and subcommand sections");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--cache", cache_dir, "cache directory");
    sub->add_option("--seed", seed, "test-family seed");
    sub->add_option("--threads", threads, "BLAS threads")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "print nothing on success");
    sub->callback([&chosen, name = name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cli::RunContext ctx;
    ctx.cfg = config_path.empty() ? cli::default_config() : cli::load_config(config_path);
    ctx.quiet = quiet;
    ctx.threads = threads;
    auto* sub = app.get_subcommand(chosen);
    if (!out_dir.empty()) ctx.cfg.out = out_dir;
    if (!cache_dir.empty()) ctx.cfg.cache = cache_dir;
    if (sub->count("--seed")) ctx.cfg.seed = seed;
    openblas_set_num_threads(threads);
    std::filesystem::create_directories(ctx.cfg.out);
    std::filesystem::create_directories(ctx.cfg.cache);
    return cli::run_subcommand(chosen, ctx);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
}
