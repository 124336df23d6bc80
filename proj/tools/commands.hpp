#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace hermite_riesz::cli {

struct RunContext
{
  ExperimentConfig cfg;
  bool quiet = false;
  int threads = 1;
};

struct Check
{
  std::string name;
  double value;
  std::string relation;  // "<=", ">=", "=="
  double threshold;
  bool pass;
};

struct Artifacts
{
  std::string csv;
  std::string svg;
  std::string anchor;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> parameters;

  bool passed() const;
  void check(const std::string& name, double value, const std::string& relation, double threshold);
};

using Command = std::function<Artifacts(RunContext&)>;

const std::map<std::string, Command>& commands();

/// Runs one subcommand and writes <out>/<sub>.{csv,svg,json}. Returns 0 on pass, 1 on a failed check.
int run_subcommand(const std::string& name, RunContext& ctx);

}  // namespace hermite_riesz::cli
