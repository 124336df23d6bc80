#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hermite_riesz::cli {

/// One [section] of the config file. Every key read is recorded so leftovers can be rejected.
class Section
{
 public:
  Section() = default;
  Section(std::string name, std::map<std::string, std::string> values);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  int get_int(const std::string& key, int fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback);
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback);

  /// ConfigError naming the first key that was never read.
  void reject_unread() const;

 private:
  const std::string* raw(const std::string& key);
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> read_;
};

struct ExperimentConfig
{
  int dim = 2;
  double p = 1.0;
  std::optional<double> delta;
  int K = 40;
  std::vector<double> R = {4, 8, 16, 32};
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string cache = "cache";
  std::map<std::string, Section> sections;  // subcommand sections

  double delta_value() const;
  /// The named section, empty if absent.
  Section& section(const std::string& name);
};

/// Parses an INI file: [experiment] plus optional per-subcommand sections.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig default_config();

/// Sections a subcommand may carry, by subcommand name.
const std::map<std::string, std::string>& subcommand_sections();

}  // namespace hermite_riesz::cli
