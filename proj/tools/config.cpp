#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hermite_riesz/error.hpp"
#include "hermite_riesz/spectral_core.hpp"

namespace hermite_riesz::cli {

namespace {

std::string where(const std::string& section, const std::string& key)
{
  return "[" + section + "] " + key;
}

double parse_double(const std::string& s, const std::string& what)
{
  std::string t = boost::algorithm::trim_copy(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw ConfigError(what + ": expected a finite number, got '" + s + "'");
  return v;
}

long long parse_integer(const std::string& s, const std::string& what)
{
  std::string t = boost::algorithm::trim_copy(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s)
{
  std::vector<std::string> parts;
  std::string t = boost::algorithm::trim_copy(s);
  if (t.empty()) return parts;
  boost::algorithm::split(parts, t, boost::algorithm::is_any_of(","));
  for (auto& p : parts) boost::algorithm::trim(p);
  return parts;
}

}  // namespace

const std::map<std::string, std::string>& subcommand_sections()
{
  static const std::map<std::string, std::string> m = {
      {"basis-build", "basis"},   {"restriction-sweep", "restriction"}, {"apriori", "apriori"},
      {"decomp-audit", "decomp"}, {"fs-check", "fs"},                   {"cz-audit", "cz"},
      {"nk-bound", "nk"},         {"proof-trace", "proof"},             {"weaktype-sweep", "weaktype"},
      {"converge", "converge"},   {"potential", "potential"},
  };
  return m;
}

Section::Section(std::string name, std::map<std::string, std::string> values)
    : name_(std::move(name)), values_(std::move(values))
{
}

const std::string* Section::raw(const std::string& key)
{
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  read_.insert(key);
  return &it->second;
}

int Section::get_int(const std::string& key, int fallback)
{
  auto* s = raw(key);
  if (!s) return fallback;
  long long v = parse_integer(*s, where(name_, key));
  if (v < -1000000000LL || v > 1000000000LL) throw ConfigError(where(name_, key) + ": out of range");
  return static_cast<int>(v);
}

double Section::get_double(const std::string& key, double fallback)
{
  auto* s = raw(key);
  return s ? parse_double(*s, where(name_, key)) : fallback;
}

bool Section::get_bool(const std::string& key, bool fallback)
{
  auto* s = raw(key);
  if (!s) return fallback;
  std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(*s));
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(where(name_, key) + ": expected true or false, got '" + *s + "'");
}

std::string Section::get_string(const std::string& key, const std::string& fallback)
{
  auto* s = raw(key);
  return s ? boost::algorithm::trim_copy(*s) : fallback;
}

std::vector<double> Section::get_list(const std::string& key, const std::vector<double>& fallback)
{
  auto* s = raw(key);
  if (!s) return fallback;
  std::vector<double> out;
  for (const auto& p : split_list(*s)) out.push_back(parse_double(p, where(name_, key)));
  return out;
}

std::vector<int> Section::get_int_list(const std::string& key, const std::vector<int>& fallback)
{
  auto* s = raw(key);
  if (!s) return fallback;
  std::vector<int> out;
  for (const auto& p : split_list(*s)) out.push_back(static_cast<int>(parse_integer(p, where(name_, key))));
  return out;
}

void Section::reject_unread() const
{
  for (const auto& [k, v] : values_)
    if (!read_.count(k)) throw ConfigError(where(name_, k) + ": unknown key");
}

double ExperimentConfig::delta_value() const
{
  return delta ? *delta : std::max(0.0, critical_index(dim, p).delta);
}

Section& ExperimentConfig::section(const std::string& name)
{
  auto it = sections.find(name);
  if (it == sections.end()) it = sections.emplace(name, Section(name, {})).first;
  return it->second;
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig load_config(const std::string& path)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  std::set<std::string> allowed = {"experiment"};
  for (const auto& [sub, sec] : subcommand_sections()) allowed.insert(sec);

  ExperimentConfig cfg;
  for (const auto& [name, node] : tree) {
    if (!allowed.count(name)) throw ConfigError("config: unknown section [" + name + "]");
    if (!node.data().empty()) throw ConfigError("config: key '" + name + "' outside any section");
    std::map<std::string, std::string> values;
    for (const auto& [k, v] : node) values[k] = v.data();
    if (name != "experiment") {
      cfg.sections.emplace(name, Section(name, values));
      continue;
    }
    Section s(name, values);
    cfg.dim = s.get_int("dim", cfg.dim);
    cfg.p = s.get_double("p", cfg.p);
    if (s.has("delta")) cfg.delta = s.get_double("delta", 0.0);
    cfg.K = s.get_int("K", cfg.K);
    cfg.R = s.get_list("R", cfg.R);
    if (s.has("seed")) {
      std::string t = s.get_string("seed", "");
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("[experiment] seed: expected an unsigned integer, got '" + t + "'");
      cfg.seed = v;
    }
    cfg.out = s.get_string("out", cfg.out);
    cfg.cache = s.get_string("cache", cfg.cache);
    s.reject_unread();
  }

  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("[experiment] dim: must be 1, 2 or 3");
  if (!(cfg.p >= 1)) throw ConfigError("[experiment] p: must be >= 1");
  if (cfg.delta && !(*cfg.delta >= 0)) throw ConfigError("[experiment] delta: must be >= 0");
  if (cfg.K < 1) throw ConfigError("[experiment] K: must be >= 1");
  if (cfg.R.empty()) throw ConfigError("[experiment] R: list is empty");
  for (std::size_t i = 0; i < cfg.R.size(); ++i) {
    if (!(cfg.R[i] > 0)) throw ConfigError("[experiment] R: values must be positive");
    if (i && !(cfg.R[i] > cfg.R[i - 1])) throw ConfigError("[experiment] R: values must be ascending");
  }
  return cfg;
}

}  // namespace hermite_riesz::cli
