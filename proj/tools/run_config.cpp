#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stackmnar::cli {

namespace {

double parse_number(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty()) {
    throw std::invalid_argument("config key '" + key + "': cannot parse number '" + value + "'");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double RunConfig::num(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_number(key, it->second);
}

double RunConfig::required_num(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) {
    throw std::invalid_argument("subcommand '" + subcommand + "' requires key '" + key + "'");
  }
  return parse_number(key, it->second);
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const double v = num(key, fallback);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw std::invalid_argument("config key '" + key + "' must be an integer");
  }
  return i;
}

std::uint64_t RunConfig::seed() const {
  auto it = kv.find("seed");
  if (it == kv.end()) return 20260401ULL;
  std::uint64_t out = 0;
  const char* first = it->second.data();
  const char* last = it->second.data() + it->second.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("config key 'seed': cannot parse '" + it->second + "'");
  }
  return out;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "' must be a boolean, got '" + v + "'");
}

std::vector<std::string> RunConfig::name_list(const std::string& key) const {
  std::vector<std::string> out;
  auto it = kv.find(key);
  if (it == kv.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : name_list(key)) out.push_back(parse_number(key, item));
  return out;
}

std::string RunConfig::canonical() const {
  std::string out = subcommand;
  out.push_back('\n');
  for (const auto& [key, value] : kv) {  // std::map iterates sorted
    out += key;
    out.push_back('=');
    out += value;
    out.push_back('\n');
  }
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::set<std::string>& allowed_keys(const std::string& subcommand) {
  static const std::set<std::string> common{"input",  "out_dir", "seed",
                                            "na_token", "workers", "target",
                                            "mar",    "observed", "binary"};
  static const std::set<std::string> impute = [] {
    std::set<std::string> keys = common;
    keys.insert({"m", "iterations", "fixed_sigma"});
    return keys;
  }();
  static const std::set<std::string> weight = [] {
    std::set<std::string> keys = impute;
    keys.insert({"imputations", "phi1", "link", "mnar_vars"});
    return keys;
  }();
  static const std::set<std::string> analyze = [] {
    std::set<std::string> keys = weight;
    keys.insert({"phi1_grid", "analysis", "outcome", "covariates", "intercept", "se",
                 "boot_reps"});
    return keys;
  }();
  static const std::set<std::string> simulate{
      "out_dir", "seed",     "workers",   "n",       "family",   "true_phi1",
      "phi1_grid", "m",      "iterations", "replicates", "methods", "se",
      "boot_reps", "no_plots", "fixed_sigma"};
  if (subcommand == "impute") return impute;
  if (subcommand == "weight") return weight;
  if (subcommand == "analyze") return analyze;
  if (subcommand == "simulate") return simulate;
  throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
}

RunConfig make_run_config(const std::string& subcommand, const std::string& config_path,
                          const std::map<std::string, std::string>& cli_entries) {
  RunConfig config;
  config.subcommand = subcommand;

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    " is not key=value: '" + line + "'");
      }
      config.kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }
  for (const auto& [key, value] : cli_entries) config.kv[key] = value;

  const auto& allowed = allowed_keys(subcommand);
  for (const auto& [key, value] : config.kv) {
    if (!allowed.count(key)) {
      throw std::invalid_argument("unknown config key '" + key + "' for subcommand '" +
                                  subcommand + "'");
    }
  }
  return config;
}

}  // namespace stackmnar::cli
