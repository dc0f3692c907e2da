// Flat key=value run configuration: values come from an optional config
// file with CLI flags layered on top. Unknown keys abort before any
// computation.
#ifndef STACKMNAR_TOOLS_RUN_CONFIG_HPP
#define STACKMNAR_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stackmnar::cli {

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string str(const std::string& key, const std::string& fallback = "") const;
  double num(const std::string& key, double fallback) const;
  double required_num(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::uint64_t seed() const;
  bool flag(const std::string& key, bool fallback = false) const;
  std::vector<std::string> name_list(const std::string& key) const;  // comma separated
  std::vector<double> number_list(const std::string& key) const;

  // Canonical "subcommand\nkey=value\n..." serialization (sorted keys).
  std::string canonical() const;
  // FNV-1a 64-bit hash of the canonical serialization.
  std::uint64_t hash() const;
};

// Allowed keys for a subcommand; throws listing the offending key otherwise.
const std::set<std::string>& allowed_keys(const std::string& subcommand);

// Reads key=value lines ('#' comments and blank lines ignored), overlays the
// explicit CLI entries, and validates the key set.
RunConfig make_run_config(const std::string& subcommand, const std::string& config_path,
                          const std::map<std::string, std::string>& cli_entries);

}  // namespace stackmnar::cli

#endif
