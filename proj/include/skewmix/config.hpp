#pragma once

// Experiment configuration: a TOML subset or its JSON mirror, merged onto
// built-in defaults and checked key by key.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace skewmix {

/// Schema or parse failure; `path` names the offending field ("thermo.grid")
/// or the file and line for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses the supported TOML subset: [table] and [a.b] headers, bare keys,
/// strings, integers, floats, booleans and arrays of those.
nlohmann::json parse_toml(const std::string& text, const std::string& source = "<string>");

/// Every accepted key with its default value.
const nlohmann::json& default_config();

/// Merges `user` onto the defaults. Unknown keys and type mismatches throw
/// ConfigError carrying the dotted field path.
nlohmann::json validate_config(const nlohmann::json& user);

/// Applies SKEWMIX_<TABLE>_<KEY> environment overrides, e.g. SKEWMIX_THERMO_GRID.
void apply_env_overrides(nlohmann::json& config);

/// Loads .toml or .json by extension, validates and applies overrides.
nlohmann::json load_config(const std::string& path);

/// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const nlohmann::json& config);

}  // namespace skewmix
