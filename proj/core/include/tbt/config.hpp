#pragma once

#include <stdexcept>
#include <string>

#include "tbt/harness.hpp"

namespace tbt {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Applies one `section.key = value` entry to the run configuration.
/// Throws ConfigError for unknown keys or unparsable values.
void apply_config_entry(RunConfig& cfg, const std::string& dotted_key,
                        const std::string& value);

/// INI-style file: `[section]` headers with `key = value` lines, or dotted
/// `section.key = value` lines outside any section. `#` and `;` start
/// comments. Unknown keys are rejected, not ignored.
void load_config_file(RunConfig& cfg, const std::string& path);

/// Effective configuration, one dotted key per line, parseable by
/// load_config_file (round-trips).
std::string show_config(const RunConfig& cfg);

}  // namespace tbt
