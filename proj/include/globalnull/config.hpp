#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace globalnull {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat key-value configuration. Grammar, one entry per line:
//   key = value      (whitespace around '=' optional)
//   # comment        (also after a value, when preceded by whitespace)
// Keys are the long CLI flag names without dashes. Repeated keys: last wins.
struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

std::vector<ConfigEntry> parse_config(std::istream& is);
std::vector<ConfigEntry> load_config(const std::filesystem::path& path);

// Expands entries into "--key value" tokens. Keys in `flag_keys` are boolean
// switches: "true"/"1"/"yes" emit "--key", "false"/"0"/"no" emit nothing.
std::vector<std::string> config_to_args(const std::vector<ConfigEntry>& entries,
                                        const std::set<std::string>& flag_keys);

} // namespace globalnull
