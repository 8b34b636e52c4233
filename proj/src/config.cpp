#include "globalnull/config.hpp"

#include <fstream>
#include <istream>
#include <map>

namespace globalnull {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::vector<ConfigEntry> parse_config(std::istream& is) {
    std::vector<ConfigEntry> entries;
    std::map<std::string, std::size_t> index;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        for (std::size_t i = 1; i < line.size(); ++i) {
            if (line[i] == '#' && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line = trim(line.substr(0, i));
                break;
            }
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (auto it = index.find(key); it != index.end()) {
            entries[it->second] = {key, value, line_no};
        } else {
            index.emplace(key, entries.size());
            entries.push_back({key, value, line_no});
        }
    }
    return entries;
}

std::vector<ConfigEntry> load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    return parse_config(is);
}

std::vector<std::string> config_to_args(const std::vector<ConfigEntry>& entries,
                                        const std::set<std::string>& flag_keys) {
    std::vector<std::string> args;
    for (const auto& e: entries) {
        if (flag_keys.contains(e.key)) {
            if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value.empty()) {
                args.push_back("--" + e.key);
            } else if (!(e.value == "false" || e.value == "0" || e.value == "no")) {
                throw ConfigError("config line " + std::to_string(e.line) + ": '" + e.key + "' takes true or false");
            }
            continue;
        }
        args.push_back("--" + e.key);
        args.push_back(e.value);
    }
    return args;
}

} // namespace globalnull
