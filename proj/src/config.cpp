#include "qrev/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace qrev {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    cfg.raw_ = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << origin << ":" << lineno << ": expected 'key = value', got '" << line << "'";
            throw ConfigError(msg.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            std::ostringstream msg;
            msg << origin << ":" << lineno << ": empty key or value";
            throw ConfigError(msg.str());
        }
        if (cfg.entries_.count(key)) {
            std::ostringstream msg;
            msg << origin << ":" << lineno << ": duplicate key '" << key << "'";
            throw ConfigError(msg.str());
        }
        cfg.entries_[key] = {value, lineno};
    }
    return cfg;
}

void Config::fail(const std::string& key, const std::string& why) const {
    std::ostringstream msg;
    auto it = entries_.find(key);
    msg << origin_;
    if (it != entries_.end()) msg << ":" << it->second.line;
    msg << ": field '" << key << "': " << why;
    throw ConfigError(msg.str());
}

double Config::get_num(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, "missing required field");
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second.value, &used);
        if (used != it->second.value.size()) fail(key, "trailing junk after number");
        return v;
    } catch (const std::logic_error&) {
        fail(key, "not a number: '" + it->second.value + "'");
    }
}

double Config::get_num(const std::string& key, double fallback) const {
    return has(key) ? get_num(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const double v = get_num(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail(key, "expected an integer");
    return i;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

std::optional<double> Config::get_auto(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.value == "auto") return std::nullopt;
    return get_num(key);
}

void Config::restrict_keys(const std::map<std::string, bool>& known) const {
    for (const auto& [key, entry] : entries_) {
        if (!known.count(key)) {
            std::ostringstream msg;
            msg << origin_ << ":" << entry.line << ": unknown field '" << key << "'";
            throw ConfigError(msg.str());
        }
    }
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace qrev
