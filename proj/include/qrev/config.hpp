#ifndef QREV_CONFIG_HPP
#define QREV_CONFIG_HPP

#include <map>
#include <optional>
#include <string>

#include "qrev/errors.hpp"

namespace qrev {

struct ConfigError : DomainError {
    using DomainError::DomainError;
};

// Flat key-value configuration: one `section.key = value` per line, `#`
// comments, blank lines ignored. Unknown keys are rejected so typos fail
// loudly. Values are numbers, or the literal `auto` where a key documents
// it.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    double get_num(const std::string& key) const;
    double get_num(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    // number or "auto" -> nullopt
    std::optional<double> get_auto(const std::string& key) const;

    // Error if any key outside `known` appears (exact match).
    void restrict_keys(const std::map<std::string, bool>& known) const;

    const std::string& text() const { return raw_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries_;
    std::string origin_;
    std::string raw_;

    [[noreturn]] void fail(const std::string& key, const std::string& why) const;
};

// FNV-1a 64-bit over the raw config text; recorded in every CSV header so
// outputs are traceable to their inputs.
std::uint64_t fnv1a64(const std::string& data);

} // namespace qrev

#endif
