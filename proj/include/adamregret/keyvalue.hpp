#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adamregret {

/// Flat `key = value` text as used by problem specs and run configs.
///
/// Grammar, one entry per line:
///   - blank lines and lines whose first non-blank character is '#' are ignored
///   - `key = value`; surrounding whitespace is trimmed; a trailing `# ...` is a comment
///   - keys are [A-Za-z0-9_]+ and may appear only once
/// Lists are whitespace- or comma-separated values.
class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& source = "<input>");
    static KeyValues parse_string(const std::string& text, const std::string& source = "<string>");
    static KeyValues load(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::string require_string(const std::string& key) const;
    std::uint64_t require_uint(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::uint64_t> get_uint_list(const std::string& key) const;

    /// Throws ConfigError if any key outside `allowed` is present.
    void reject_unknown(const std::vector<std::string>& allowed) const;

    const std::string& source() const noexcept { return source_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

    std::map<std::string, Entry> entries_;
    std::string source_;
};

/// Locale-independent parse of a whole string as double / unsigned integer.
std::optional<double> parse_double(const std::string& s);
std::optional<std::uint64_t> parse_uint(const std::string& s);

}  // namespace adamregret
