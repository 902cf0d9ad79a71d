#include "adamregret/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "adamregret/errors.hpp"

namespace adamregret {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& k) {
    return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_';
    });
}

std::vector<std::string> split_list(const std::string& s) {
    std::string normalized = s;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream is(normalized);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

}  // namespace

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
    KeyValues kv;
    kv.source_ = source;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": invalid key '" + key + "'");
        }
        if (kv.entries_.count(key)) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        kv.entries_.emplace(std::move(key), Entry{std::move(value), line_no});
    }
    return kv;
}

KeyValues KeyValues::parse_string(const std::string& text, const std::string& source) {
    std::istringstream is(text);
    return parse(is, source);
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return parse(in, path.string());
}

void KeyValues::fail(const std::string& key, const std::string& msg) const {
    auto it = entries_.find(key);
    std::string where = source_;
    if (it != entries_.end()) where += ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": key '" + key + "': " + msg);
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    auto s = get(key);
    if (!s) return fallback;
    auto v = parse_double(*s);
    if (!v) fail(key, "not a number: '" + *s + "'");
    return *v;
}

std::uint64_t KeyValues::get_uint(const std::string& key, std::uint64_t fallback) const {
    auto s = get(key);
    if (!s) return fallback;
    auto v = parse_uint(*s);
    if (!v) fail(key, "not a nonnegative integer: '" + *s + "'");
    return *v;
}

std::string KeyValues::require_string(const std::string& key) const {
    auto s = get(key);
    if (!s) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return *s;
}

std::uint64_t KeyValues::require_uint(const std::string& key) const {
    if (!contains(key)) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return get_uint(key, 0);
}

std::vector<double> KeyValues::get_double_list(const std::string& key) const {
    std::vector<double> out;
    auto s = get(key);
    if (!s) return out;
    for (const auto& tok : split_list(*s)) {
        auto v = parse_double(tok);
        if (!v) fail(key, "not a number: '" + tok + "'");
        out.push_back(*v);
    }
    return out;
}

std::vector<std::uint64_t> KeyValues::get_uint_list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    auto s = get(key);
    if (!s) return out;
    for (const auto& tok : split_list(*s)) {
        auto v = parse_uint(tok);
        if (!v) fail(key, "not a nonnegative integer: '" + tok + "'");
        out.push_back(*v);
    }
    return out;
}

void KeyValues::reject_unknown(const std::vector<std::string>& allowed) const {
    for (const auto& [key, entry] : entries_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace adamregret
