#include "ovfit/keyval.hpp"

#include <charconv>
#include <sstream>

#include "ovfit/error.hpp"

namespace ovfit {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::map<std::string, std::string> parse_keyval(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        std::string value;
        std::getline(ls, value);
        value = trim(value);
        if (value.empty())
            throw Error("key-value line " + std::to_string(lineno) + ": missing value for '" + key + "'");
        if (kv.count(key))
            throw Error("key-value line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.emplace(std::move(key), std::move(value));
    }
    return kv;
}

double keyval_number(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error("missing key '" + key + "'");
    const std::string& tok = it->second;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error("key '" + key + "': not a number: '" + tok + "'");
    return v;
}

std::uint64_t keyval_count(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error("missing key '" + key + "'");
    const std::string& tok = it->second;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw Error("key '" + key + "': not a non-negative integer: '" + tok + "'");
    return v;
}

}  // namespace ovfit
