#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace ovfit {

/// Parses flat `key value` text: one pair per line, `#` starts a comment,
/// blank lines ignored. Duplicate keys are rejected.
std::map<std::string, std::string> parse_keyval(const std::string& text);

double keyval_number(const std::map<std::string, std::string>& kv, const std::string& key);
std::uint64_t keyval_count(const std::map<std::string, std::string>& kv, const std::string& key);

}  // namespace ovfit
