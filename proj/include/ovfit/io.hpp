#pragma once

#include <string>

namespace ovfit {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Shortest decimal form that round-trips to the same double.
std::string to_decimal_string(double v);

}  // namespace ovfit
