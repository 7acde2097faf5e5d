#pragma once

#include <stdexcept>
#include <string>

namespace ovfit {

/// Thrown for invalid inputs, malformed files, and count overflow.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ovfit
