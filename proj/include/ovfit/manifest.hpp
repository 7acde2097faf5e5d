#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ovfit {

inline constexpr int kFormatVersion = 1;

/// Provenance block echoed into every output document so a result can be
/// regenerated from the file alone. Deliberately carries no timestamps:
/// reruns of the same command must produce byte-identical output.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;      ///< label -> path
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> parameters;  ///< flag -> value
};

/// "# ..." lines prepended to CSV outputs.
std::vector<std::string> manifest_comment_lines(const RunManifest& m);
/// Indented block for text reports.
std::string manifest_text_block(const RunManifest& m);

}  // namespace ovfit
