#include "ovfit/manifest.hpp"

#include <sstream>

#include "json_detail.hpp"

namespace ovfit {

std::vector<std::string> manifest_comment_lines(const RunManifest& m) {
    std::vector<std::string> out;
    out.push_back("# command: " + m.command);
    out.push_back("# format_version: " + std::to_string(kFormatVersion));
    for (const auto& [label, path] : m.inputs) out.push_back("# input " + label + ": " + path);
    if (m.seed) out.push_back("# seed: " + std::to_string(*m.seed));
    for (const auto& [key, value] : m.parameters)
        out.push_back("# parameter " + key + ": " + value);
    return out;
}

std::string manifest_text_block(const RunManifest& m) {
    std::ostringstream out;
    out << "run manifest:\n";
    out << "  command: " << m.command << "\n";
    out << "  format_version: " << kFormatVersion << "\n";
    for (const auto& [label, path] : m.inputs) out << "  input " << label << ": " << path << "\n";
    if (m.seed) out << "  seed: " << *m.seed << "\n";
    for (const auto& [key, value] : m.parameters)
        out << "  parameter " << key << ": " << value << "\n";
    return out.str();
}

namespace detail {

nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["format_version"] = kFormatVersion;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [label, path] : m.inputs) inputs[label] = path;
    j["inputs"] = std::move(inputs);
    if (m.seed) j["seed"] = *m.seed;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [key, value] : m.parameters) params[key] = value;
    j["parameters"] = std::move(params);
    return j;
}

}  // namespace detail

}  // namespace ovfit
