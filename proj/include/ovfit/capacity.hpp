#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ovfit/overlay.hpp"

namespace ovfit {

/// Capacities of one target device.
struct DeviceProfile {
    std::string name;
    std::uint64_t logic_cells = 0;
    std::uint64_t flip_flops = 0;
    std::uint64_t dist_mem_bits = 0;

    friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

DeviceProfile builtin_profile(const std::string& name);
const std::vector<std::string>& builtin_profile_names();
DeviceProfile parse_profile(const std::string& text);
DeviceProfile load_profile(const std::string& path);
/// Builtin name first, else a profile file path.
DeviceProfile resolve_profile(const std::string& name_or_path);

struct ResourceUsage {
    std::string resource;
    std::uint64_t required = 0;
    std::uint64_t available = 0;
    double utilization_percent = 0.0;
};

/// Fit decision: fits holds exactly when every gated utilization is at or
/// below the ceiling.
struct Verdict {
    bool fits = true;
    std::array<ResourceUsage, 3> usage = {};  ///< logic_cells, flip_flops, dist_mem_bits
    std::string limiting_resource;            ///< max utilization; ties keep the earlier entry
};

/// Gates luts/ffs/mem_bits against the profile. Boundary inclusive:
/// required == available passes at ceiling 100. Wires and fanout carry no
/// device capacity and are not gated.
Verdict gate(const ResourceEstimate& est, const DeviceProfile& profile,
             double ceiling_percent = 100.0);

}  // namespace ovfit
