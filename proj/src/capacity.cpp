#include "ovfit/capacity.hpp"

#include <filesystem>

#include "ovfit/error.hpp"
#include "ovfit/io.hpp"
#include "ovfit/keyval.hpp"

namespace ovfit {

namespace {

void validate_profile(const DeviceProfile& p) {
    if (p.logic_cells == 0 || p.flip_flops == 0 || p.dist_mem_bits == 0)
        throw Error("device profile '" + p.name + "': all capacities must be > 0");
}

std::string known_profiles() {
    std::string out;
    for (const auto& n : builtin_profile_names()) {
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

}  // namespace

const std::vector<std::string>& builtin_profile_names() {
    static const std::vector<std::string> names = {"zcu104"};
    return names;
}

DeviceProfile builtin_profile(const std::string& name) {
    if (name == "zcu104") {
        // Zynq UltraScale+ ZCU104: 504K logic cells, 461K flip-flops and
        // 6.2 Mb of distributed LUT memory (decimal megabits).
        return {"zcu104", 504'000, 461'000, 6'200'000};
    }
    throw Error("unknown device profile '" + name + "' (known: " + known_profiles() + ")");
}

DeviceProfile parse_profile(const std::string& text) {
    const auto kv = parse_keyval(text);
    for (const auto& [key, value] : kv) {
        (void)value;
        if (key != "name" && key != "logic_cells" && key != "flip_flops" && key != "dist_mem_bits")
            throw Error("unknown profile key '" + key + "'");
    }
    DeviceProfile p;
    p.name = kv.count("name") ? kv.at("name") : "custom";
    p.logic_cells = keyval_count(kv, "logic_cells");
    p.flip_flops = keyval_count(kv, "flip_flops");
    p.dist_mem_bits = keyval_count(kv, "dist_mem_bits");
    validate_profile(p);
    return p;
}

DeviceProfile load_profile(const std::string& path) {
    try {
        return parse_profile(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

DeviceProfile resolve_profile(const std::string& name_or_path) {
    for (const auto& n : builtin_profile_names())
        if (name_or_path == n) return builtin_profile(name_or_path);
    if (std::filesystem::exists(name_or_path)) return load_profile(name_or_path);
    throw Error("unknown profile '" + name_or_path + "': not a builtin (" + known_profiles() +
                ") and no such file");
}

Verdict gate(const ResourceEstimate& est, const DeviceProfile& profile, double ceiling_percent) {
    if (!(ceiling_percent > 0.0 && ceiling_percent <= 100.0))
        throw Error("ceiling_percent must be in (0, 100]");
    validate_profile(profile);

    const struct {
        const char* name;
        std::uint64_t required;
        std::uint64_t available;
    } rows[3] = {
        {"logic_cells", est.luts, profile.logic_cells},
        {"flip_flops", est.ffs, profile.flip_flops},
        {"dist_mem_bits", est.mem_bits, profile.dist_mem_bits},
    };

    Verdict v;
    std::size_t limiting = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        ResourceUsage& u = v.usage[i];
        u.resource = rows[i].name;
        u.required = rows[i].required;
        u.available = rows[i].available;
        const double required = static_cast<double>(u.required);
        const double available = static_cast<double>(u.available);
        u.utilization_percent = 100.0 * required / available;
        // Inclusive boundary: required == available passes at ceiling 100.
        if (!(100.0 * required <= ceiling_percent * available)) v.fits = false;
        if (u.utilization_percent > v.usage[limiting].utilization_percent) limiting = i;
    }
    v.limiting_resource = v.usage[limiting].resource;
    return v;
}

}  // namespace ovfit
