#include "polarsep/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "polarsep/errors.hpp"
#include "polarsep/hdr_merge.hpp"
#include "polarsep/pfm.hpp"

namespace polarsep::imaging {

using nlohmann::json;

std::string to_string(FrameRole role) {
    switch (role) {
        case FrameRole::regular: return "regular";
        case FrameRole::graycode: return "graycode";
        case FrameRole::checker: return "checker";
    }
    return "regular";
}

FrameRole frame_role_from_string(const std::string& s) {
    if (s == "regular") return FrameRole::regular;
    if (s == "graycode") return FrameRole::graycode;
    if (s == "checker") return FrameRole::checker;
    throw FormatError("manifest: unknown frame role '" + s + "'");
}

CaptureManifest manifest_from_json(const json& j) {
    if (!j.is_object() || !j.contains("frames") || !j["frames"].is_array()) {
        throw FormatError("manifest: missing 'frames' array");
    }
    CaptureManifest m;
    if (j.contains("saturation_level")) {
        m.saturation_level = j["saturation_level"].get<double>();
        if (!(m.saturation_level > 0.0)) throw FormatError("manifest: saturation_level must be positive");
    }
    if (j.contains("attributes")) m.attributes = j["attributes"];

    for (const auto& f : j["frames"]) {
        FrameRecord r;
        try {
            r.file = f.at("file").get<std::string>();
            r.theta_c_deg = f.at("theta_c_deg").get<double>();
            r.theta_l_deg = f.at("theta_l_deg").get<double>();
            r.exposure_s = f.value("exposure_s", 1.0);
            if (f.contains("pattern_id") && !f["pattern_id"].is_null()) {
                r.pattern_id = f["pattern_id"].get<std::string>();
            }
            r.role = frame_role_from_string(f.value("role", std::string("regular")));
        } catch (const json::exception& e) {
            throw FormatError(std::string("manifest: bad frame record: ") + e.what());
        }
        if (!std::isfinite(r.theta_c_deg) || !std::isfinite(r.theta_l_deg)) {
            throw FormatError("manifest: frame angles must be finite");
        }
        if (!(r.exposure_s > 0.0)) throw FormatError("manifest: exposure_s must be positive");
        m.frames.push_back(std::move(r));
    }
    if (m.frames.empty()) throw FormatError("manifest: no frames");
    return m;
}

json manifest_to_json(const CaptureManifest& m) {
    json frames = json::array();
    for (const auto& r : m.frames) {
        json f = {{"file", r.file},
                  {"theta_c_deg", r.theta_c_deg},
                  {"theta_l_deg", r.theta_l_deg},
                  {"exposure_s", r.exposure_s},
                  {"role", to_string(r.role)}};
        f["pattern_id"] = r.pattern_id ? json(*r.pattern_id) : json(nullptr);
        frames.push_back(std::move(f));
    }
    json j = {{"format", "polarsep-manifest"}, {"version", 1}};
    if (std::isfinite(m.saturation_level)) j["saturation_level"] = m.saturation_level;
    j["frames"] = std::move(frames);
    if (!m.attributes.empty()) j["attributes"] = m.attributes;
    return j;
}

CaptureManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("manifest: " + std::string(e.what()));
    }
    return manifest_from_json(j);
}

void write_manifest(const CaptureManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot create " + path.string());
    out << manifest_to_json(m).dump(2) << '\n';
    if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

std::vector<PatternStack> load_stacks(const CaptureManifest& m, const std::filesystem::path& base_dir) {
    struct Group {
        std::string pattern;
        FrameRole role;
        double c, l;
        std::vector<ExposedFrame> frames;
    };
    std::vector<Group> groups;
    auto key_matches = [](const Group& g, const std::string& p, double c, double l) {
        return g.pattern == p && g.c == c && g.l == l;
    };

    for (const auto& r : m.frames) {
        const std::string pattern = r.pattern_id.value_or("");
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const Group& g) { return key_matches(g, pattern, r.theta_c_deg, r.theta_l_deg); });
        if (it == groups.end()) {
            groups.push_back({pattern, r.role, r.theta_c_deg, r.theta_l_deg, {}});
            it = std::prev(groups.end());
        }
        it->frames.push_back({read_pfm(base_dir / r.file), r.exposure_s});
    }

    std::vector<PatternStack> out;
    for (auto& g : groups) {
        auto sit = std::find_if(out.begin(), out.end(), [&](const PatternStack& s) { return s.pattern_id == g.pattern; });
        if (sit == out.end()) {
            out.push_back({g.pattern, g.role, {}});
            sit = std::prev(out.end());
        }
        FloatImage merged = merge_hdr(g.frames, m.saturation_level);
        if (!sit->stack.frames.empty() && !merged.same_shape(sit->stack.frames.front())) {
            throw DimensionMismatch("frames of pattern '" + g.pattern + "' differ in dimensions");
        }
        sit->stack.frames.push_back(to_double_image(merged));
        sit->stack.pairs.push_back(PolarizerPair::from_degrees(g.c, g.l));
    }
    return out;
}

}  // namespace polarsep::imaging
