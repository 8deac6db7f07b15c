#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "polarsep/image.hpp"

namespace polarsep::imaging {

enum class FrameRole { regular, graycode, checker };

std::string to_string(FrameRole role);
FrameRole frame_role_from_string(const std::string& s);

struct FrameRecord {
    std::string file;  ///< relative to the manifest's directory
    double theta_c_deg = 0.0;
    double theta_l_deg = 0.0;
    double exposure_s = 1.0;
    std::optional<std::string> pattern_id;
    FrameRole role = FrameRole::regular;
};

/// Capture description stored as UTF-8 JSON next to the frames.
///
/// `attributes` carries optional blocks written by the simulator (rig
/// calibration, ground-truth planes, pattern metadata) and is round-tripped
/// untouched.
struct CaptureManifest {
    std::vector<FrameRecord> frames;
    /// Sensor clipping level for exposure merging; infinite when absent.
    double saturation_level = std::numeric_limits<double>::infinity();
    nlohmann::json attributes = nlohmann::json::object();
};

/// Throws FormatError on schema violations, std::ios_base::failure on I/O.
CaptureManifest read_manifest(const std::filesystem::path& path);
CaptureManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const CaptureManifest& m);
void write_manifest(const CaptureManifest& m, const std::filesystem::path& path);

/// Frames sharing a pattern id, merged into one polarimetric stack.
struct PatternStack {
    std::string pattern_id;  ///< empty for regular frames
    FrameRole role = FrameRole::regular;
    ImageStack stack;
};

/// Reads every frame, merges exposure brackets taken at the same polarizer
/// pair and pattern, and groups the result by pattern id in manifest order.
std::vector<PatternStack> load_stacks(const CaptureManifest& m, const std::filesystem::path& base_dir);

}  // namespace polarsep::imaging
