#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polarsep/image.hpp"
#include "polarsep/plane_metric.hpp"
#include "polarsep/polar_model.hpp"
#include "polarsep/triangulation.hpp"

namespace polarsep::synthetic {

struct ProjectorPixel {
    int col = 0;
    int row = 0;

    bool operator==(const ProjectorPixel&) const = default;
};

using ProjectorMap = std::vector<std::optional<ProjectorPixel>>;

/// Per-pixel ground truth. The unpolarized light is split into a local part
/// (modulated by the directly illuminating projector pixel) and a global part
/// fed by a (2r x 2r) projector footprint around it, r = footprint_radius.
/// A third-bounce term, when present, rotates forward and has its own source.
struct GroundTruthScene {
    int width = 0;
    int height = 0;
    int projector_width = 0;
    int projector_height = 0;

    DoubleImage i_u, i_f, phi_f, i_r, phi_r;
    DoubleImage i_u_global;
    int footprint_radius = 0;
    DoubleImage i_t, phi_t;  ///< empty unless third-bounce light is enabled

    ProjectorMap direct_map;
    ProjectorMap source_map;  ///< defined wherever i_r > 0
    ProjectorMap third_map;   ///< defined wherever i_t > 0

    std::optional<structured_light::RigCalibration> rig;
    std::vector<structured_light::Plane3D> planes;
    Image<int> region;  ///< plane index per pixel, -1 if none

    bool has_third() const { return !i_t.empty(); }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x); }

    /// Combined per-pixel parameters under uniform white illumination: the
    /// two unpolarized parts add, and the forward phasors add.
    ComponentParams params_at(int x, int y) const;

    /// Throws DimensionMismatch / std::invalid_argument on inconsistent maps.
    void check_consistent() const;
};

/// Recipe document: {"recipe": name, "width": w, "height": h, "params": {...}}.
struct SceneRecipe {
    std::string name;
    int width = 64;
    int height = 64;
    nlohmann::json params = nlohmann::json::object();
};

SceneRecipe recipe_from_json(const nlohmann::json& j);
nlohmann::json recipe_to_json(const SceneRecipe& r);

/// "flat-diffuse", "v-groove", "v-groove-direct", "hexagon".
const std::vector<std::string>& recipe_names();

/// Deterministic for a given (recipe, seed). Throws std::invalid_argument on
/// an unknown recipe name or non-positive dimensions.
GroundTruthScene generate_scene(const SceneRecipe& recipe, std::uint64_t seed);

/// V-groove geometry shared by the generator and its tests: focal length in
/// pixels, plate depth and groove half-width in millimetres, face slope
/// dz/dx. Camera at the origin looking down +z.
struct GrooveGeometry {
    double focal_px = 1000.0;
    double cx = 0.0;
    double cy = 0.0;
    double plate_depth_mm = 500.0;
    double half_width_mm = 8.0;
    double slope = 1.0;

    enum class Surface { plate = 0, face_a = 1, face_b = 2 };

    struct Hit {
        Eigen::Vector3d point;
        Surface surface;
    };

    Hit intersect_camera_ray(double u, double v) const;
    structured_light::Plane3D plane(Surface s) const;
    /// True if p lies on the finite extent of face `s`.
    bool on_face(const Eigen::Vector3d& p, Surface s) const;
};

}  // namespace polarsep::synthetic
