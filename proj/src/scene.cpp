#include "polarsep/scene.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "polarsep/errors.hpp"

namespace polarsep::synthetic {

namespace {

using structured_light::Plane3D;
using Surface = GrooveGeometry::Surface;

double param(const SceneRecipe& r, const char* key, double fallback) {
    if (!r.params.contains(key)) return fallback;
    const auto& v = r.params.at(key);
    if (!v.is_number()) throw std::invalid_argument(std::string("recipe parameter '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw std::invalid_argument(std::string("recipe parameter '") + key + "' must be finite");
    return d;
}

GroundTruthScene blank_scene(int width, int height) {
    GroundTruthScene s;
    s.width = width;
    s.height = height;
    s.projector_width = width;
    s.projector_height = height;
    s.i_u = DoubleImage(width, height);
    s.i_f = DoubleImage(width, height);
    s.phi_f = DoubleImage(width, height);
    s.i_r = DoubleImage(width, height);
    s.phi_r = DoubleImage(width, height);
    s.i_u_global = DoubleImage(width, height);
    s.region = Image<int>(width, height, 1, -1);
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    s.direct_map.resize(n);
    s.source_map.resize(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) s.direct_map[s.index(x, y)] = ProjectorPixel{x, y};
    }
    return s;
}

class Texture {
public:
    Texture(std::mt19937_64& rng, double amplitude) : rng_(rng), dist_(-amplitude, amplitude) {}
    double operator()() { return 1.0 + dist_(rng_); }

private:
    std::mt19937_64& rng_;
    std::uniform_real_distribution<double> dist_;
};

GroundTruthScene make_flat_diffuse(const SceneRecipe& r, std::uint64_t seed) {
    auto s = blank_scene(r.width, r.height);
    const double level = param(r, "i_u", 1.0);
    const double texture = param(r, "texture", 0.0);
    if (level < 0.0 || texture < 0.0 || texture >= 1.0) throw std::invalid_argument("flat-diffuse: bad parameters");
    std::mt19937_64 rng(seed);
    Texture tex(rng, texture);
    for (auto& v : s.i_u.data) v = texture > 0.0 ? level * tex() : level;
    return s;
}

std::optional<Eigen::Vector3d> trace(const Eigen::Vector3d& from, const Eigen::Vector3d& dir, const GrooveGeometry& g,
                                     Surface target) {
    const Plane3D p = g.plane(target);
    const double denom = p.normal.dot(dir);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    const double s = (p.offset - p.normal.dot(from)) / denom;
    if (!(s > 1e-9)) return std::nullopt;
    const Eigen::Vector3d hit = from + s * dir;
    if (!g.on_face(hit, target)) return std::nullopt;
    return hit;
}

Eigen::Vector3d reflect(const Eigen::Vector3d& d, const Eigen::Vector3d& n) { return d - 2.0 * d.dot(n) * n; }

GroundTruthScene make_v_groove(const SceneRecipe& r, std::uint64_t seed, bool with_reverse) {
    const double focal = param(r, "focal_px", 1000.0);
    const double baseline = param(r, "baseline_mm", 400.0);
    const double plate = param(r, "plate_depth_mm", 500.0);
    const double slope = param(r, "slope", 1.0);
    const double diffuse = param(r, "diffuse", 0.1);
    const double specular = param(r, "specular", 0.5);
    const double texture = param(r, "texture", 0.1);
    const double ratio_lo = param(r, "reverse_ratio_min", 1.5);
    const double ratio_hi = param(r, "reverse_ratio_max", 2.5);
    const double third_ratio = param(r, "third_ratio", 0.0);
    if (!(focal > 0) || !(baseline > 0) || !(plate > 0) || !(slope > 0) || diffuse < 0 || specular < 0 ||
        texture < 0 || texture >= 1 || ratio_lo < 0 || ratio_hi < ratio_lo || third_ratio < 0) {
        throw std::invalid_argument("v-groove: bad parameters");
    }

    auto s = blank_scene(r.width, r.height);
    GrooveGeometry g;
    g.focal_px = focal;
    g.cx = (r.width - 1) / 2.0;
    g.cy = (r.height - 1) / 2.0;
    g.plate_depth_mm = plate;
    g.half_width_mm = plate * (r.width / 4.0) / focal;
    g.slope = slope;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double phase_f[3], phase_r[3], ratio[3];
    for (int k = 0; k < 3; ++k) {
        phase_f[k] = canonical_angle(kPi * unit(rng));
        phase_r[k] = canonical_angle(kPi * unit(rng));
        ratio[k] = ratio_lo + (ratio_hi - ratio_lo) * unit(rng);
    }
    Texture tex(rng, texture);

    // Continuous projector columns before the principal point is fixed.
    const auto raw_col = [&](const Eigen::Vector3d& p) { return focal * (p.x() - baseline) / p.z(); };
    const auto proj_row = [&](const Eigen::Vector3d& p) { return g.cy + focal * p.y() / p.z(); };

    const std::size_t n = s.i_u.pixel_count();
    std::vector<Eigen::Vector3d> direct(n);
    std::vector<std::optional<Eigen::Vector3d>> first(n), third(n);
    double min_col = std::numeric_limits<double>::infinity();
    for (int v = 0; v < r.height; ++v) {
        for (int u = 0; u < r.width; ++u) {
            const auto i = s.index(u, v);
            const auto hit = g.intersect_camera_ray(u, v);
            direct[i] = hit.point;
            s.region.at(u, v) = static_cast<int>(hit.surface);
            min_col = std::min(min_col, raw_col(hit.point));
            if (hit.surface == Surface::plate) continue;
            const Surface other = hit.surface == Surface::face_a ? Surface::face_b : Surface::face_a;
            const Eigen::Vector3d r1 = reflect(hit.point, g.plane(hit.surface).normal);
            first[i] = trace(hit.point, r1, g, other);
            if (!first[i]) continue;
            min_col = std::min(min_col, raw_col(*first[i]));
            if (third_ratio > 0.0) {
                third[i] = trace(*first[i], reflect(r1, g.plane(other).normal), g, hit.surface);
                if (third[i]) min_col = std::min(min_col, raw_col(*third[i]));
            }
        }
    }

    structured_light::RigCalibration rig;
    rig.focal_px = focal;
    rig.cx = g.cx;
    rig.cy = g.cy;
    rig.baseline_mm = baseline;
    rig.projector_cx = std::ceil(2.0 - min_col);

    const auto to_pixel = [&](const Eigen::Vector3d& p) -> std::optional<ProjectorPixel> {
        const long row = std::lround(proj_row(p));
        if (row < 0 || row >= r.height) return std::nullopt;
        return ProjectorPixel{static_cast<int>(std::lround(rig.projector_cx + raw_col(p))), static_cast<int>(row)};
    };

    if (third_ratio > 0.0) {
        s.i_t = DoubleImage(r.width, r.height);
        s.phi_t = DoubleImage(r.width, r.height);
        s.third_map.resize(n);
    }

    int max_col = 0;
    for (int v = 0; v < r.height; ++v) {
        for (int u = 0; u < r.width; ++u) {
            const auto i = s.index(u, v);
            const int face = s.region.at(u, v);
            s.direct_map[i] = ProjectorPixel{static_cast<int>(std::lround(rig.projector_cx + raw_col(direct[i]))), v};
            max_col = std::max(max_col, s.direct_map[i]->col);
            s.i_u.data[i] = diffuse * tex();
            s.i_f.data[i] = specular * tex();
            s.phi_f.data[i] = phase_f[face];
            s.i_u_global.data[i] = 0.0;
            if (with_reverse && first[i]) {
                if (auto src = to_pixel(*first[i])) {
                    s.source_map[i] = src;
                    s.i_r.data[i] = ratio[face] * s.i_f.data[i];
                    s.phi_r.data[i] = phase_r[face];
                    max_col = std::max(max_col, src->col);
                }
            }
            if (with_reverse && third[i]) {
                if (auto src = to_pixel(*third[i])) {
                    s.third_map[i] = src;
                    s.i_t.data[i] = third_ratio * s.i_f.data[i];
                    s.phi_t.data[i] = phase_r[face];
                    max_col = std::max(max_col, src->col);
                }
            }
        }
    }

    s.projector_width = static_cast<int>(std::bit_ceil(static_cast<unsigned>(max_col + 3)));
    s.projector_height = r.height;
    s.rig = rig;
    s.planes = {g.plane(Surface::plate), g.plane(Surface::face_a), g.plane(Surface::face_b)};
    return s;
}

bool inside_hexagon(double dx, double dy, double radius) {
    const double ax = std::abs(dx), ay = std::abs(dy);
    const double s3 = std::sqrt(3.0);
    return ay <= 0.5 * s3 * radius && s3 * ax + ay <= s3 * radius;
}

GroundTruthScene make_hexagon(const SceneRecipe& r, std::uint64_t seed) {
    const double period = param(r, "period", 8.0);
    const double diffuse = param(r, "diffuse", 0.2);
    const double global = param(r, "global", 0.3);
    const double mirror_f = param(r, "mirror_forward", 0.3);
    const double mirror_r = param(r, "mirror_reverse", 0.4);
    const double specular = param(r, "specular", 0.5);
    const double texture = param(r, "texture", 0.05);
    const double radius = param(r, "footprint_radius", period);
    if (!(period >= 1) || period != std::floor(period) || diffuse < 0 || global < 0 || mirror_f < 0 ||
        mirror_r < 0 || specular < 0 || texture < 0 || texture >= 1 || radius < 0 || radius != std::floor(radius)) {
        throw std::invalid_argument("hexagon: bad parameters");
    }
    const int shift = 2 * static_cast<int>(period);
    if (r.width <= shift) throw std::invalid_argument("hexagon: image narrower than twice the checker period");

    auto s = blank_scene(r.width, r.height);
    s.footprint_radius = static_cast<int>(radius);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double phase_mirror_f = canonical_angle(kPi * unit(rng));
    const double phase_mirror_r = canonical_angle(kPi * unit(rng));
    const double phase_spec = canonical_angle(kPi * unit(rng));
    Texture tex(rng, texture);

    const double cx = r.width / 2.0, cy = r.height / 2.0;
    const double hex_r = std::min(r.width, r.height) / 4.0;
    const int spec_x0 = r.width / 16, spec_x1 = r.width / 4;
    const int spec_y0 = r.height / 16, spec_y1 = r.height / 4;

    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            const auto i = s.index(x, y);
            const double gx = 2.0 * kPi * x / r.width, gy = 2.0 * kPi * y / r.height;
            s.i_u_global.data[i] = global * (0.75 + 0.125 * std::cos(gx) + 0.125 * std::sin(gy));
            if (inside_hexagon(x + 0.5 - cx, y + 0.5 - cy, hex_r)) {
                s.region.at(x, y) = 1;
                s.i_u.data[i] = 0.25 * diffuse * tex();
                s.i_f.data[i] = mirror_f * tex();
                s.phi_f.data[i] = phase_mirror_f;
                s.i_r.data[i] = mirror_r * tex();
                s.phi_r.data[i] = phase_mirror_r;
                const int src = x + shift < r.width ? x + shift : x - shift;
                s.source_map[i] = ProjectorPixel{src, y};
            } else if (x >= spec_x0 && x < spec_x1 && y >= spec_y0 && y < spec_y1) {
                s.region.at(x, y) = 2;
                s.i_u.data[i] = 0.25 * diffuse * tex();
                s.i_f.data[i] = specular * tex();
                s.phi_f.data[i] = phase_spec;
            } else {
                s.region.at(x, y) = 0;
                s.i_u.data[i] = diffuse * tex();
            }
        }
    }
    return s;
}

void check_map(const ProjectorMap& map, std::size_t n, int pw, int ph, const char* name) {
    if (map.size() != n) throw DimensionMismatch(std::string(name) + " has wrong size");
    for (const auto& p : map) {
        if (p && (p->col < 0 || p->row < 0 || p->col >= pw || p->row >= ph)) {
            throw std::invalid_argument(std::string(name) + " points outside the projector");
        }
    }
}

}  // namespace

ComponentParams GroundTruthScene::params_at(int x, int y) const {
    const auto i = index(x, y);
    ComponentParams p;
    p.i_u = i_u.data[i] + i_u_global.data[i];
    p.i_r = i_r.data[i];
    p.phi_r = p.i_r == 0.0 ? 0.0 : phi_r.data[i];
    if (has_third() && i_t.data[i] > 0.0) {
        const double c = i_f.data[i] * std::cos(2 * phi_f.data[i]) + i_t.data[i] * std::cos(2 * phi_t.data[i]);
        const double s = i_f.data[i] * std::sin(2 * phi_f.data[i]) + i_t.data[i] * std::sin(2 * phi_t.data[i]);
        p.i_f = std::hypot(c, s);
        p.phi_f = p.i_f == 0.0 ? 0.0 : canonical_angle(0.5 * std::atan2(s, c));
    } else {
        p.i_f = i_f.data[i];
        p.phi_f = p.i_f == 0.0 ? 0.0 : phi_f.data[i];
    }
    return p;
}

void GroundTruthScene::check_consistent() const {
    if (width <= 0 || height <= 0 || projector_width <= 0 || projector_height <= 0) {
        throw std::invalid_argument("scene dimensions must be positive");
    }
    for (const DoubleImage* im : {&i_u, &i_f, &phi_f, &i_r, &phi_r, &i_u_global}) {
        if (im->width != width || im->height != height || im->channels != 1) {
            throw DimensionMismatch("scene component map has wrong dimensions");
        }
    }
    const std::size_t n = i_u.pixel_count();
    check_map(direct_map, n, projector_width, projector_height, "direct_map");
    check_map(source_map, n, projector_width, projector_height, "source_map");
    for (std::size_t i = 0; i < n; ++i) {
        if (!direct_map[i]) throw std::invalid_argument("direct_map must cover every pixel");
        if (i_r.data[i] > 0.0 && !source_map[i]) throw std::invalid_argument("reverse light without a source pixel");
    }
    if (has_third()) {
        if (!i_t.same_shape(i_u) || !phi_t.same_shape(i_u)) throw DimensionMismatch("third-bounce map has wrong dimensions");
        check_map(third_map, n, projector_width, projector_height, "third_map");
        for (std::size_t i = 0; i < n; ++i) {
            if (i_t.data[i] > 0.0 && !third_map[i]) throw std::invalid_argument("third-bounce light without a source pixel");
        }
    }
    if (!region.empty() && (region.width != width || region.height != height)) {
        throw DimensionMismatch("region label image has wrong dimensions");
    }
}

SceneRecipe recipe_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("recipe") || !j.at("recipe").is_string()) {
        throw std::invalid_argument("scene recipe needs a string 'recipe' field");
    }
    SceneRecipe r;
    r.name = j.at("recipe").get<std::string>();
    r.width = j.value("width", 64);
    r.height = j.value("height", r.width);
    if (j.contains("params")) {
        if (!j.at("params").is_object()) throw std::invalid_argument("recipe 'params' must be an object");
        r.params = j.at("params");
    }
    return r;
}

nlohmann::json recipe_to_json(const SceneRecipe& r) {
    return {{"recipe", r.name}, {"width", r.width}, {"height", r.height}, {"params", r.params}};
}

const std::vector<std::string>& recipe_names() {
    static const std::vector<std::string> names{"flat-diffuse", "v-groove", "v-groove-direct", "hexagon"};
    return names;
}

GroundTruthScene generate_scene(const SceneRecipe& recipe, std::uint64_t seed) {
    if (recipe.width <= 0 || recipe.height <= 0) throw std::invalid_argument("recipe dimensions must be positive");
    GroundTruthScene s;
    if (recipe.name == "flat-diffuse") {
        s = make_flat_diffuse(recipe, seed);
    } else if (recipe.name == "v-groove") {
        s = make_v_groove(recipe, seed, true);
    } else if (recipe.name == "v-groove-direct") {
        s = make_v_groove(recipe, seed, false);
    } else if (recipe.name == "hexagon") {
        s = make_hexagon(recipe, seed);
    } else {
        throw std::invalid_argument("unknown recipe '" + recipe.name + "'");
    }
    s.check_consistent();
    return s;
}

GrooveGeometry::Hit GrooveGeometry::intersect_camera_ray(double u, double v) const {
    const double a = (u - cx) / focal_px;
    const double b = (v - cy) / focal_px;
    const double t = (plate_depth_mm + slope * half_width_mm) / (1.0 + slope * std::abs(a));
    if (std::abs(t * a) <= half_width_mm) {
        return {Eigen::Vector3d(t * a, t * b, t), a < 0.0 ? Surface::face_a : Surface::face_b};
    }
    const double z = plate_depth_mm;
    return {Eigen::Vector3d(z * a, z * b, z), Surface::plate};
}

structured_light::Plane3D GrooveGeometry::plane(Surface s) const {
    switch (s) {
        case Surface::face_a:
            return Plane3D::through({-half_width_mm, 0.0, plate_depth_mm}, {-slope, 0.0, 1.0});
        case Surface::face_b:
            return Plane3D::through({half_width_mm, 0.0, plate_depth_mm}, {slope, 0.0, 1.0});
        case Surface::plate:
            break;
    }
    return Plane3D::through({0.0, 0.0, plate_depth_mm}, {0.0, 0.0, 1.0});
}

bool GrooveGeometry::on_face(const Eigen::Vector3d& p, Surface s) const {
    constexpr double eps = 1e-9;
    if (plane(s).distance(p) > 1e-6) return false;
    switch (s) {
        case Surface::face_a:
            return p.x() >= -half_width_mm - eps && p.x() <= eps;
        case Surface::face_b:
            return p.x() >= -eps && p.x() <= half_width_mm + eps;
        case Surface::plate:
            return std::abs(p.x()) >= half_width_mm - eps;
    }
    return false;
}

}  // namespace polarsep::synthetic
