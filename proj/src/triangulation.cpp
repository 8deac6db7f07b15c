#include "polarsep/triangulation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace polarsep::structured_light {

void RigCalibration::validate() const {
    if (!(focal_px > 0.0) || !std::isfinite(focal_px)) throw std::invalid_argument("focal length must be positive");
    if (!(baseline_mm > 0.0) || !std::isfinite(baseline_mm)) throw std::invalid_argument("baseline must be positive");
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(projector_cx)) {
        throw std::invalid_argument("principal point must be finite");
    }
}

PointCloud triangulate(const CorrespondenceMap& map, const RigCalibration& calib) {
    calib.validate();
    PointCloud cloud;
    for (int v = 0; v < map.height; ++v) {
        for (int u = 0; u < map.width; ++u) {
            const int col = map.at(u, v);
            if (col < 0) continue;
            const double disparity = (u - calib.cx) - (col - calib.projector_cx);
            if (!(disparity > 0.0)) continue;
            const double z = calib.focal_px * calib.baseline_mm / disparity;
            const double x = (u - calib.cx) * z / calib.focal_px;
            const double y = (v - calib.cy) * z / calib.focal_px;
            cloud.push_back({Eigen::Vector3d(x, y, z), u, v});
        }
    }
    return cloud;
}

double project_to_projector_column(const Eigen::Vector3d& p, const RigCalibration& calib) {
    return calib.projector_cx + calib.focal_px * (p.x() - calib.baseline_mm) / p.z();
}

void write_xyz(const PointCloud& cloud, std::ostream& out) {
    char line[96];
    for (const auto& pt : cloud) {
        std::snprintf(line, sizeof line, "%.6f %.6f %.6f\n", pt.position.x(), pt.position.y(), pt.position.z());
        out << line;
    }
}

void write_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_xyz(cloud, out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace polarsep::structured_light
