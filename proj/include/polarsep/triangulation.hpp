#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "polarsep/gray_code.hpp"

namespace polarsep::structured_light {

/// Rectified camera/projector pair. Both share focal length and the row
/// principal point; the projector sits `baseline_mm` along +x.
struct RigCalibration {
    double focal_px = 1000.0;
    double cx = 0.0;
    double cy = 0.0;
    double projector_cx = 0.0;
    double baseline_mm = 400.0;

    /// Throws std::invalid_argument unless focal and baseline are positive and finite.
    void validate() const;
};

struct CloudPoint {
    Eigen::Vector3d position;  ///< millimetres, camera frame
    int u = 0;                 ///< source camera pixel
    int v = 0;
};

using PointCloud = std::vector<CloudPoint>;

/// Disparity d = (u - cx) - (column - projector_cx); depth z = f b / d.
/// Invalid pixels and non-positive disparities are skipped.
PointCloud triangulate(const CorrespondenceMap& map, const RigCalibration& calib);

/// Projector column (continuous) that sees camera-frame point `p`.
double project_to_projector_column(const Eigen::Vector3d& p, const RigCalibration& calib);

/// One "x y z" line per point.
void write_xyz(const PointCloud& cloud, std::ostream& out);
void write_xyz(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace polarsep::structured_light
