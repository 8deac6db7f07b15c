#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "polarsep/image.hpp"
#include "polarsep/triangulation.hpp"

namespace polarsep::structured_light {

/// Points p with normal . p = offset. `normal` is unit length.
struct Plane3D {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double offset = 0.0;

    static Plane3D through(const Eigen::Vector3d& point, const Eigen::Vector3d& normal);
    double distance(const Eigen::Vector3d& p) const;
};

/// Reference surfaces of a scanned scene. `region` labels camera pixels with
/// the index of the plane they belong to (-1 for unlabeled); it is needed only
/// when planes are refitted from the cloud.
struct GrooveSpec {
    std::vector<Plane3D> planes;
    Image<int> region;
};

enum class PlaneSource { ground_truth, fitted };

struct PlaneFitResult {
    double proportion = 0.0;
    std::size_t points = 0;
    std::size_t within = 0;
    std::vector<Plane3D> planes;  ///< planes actually used
    std::optional<std::string> warning;
};

/// Least-squares plane through >= 3 points (smallest singular vector).
/// Throws std::invalid_argument with fewer points.
Plane3D fit_plane(const std::vector<Eigen::Vector3d>& points);

/// Fraction of cloud points within `tol_mm` of the nearest plane. An empty
/// cloud yields 0 with a warning. In fitted mode each labeled region gets its
/// own least-squares plane; regions with fewer than three points fall back to
/// the ground-truth plane of the same index.
PlaneFitResult plane_fit_metric(const PointCloud& cloud, const GrooveSpec& spec, double tol_mm = 1.0,
                                PlaneSource source = PlaneSource::ground_truth);

}  // namespace polarsep::structured_light
