#include "polarsep/plane_metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace polarsep::structured_light {

Plane3D Plane3D::through(const Eigen::Vector3d& point, const Eigen::Vector3d& normal) {
    const double n = normal.norm();
    if (!(n > 0.0)) throw std::invalid_argument("plane normal must be non-zero");
    Plane3D p;
    p.normal = normal / n;
    p.offset = p.normal.dot(point);
    return p;
}

double Plane3D::distance(const Eigen::Vector3d& p) const { return std::abs(normal.dot(p) - offset); }

Plane3D fit_plane(const std::vector<Eigen::Vector3d>& points) {
    if (points.size() < 3) throw std::invalid_argument("plane fit needs at least three points");
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : points) centroid += p;
    centroid /= static_cast<double>(points.size());
    Eigen::MatrixXd centered(static_cast<Eigen::Index>(points.size()), 3);
    for (std::size_t i = 0; i < points.size(); ++i) centered.row(static_cast<Eigen::Index>(i)) = (points[i] - centroid).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    return Plane3D::through(centroid, svd.matrixV().col(2));
}

PlaneFitResult plane_fit_metric(const PointCloud& cloud, const GrooveSpec& spec, double tol_mm, PlaneSource source) {
    if (!(tol_mm >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
    PlaneFitResult out;
    out.planes = spec.planes;

    if (source == PlaneSource::fitted) {
        if (spec.region.empty()) throw std::invalid_argument("fitted planes need a region label image");
        std::vector<std::vector<Eigen::Vector3d>> groups(spec.planes.size());
        for (const auto& pt : cloud) {
            if (pt.u < 0 || pt.v < 0 || pt.u >= spec.region.width || pt.v >= spec.region.height) continue;
            const int label = spec.region.at(pt.u, pt.v);
            if (label >= 0 && static_cast<std::size_t>(label) < groups.size()) {
                groups[static_cast<std::size_t>(label)].push_back(pt.position);
            }
        }
        for (std::size_t k = 0; k < groups.size(); ++k) {
            if (groups[k].size() >= 3) out.planes[k] = fit_plane(groups[k]);
        }
    }

    if (cloud.empty()) {
        out.warning = "empty point cloud; proportion defined as 0";
        return out;
    }
    if (out.planes.empty()) throw std::invalid_argument("no reference planes given");

    for (const auto& pt : cloud) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& plane : out.planes) best = std::min(best, plane.distance(pt.position));
        if (best <= tol_mm) ++out.within;
    }
    out.points = cloud.size();
    out.proportion = static_cast<double>(out.within) / static_cast<double>(out.points);
    return out;
}

}  // namespace polarsep::structured_light
