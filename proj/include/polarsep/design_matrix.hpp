#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "polarsep/angle_set.hpp"

namespace polarsep {

/// Coefficients linking the linearized unknowns to one observation:
/// [1, cos2c cos2l, sin2c sin2l, cos2c sin2l, sin2c cos2l].
using DesignVector = std::array<double, 5>;

DesignVector design_vector(const PolarizerPair& pair);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, 5>;
using PinvMatrix = Eigen::Matrix<double, 5, Eigen::Dynamic>;

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

/// sigma_max / sigma_min of any matrix; +inf when numerically rank deficient.
double condition_number(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Row-stacked design matrix with its SVD pseudo-inverse.
///
/// Immutable once built, so one instance can be shared by every pixel solve.
class DesignMatrix {
public:
    const RowMatrix& rows() const noexcept { return rows_; }
    const PinvMatrix& pinv() const noexcept { return pinv_; }
    const Eigen::Matrix<double, 5, 1>& singular_values() const noexcept { return sigma_; }
    double cond() const noexcept { return cond_; }
    int rank() const noexcept { return rank_; }
    std::size_t measurements() const noexcept { return static_cast<std::size_t>(rows_.rows()); }

private:
    friend DesignMatrix build_design_matrix(const AngleSet& angles);

    RowMatrix rows_;
    PinvMatrix pinv_;
    Eigen::Matrix<double, 5, 1> sigma_ = Eigen::Matrix<double, 5, 1>::Zero();
    double cond_ = 0.0;
    int rank_ = 0;
};

/// Stacks design vectors in sequence order. Throws DegenerateAngleSet when the
/// rank is below five (including any set with fewer than five pairs).
DesignMatrix build_design_matrix(const AngleSet& angles);

double condition_number(const DesignMatrix& w);

struct AngleSetReport {
    std::size_t measurements = 0;
    int rank = 0;
    double cond = 0.0;
    /// The set meets the minimum measurement requirement (full rank).
    bool minimal = false;
    bool polarization_camera_layout = false;
    std::size_t light_angle_count = 0;
    std::string summary;
};

/// Never throws; degenerate sets are reported, not rejected.
AngleSetReport validate_angle_set(const AngleSet& angles);

}  // namespace polarsep
