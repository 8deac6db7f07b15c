#include "polarsep/design_matrix.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "polarsep/errors.hpp"

namespace polarsep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RowMatrix stack_rows(const AngleSet& angles) {
    RowMatrix w(static_cast<Eigen::Index>(angles.size()), 5);
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const auto v = design_vector(angles[k]);
        for (int j = 0; j < 5; ++j) w(static_cast<Eigen::Index>(k), j) = v[static_cast<std::size_t>(j)];
    }
    return w;
}

// Singular values padded with zeros up to five (fewer rows than unknowns).
Eigen::Matrix<double, 5, 1> padded_singular_values(const RowMatrix& w) {
    Eigen::Matrix<double, 5, 1> sigma = Eigen::Matrix<double, 5, 1>::Zero();
    if (w.rows() == 0) return sigma;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) sigma(i) = s(i);
    return sigma;
}

int count_rank(const Eigen::Matrix<double, 5, 1>& sigma) {
    int rank = 0;
    for (int i = 0; i < 5; ++i) {
        if (sigma(i) > kRankTolerance * sigma(0)) ++rank;
    }
    return rank;
}

}  // namespace

DesignVector design_vector(const PolarizerPair& pair) {
    const double c2c = std::cos(2.0 * pair.theta_c());
    const double s2c = std::sin(2.0 * pair.theta_c());
    const double c2l = std::cos(2.0 * pair.theta_l());
    const double s2l = std::sin(2.0 * pair.theta_l());
    return {1.0, c2c * c2l, s2c * s2l, c2c * s2l, s2c * c2l};
}

double condition_number(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.size() == 0) return kInf;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    const Eigen::Index full = std::min(m.rows(), m.cols());
    const double smax = s(0);
    const double smin = s(full - 1);
    if (!(smax > 0.0) || smin <= kRankTolerance * smax) return kInf;
    return smax / smin;
}

DesignMatrix build_design_matrix(const AngleSet& angles) {
    DesignMatrix out;
    out.rows_ = stack_rows(angles);
    out.sigma_ = padded_singular_values(out.rows_);
    out.rank_ = count_rank(out.sigma_);
    if (out.rank_ < 5) {
        std::ostringstream msg;
        msg << "angle set is degenerate: rank " << out.rank_ << " < 5 (" << angles.size() << " measurements)";
        throw DegenerateAngleSet(out.rank_, kInf, msg.str());
    }
    out.cond_ = out.sigma_(0) / out.sigma_(4);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.rows_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Matrix<double, 5, 1> inv_sigma = svd.singularValues().cwiseInverse();
    out.pinv_ = svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
    return out;
}

double condition_number(const DesignMatrix& w) { return w.cond(); }

AngleSetReport validate_angle_set(const AngleSet& angles) {
    AngleSetReport r;
    r.measurements = angles.size();
    r.light_angle_count = angles.light_angles().size();
    r.polarization_camera_layout = angles.is_polarization_camera_layout();

    const auto sigma = padded_singular_values(stack_rows(angles));
    r.rank = angles.empty() ? 0 : count_rank(sigma);
    r.cond = r.rank == 5 ? sigma(0) / sigma(4) : kInf;
    r.minimal = r.rank == 5;

    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    if (r.minimal) {
        s << "sufficient (rank 5, cond " << r.cond << ")";
    } else {
        s << "insufficient (rank " << r.rank << " < 5)";
    }
    r.summary = s.str();
    return r;
}

}  // namespace polarsep
