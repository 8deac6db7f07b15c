#pragma once

#include <span>

#include "polarsep/angle_set.hpp"
#include "polarsep/polar_model.hpp"

namespace polarsep {

/// Search settings for the brute-force fit.
struct OracleOptions {
    int intensity_levels = 64;   ///< log-spaced levels (plus zero) up to twice the peak sample
    double dynamic_range = 1e6;  ///< ratio between the highest and lowest nonzero level
    int phase_levels = 180;      ///< uniform levels over [0, pi)
    int grid_passes = 2;         ///< rounds of block grid search before refinement
    int sweeps = 30;             ///< maximum coordinate-descent sweeps
    double tolerance = 1e-14;    ///< stop when no coordinate moves more than this
};

struct OracleFit {
    ComponentParams params;  ///< i_u clamped at zero
    double i_u_raw = 0.0;
    double residual = 0.0;   ///< sum of squared residuals
    int sweeps_used = 0;
};

/// Minimizes the squared observation residual over the five component
/// parameters directly: block grid search over (i_u), (i_f, phi_f) and
/// (i_r, phi_r), then coordinate descent with exact one-dimensional moves.
/// Deterministic for fixed options. Shares no code with the linear solver.
OracleFit brute_force_fit(std::span<const double> intensities, const AngleSet& angles,
                          const OracleOptions& options = {});

/// Squared residual of a parameter set against observations, evaluated with
/// the cosine model.
double model_residual(std::span<const double> intensities, const AngleSet& angles, double i_u, double i_f,
                      double phi_f, double i_r, double phi_r);

}  // namespace polarsep
