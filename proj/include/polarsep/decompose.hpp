#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "polarsep/design_matrix.hpp"
#include "polarsep/image.hpp"

namespace polarsep {

/// Linearized unknowns X with I = W X. With the design vector ordering used
/// here, expanding the forward model gives
///   x1 = (I_U + I_F + I_R) / 2
///   x2 = ( I_F cos2phi_F + I_R cos2phi_R) / 2
///   x3 = ( I_F cos2phi_F - I_R cos2phi_R) / 2
///   x4 = (-I_F sin2phi_F + I_R sin2phi_R) / 2
///   x5 = ( I_F sin2phi_F + I_R sin2phi_R) / 2
struct SolutionVector {
    std::array<double, 5> x{};

    double operator[](std::size_t i) const { return x[i]; }
};

/// Maps component parameters to X (no validation; i_u may be negative).
SolutionVector linearize(const ComponentParams& params);

/// X = W+ I. Returns nullopt (pixel masked out) when any intensity is
/// non-finite. Throws std::invalid_argument on a length mismatch.
std::optional<SolutionVector> solve_linear(const DesignMatrix& w, std::span<const double> intensities);

/// Component parameters recovered from X.
struct ExtractedComponents {
    ComponentParams params;  ///< i_u clamped at zero
    double i_u_raw = 0.0;    ///< 2 x1 - I_F - I_R, may be negative under noise
    bool physical = true;    ///< i_u_raw >= 0
};

ExtractedComponents extract_components(const SolutionVector& x);

/// Sum of squared residuals of X against the observations.
double residual_sum_squares(const DesignMatrix& w, const SolutionVector& x, std::span<const double> intensities);

/// Per-pixel decomposition outputs. Invalid pixels hold zeros.
struct DecompositionResult {
    DoubleImage i_u;
    DoubleImage i_u_raw;
    DoubleImage i_f;
    DoubleImage i_r;
    DoubleImage phi_f;
    DoubleImage phi_r;
    DoubleImage residual_rms;
    Image<std::uint8_t> valid;
    AngleSetReport report;
    std::size_t invalid_count = 0;
    std::size_t unphysical_count = 0;
};

/// Independent per-pixel solve over every sample of the stack. Throws
/// DegenerateAngleSet or DimensionMismatch.
DecompositionResult decompose_stack(const ImageStack& stack);

/// Same as above with a prebuilt design matrix for the stack's pairs.
DecompositionResult decompose_stack(const ImageStack& stack, const DesignMatrix& w);

}  // namespace polarsep
