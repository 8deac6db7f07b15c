#pragma once

// Closed-form observation model for light seen through a light-side and a
// camera-side linear polarizer. All angles are radians.

#include <numbers>

namespace polarsep {

inline constexpr double kPi = std::numbers::pi;

/// Maps any finite angle onto the canonical polarizer range [0, pi).
double canonical_angle(double radians);

double degrees_to_radians(double degrees);
double radians_to_degrees(double radians);

/// Camera-side and light-side polarizer orientations, stored canonically.
class PolarizerPair {
public:
    PolarizerPair() = default;
    PolarizerPair(double theta_c, double theta_l);

    static PolarizerPair from_degrees(double theta_c_deg, double theta_l_deg);

    double theta_c() const noexcept { return theta_c_; }
    double theta_l() const noexcept { return theta_l_; }

    friend bool operator==(const PolarizerPair&, const PolarizerPair&) = default;

private:
    double theta_c_ = 0.0;
    double theta_l_ = 0.0;
};

/// The five per-pixel unknowns of the three-component mixture.
struct ComponentParams {
    double i_u = 0.0;    ///< unpolarized intensity
    double i_f = 0.0;    ///< forward-rotation intensity
    double phi_f = 0.0;  ///< forward phase in [0, pi)
    double i_r = 0.0;    ///< reverse-rotation intensity
    double phi_r = 0.0;  ///< reverse phase in [0, pi)
};

/// Partially linearly polarized light seen through a single analyzer.
struct PolarizedRay {
    double i_amp = 0.0;
    double rho = 0.0;  ///< degree of linear polarization
    double phi = 0.0;  ///< angle of linear polarization
};

/// Throws std::invalid_argument for non-finite fields, negative intensities
/// or phases outside [0, pi).
void validate(const ComponentParams& params);

/// (i_amp/2)(rho cos 2(theta_c - phi) + 1)
double intensity_single_polarizer(const PolarizedRay& ray, double theta_c);

double unpolarized_intensity(double i_u);
double forward_intensity(double i_f, double phi_f, const PolarizerPair& pair);
double reverse_intensity(double i_r, double phi_r, const PolarizerPair& pair);

/// Sum of the unpolarized, forward and reverse terms.
double mixture_intensity(const ComponentParams& params, const PolarizerPair& pair);

}  // namespace polarsep
