#include "polarsep/polar_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace polarsep {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

void require_intensity(double v, const char* what) {
    require_finite(v, what);
    if (v < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be non-negative");
    }
}

}  // namespace

double canonical_angle(double radians) {
    require_finite(radians, "angle");
    double a = std::fmod(radians, kPi);
    if (a < 0.0) a += kPi;
    // fmod of a value just below a multiple of pi can round up to pi itself
    if (a >= kPi) a = 0.0;
    return a;
}

double degrees_to_radians(double degrees) { return degrees * (kPi / 180.0); }
double radians_to_degrees(double radians) { return radians * (180.0 / kPi); }

PolarizerPair::PolarizerPair(double theta_c, double theta_l)
    : theta_c_(canonical_angle(theta_c)), theta_l_(canonical_angle(theta_l)) {}

PolarizerPair PolarizerPair::from_degrees(double theta_c_deg, double theta_l_deg) {
    return PolarizerPair(degrees_to_radians(theta_c_deg), degrees_to_radians(theta_l_deg));
}

void validate(const ComponentParams& p) {
    require_intensity(p.i_u, "i_u");
    require_intensity(p.i_f, "i_f");
    require_intensity(p.i_r, "i_r");
    require_finite(p.phi_f, "phi_f");
    require_finite(p.phi_r, "phi_r");
    if (p.phi_f < 0.0 || p.phi_f >= kPi || p.phi_r < 0.0 || p.phi_r >= kPi) {
        throw std::invalid_argument("phases must lie in [0, pi)");
    }
}

double intensity_single_polarizer(const PolarizedRay& ray, double theta_c) {
    require_intensity(ray.i_amp, "i_amp");
    require_finite(ray.rho, "rho");
    require_finite(ray.phi, "phi");
    require_finite(theta_c, "theta_c");
    if (ray.rho < 0.0 || ray.rho > 1.0) {
        throw std::invalid_argument("rho must lie in [0, 1]");
    }
    return 0.5 * ray.i_amp * (ray.rho * std::cos(2.0 * (theta_c - ray.phi)) + 1.0);
}

double unpolarized_intensity(double i_u) {
    require_intensity(i_u, "i_u");
    return 0.5 * i_u;
}

double forward_intensity(double i_f, double phi_f, const PolarizerPair& pair) {
    require_intensity(i_f, "i_f");
    require_finite(phi_f, "phi_f");
    return 0.5 * i_f * (std::cos(2.0 * (pair.theta_c() - pair.theta_l() - phi_f)) + 1.0);
}

double reverse_intensity(double i_r, double phi_r, const PolarizerPair& pair) {
    require_intensity(i_r, "i_r");
    require_finite(phi_r, "phi_r");
    return 0.5 * i_r * (std::cos(2.0 * (pair.theta_c() + pair.theta_l() - phi_r)) + 1.0);
}

double mixture_intensity(const ComponentParams& params, const PolarizerPair& pair) {
    return unpolarized_intensity(params.i_u) +
           forward_intensity(params.i_f, params.phi_f, pair) +
           reverse_intensity(params.i_r, params.phi_r, pair);
}

}  // namespace polarsep
