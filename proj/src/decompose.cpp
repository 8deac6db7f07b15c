#include "polarsep/decompose.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polarsep/errors.hpp"

namespace polarsep {

namespace {

// Half of the two-argument arctangent, folded into [0, pi). A zero-length
// phasor has no defined phase; report 0.
double phase_of(double cos_part, double sin_part, double magnitude) {
    if (magnitude == 0.0) return 0.0;
    return canonical_angle(0.5 * std::atan2(sin_part, cos_part));
}

}  // namespace

SolutionVector linearize(const ComponentParams& p) {
    const double fc = p.i_f * std::cos(2.0 * p.phi_f);
    const double fs = p.i_f * std::sin(2.0 * p.phi_f);
    const double rc = p.i_r * std::cos(2.0 * p.phi_r);
    const double rs = p.i_r * std::sin(2.0 * p.phi_r);
    return {{0.5 * (p.i_u + p.i_f + p.i_r), 0.5 * (fc + rc), 0.5 * (fc - rc), 0.5 * (-fs + rs), 0.5 * (fs + rs)}};
}

std::optional<SolutionVector> solve_linear(const DesignMatrix& w, std::span<const double> intensities) {
    if (intensities.size() != w.measurements()) {
        throw std::invalid_argument("expected " + std::to_string(w.measurements()) + " intensities, got " +
                                    std::to_string(intensities.size()));
    }
    for (double v : intensities) {
        if (!std::isfinite(v)) return std::nullopt;
    }
    const auto& pinv = w.pinv();
    SolutionVector out;
    for (int j = 0; j < 5; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < intensities.size(); ++k) acc += pinv(j, static_cast<Eigen::Index>(k)) * intensities[k];
        out.x[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

ExtractedComponents extract_components(const SolutionVector& s) {
    const auto& x = s.x;
    // forward phasor I_F e^{i 2phi_F} and reverse phasor I_R e^{i 2phi_R}
    const double fc = x[1] + x[2];
    const double fs = x[4] - x[3];
    const double rc = x[1] - x[2];
    const double rs = x[3] + x[4];

    ExtractedComponents out;
    auto& p = out.params;
    p.i_f = std::hypot(fc, fs);
    p.i_r = std::hypot(rc, rs);
    p.phi_f = phase_of(fc, fs, p.i_f);
    p.phi_r = phase_of(rc, rs, p.i_r);
    out.i_u_raw = 2.0 * x[0] - p.i_f - p.i_r;
    out.physical = out.i_u_raw >= 0.0;
    p.i_u = out.physical ? out.i_u_raw : 0.0;
    return out;
}

double residual_sum_squares(const DesignMatrix& w, const SolutionVector& x, std::span<const double> intensities) {
    const auto& rows = w.rows();
    double sum = 0.0;
    for (std::size_t k = 0; k < intensities.size(); ++k) {
        double model = 0.0;
        for (int j = 0; j < 5; ++j) model += rows(static_cast<Eigen::Index>(k), j) * x.x[static_cast<std::size_t>(j)];
        const double r = intensities[k] - model;
        sum += r * r;
    }
    return sum;
}

DecompositionResult decompose_stack(const ImageStack& stack) {
    stack.check_consistent();
    const AngleSet angles(stack.pairs, /*allow_repeats=*/true);
    return decompose_stack(stack, build_design_matrix(angles));
}

DecompositionResult decompose_stack(const ImageStack& stack, const DesignMatrix& w) {
    stack.check_consistent();
    if (stack.frames.empty()) throw DimensionMismatch("empty stack");
    if (stack.size() != w.measurements()) {
        throw DimensionMismatch("design matrix has " + std::to_string(w.measurements()) + " rows, stack has " +
                                std::to_string(stack.size()) + " frames");
    }

    const auto& first = stack.frames.front();
    const int width = first.width, height = first.height, channels = first.channels;

    DecompositionResult out;
    out.report = validate_angle_set(AngleSet(stack.pairs, true));
    out.i_u = DoubleImage(width, height, channels);
    out.i_u_raw = DoubleImage(width, height, channels);
    out.i_f = DoubleImage(width, height, channels);
    out.i_r = DoubleImage(width, height, channels);
    out.phi_f = DoubleImage(width, height, channels);
    out.phi_r = DoubleImage(width, height, channels);
    out.residual_rms = DoubleImage(width, height, channels);
    out.valid = Image<std::uint8_t>(width, height, channels);

    const std::size_t n = stack.size();
    std::vector<double> samples(n);
    for (std::size_t i = 0; i < first.size(); ++i) {
        for (std::size_t k = 0; k < n; ++k) samples[k] = stack.frames[k].data[i];
        const auto x = solve_linear(w, samples);
        if (!x) {
            ++out.invalid_count;
            continue;
        }
        const auto c = extract_components(*x);
        out.i_u.data[i] = c.params.i_u;
        out.i_u_raw.data[i] = c.i_u_raw;
        out.i_f.data[i] = c.params.i_f;
        out.i_r.data[i] = c.params.i_r;
        out.phi_f.data[i] = c.params.phi_f;
        out.phi_r.data[i] = c.params.phi_r;
        out.residual_rms.data[i] = std::sqrt(residual_sum_squares(w, *x, samples) / static_cast<double>(n));
        out.valid.data[i] = 1;
        if (!c.physical) ++out.unphysical_count;
    }
    return out;
}

}  // namespace polarsep
