#include "polarsep/graycode_pipeline.hpp"

#include <stdexcept>

#include "polarsep/decompose.hpp"
#include "polarsep/errors.hpp"

namespace polarsep::structured_light {

namespace {

DoubleImage frame_sum(const ImageStack& stack) {
    stack.check_consistent();
    if (stack.frames.empty()) throw DimensionMismatch("empty stack");
    DoubleImage out = stack.frames.front();
    for (std::size_t k = 1; k < stack.size(); ++k) {
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += stack.frames[k].data[i];
    }
    return out;
}

}  // namespace

GraycodeCapture simulate_graycode(const synthetic::GroundTruthScene& scene, const AngleSet& angles,
                                  const synthetic::NoiseSpec& noise) {
    const int n_bits = bits_for_width(scene.projector_width);
    const auto set = generate_patterns(n_bits, scene.projector_width, scene.projector_height);
    std::vector<DoubleImage> patterns;
    for (const auto& plane : set.planes) {
        patterns.push_back(plane.pattern);
        patterns.push_back(plane.inverse);
    }
    auto stacks = synthetic::render_patterned(scene, angles, patterns, noise);
    GraycodeCapture capture{n_bits, {}};
    for (std::size_t k = 0; k < set.planes.size(); ++k) {
        capture.bits.push_back({set.planes[k].bit, std::move(stacks[2 * k]), std::move(stacks[2 * k + 1])});
    }
    return capture;
}

std::string to_string(DecodeSignal s) {
    switch (s) {
        case DecodeSignal::raw: return "raw";
        case DecodeSignal::forward: return "forward";
        case DecodeSignal::reverse: return "reverse";
    }
    return "raw";
}

DecodeSignal decode_signal_from_string(const std::string& s) {
    if (s == "raw") return DecodeSignal::raw;
    if (s == "forward") return DecodeSignal::forward;
    if (s == "reverse") return DecodeSignal::reverse;
    throw std::invalid_argument("unknown decode signal '" + s + "' (expected raw, forward or reverse)");
}

std::vector<BitObservation> observations_for(const GraycodeCapture& capture, DecodeSignal signal) {
    if (capture.bits.empty()) throw std::invalid_argument("capture holds no bit-planes");
    std::vector<BitObservation> obs;
    if (signal == DecodeSignal::raw) {
        for (const auto& b : capture.bits) obs.push_back({b.bit, frame_sum(b.pattern), frame_sum(b.inverse)});
        return obs;
    }
    const auto w = build_design_matrix(AngleSet(capture.bits.front().pattern.pairs, true));
    const auto pick = [&](const ImageStack& s) {
        auto r = decompose_stack(s, w);
        return signal == DecodeSignal::forward ? std::move(r.i_f) : std::move(r.i_r);
    };
    for (const auto& b : capture.bits) obs.push_back({b.bit, pick(b.pattern), pick(b.inverse)});
    return obs;
}

DecodeOutcome run_decode(const GraycodeCapture& capture, DecodeSignal signal, const RigCalibration& rig,
                         const GrooveSpec& spec, const ExperimentOptions& options) {
    DecodeOutcome out;
    out.signal = signal;
    const auto obs = observations_for(capture, signal);
    out.threshold = default_threshold(obs, options.threshold_fraction);
    out.map = decode(obs, out.threshold);
    out.cloud = triangulate(out.map, rig);
    out.metric = plane_fit_metric(out.cloud, spec, options.tol_mm, options.planes);
    return out;
}

}  // namespace polarsep::structured_light
