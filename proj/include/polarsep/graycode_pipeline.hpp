#pragma once

#include <string>
#include <vector>

#include "polarsep/angle_set.hpp"
#include "polarsep/gray_code.hpp"
#include "polarsep/plane_metric.hpp"
#include "polarsep/render.hpp"
#include "polarsep/scene.hpp"
#include "polarsep/triangulation.hpp"

namespace polarsep::structured_light {

/// Polarimetric stacks captured under one bit-plane and its inverse.
struct BitStacks {
    int bit = 0;
    ImageStack pattern;
    ImageStack inverse;
};

struct GraycodeCapture {
    int n_bits = 0;
    std::vector<BitStacks> bits;
};

/// Renders every bit-plane pair of a column Gray code sized to the scene's projector.
GraycodeCapture simulate_graycode(const synthetic::GroundTruthScene& scene, const AngleSet& angles,
                                  const synthetic::NoiseSpec& noise);

/// Image each bit is decoded from: the plain frame sum, or one decomposed component.
enum class DecodeSignal { raw, forward, reverse };

std::string to_string(DecodeSignal s);
/// Accepts "raw", "forward", "reverse". Throws std::invalid_argument.
DecodeSignal decode_signal_from_string(const std::string& s);

/// Per-bit observations of the selected signal.
std::vector<BitObservation> observations_for(const GraycodeCapture& capture, DecodeSignal signal);

struct DecodeOutcome {
    DecodeSignal signal = DecodeSignal::raw;
    double threshold = 0.0;
    CorrespondenceMap map;
    PointCloud cloud;
    PlaneFitResult metric;
};

struct ExperimentOptions {
    double threshold_fraction = 0.02;  ///< of the brightest observation sample
    double tol_mm = 1.0;
    PlaneSource planes = PlaneSource::ground_truth;
};

/// Decode, triangulate and score one signal.
DecodeOutcome run_decode(const GraycodeCapture& capture, DecodeSignal signal, const RigCalibration& rig,
                         const GrooveSpec& spec, const ExperimentOptions& options = {});

}  // namespace polarsep::structured_light
