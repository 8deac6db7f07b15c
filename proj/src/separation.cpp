#include "polarsep/separation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "polarsep/errors.hpp"

namespace polarsep::separation {

void CheckerSpec::validate() const {
    if (period < 1) throw std::invalid_argument("checker period must be at least 1");
    if (phases < 2) throw std::invalid_argument("at least two checker phases are required");
    if ((2 * period) % phases != 0) {
        throw std::invalid_argument("2 * period (" + std::to_string(2 * period) + ") is not divisible by " +
                                    std::to_string(phases) + " phases");
    }
}

std::vector<DoubleImage> checker_patterns(int width, int height, const CheckerSpec& spec) {
    spec.validate();
    if (width < 1 || height < 1) throw std::invalid_argument("pattern size must be positive");
    std::vector<DoubleImage> out;
    const int step = 2 * spec.period / spec.phases;
    for (int k = 0; k < spec.phases; ++k) {
        DoubleImage p(width, height);
        const int shift = k * step;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                p.at(x, y) = (((x + shift) / spec.period + y / spec.period) % 2 == 0) ? 1.0 : 0.0;
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

DirectGlobal nayar_separate(std::span<const DoubleImage> phase_images) {
    if (phase_images.size() < 2) throw std::invalid_argument("separation needs at least two phase-shifted images");
    const auto& first = phase_images.front();
    for (const auto& im : phase_images) {
        if (!im.same_shape(first)) throw DimensionMismatch("phase images differ in dimensions");
    }
    DirectGlobal out{DoubleImage(first.width, first.height, first.channels),
                     DoubleImage(first.width, first.height, first.channels)};
    for (std::size_t i = 0; i < first.size(); ++i) {
        double lo = first.data[i], hi = first.data[i];
        for (const auto& im : phase_images) {
            lo = std::min(lo, im.data[i]);
            hi = std::max(hi, im.data[i]);
        }
        out.direct.data[i] = hi - lo;
        out.global.data[i] = 2.0 * lo;
    }
    return out;
}

void PatternedStack::check_consistent() const {
    checker.validate();
    if (phases.size() < 2) throw std::invalid_argument("patterned stack needs at least two phases");
    for (const auto& s : phases) {
        s.check_consistent();
        if (s.pairs != phases.front().pairs) throw std::invalid_argument("phase stacks use different polarizer pairs");
        if (s.frames.empty() || !s.frames.front().same_shape(phases.front().frames.front())) {
            throw DimensionMismatch("phase stacks differ in dimensions");
        }
    }
}

SeparationGrid combined_decompose(const PatternedStack& patterned) {
    patterned.check_consistent();
    const auto& ref = patterned.phases.front();
    ImageStack direct, global;
    direct.pairs = ref.pairs;
    global.pairs = ref.pairs;
    std::vector<DoubleImage> per_phase(patterned.phases.size());
    for (std::size_t f = 0; f < ref.size(); ++f) {
        for (std::size_t k = 0; k < patterned.phases.size(); ++k) per_phase[k] = patterned.phases[k].frames[f];
        auto dg = nayar_separate(per_phase);
        direct.frames.push_back(std::move(dg.direct));
        global.frames.push_back(std::move(dg.global));
    }
    const auto w = build_design_matrix(AngleSet(ref.pairs, true));
    return {decompose_stack(direct, w), decompose_stack(global, w)};
}

}  // namespace polarsep::separation
