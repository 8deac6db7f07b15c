#include "polarsep/render.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "polarsep/errors.hpp"

namespace polarsep::synthetic {

namespace {

// Illumination weight of each light path at one pixel.
struct PathWeights {
    double local = 1.0;
    double global = 1.0;
    double reverse = 1.0;
    double third = 1.0;
};

ImageStack render_with(const GroundTruthScene& scene, const AngleSet& angles, const std::vector<PathWeights>& weights,
                       std::mt19937_64* rng, double sigma) {
    ImageStack stack;
    stack.pairs = angles.pairs();
    std::normal_distribution<double> gauss(0.0, sigma);
    for (const auto& pair : angles.pairs()) {
        DoubleImage frame(scene.width, scene.height);
        for (std::size_t i = 0; i < frame.size(); ++i) {
            const auto& w = weights[i];
            double v = 0.5 * (scene.i_u.data[i] * w.local + scene.i_u_global.data[i] * w.global);
            v += w.local * forward_intensity(scene.i_f.data[i], scene.phi_f.data[i], pair);
            v += w.reverse * reverse_intensity(scene.i_r.data[i], scene.phi_r.data[i], pair);
            if (scene.has_third()) v += w.third * forward_intensity(scene.i_t.data[i], scene.phi_t.data[i], pair);
            if (rng != nullptr && sigma > 0.0) v += gauss(*rng);
            frame.data[i] = v;
        }
        stack.frames.push_back(std::move(frame));
    }
    return stack;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

void NoiseSpec::validate() const {
    if (!(gaussian_sigma >= 0.0) || !std::isfinite(gaussian_sigma)) {
        throw std::invalid_argument("noise sigma must be finite and non-negative");
    }
}

double footprint_mean(const DoubleImage& pattern, int col, int row, int radius) {
    if (radius <= 0) return pattern.at(col, row);
    const int w = pattern.width, h = pattern.height;
    double sum = 0.0;
    for (int dy = -radius; dy < radius; ++dy) {
        const int y = ((row + dy) % h + h) % h;
        for (int dx = -radius; dx < radius; ++dx) {
            const int x = ((col + dx) % w + w) % w;
            sum += pattern.at(x, y);
        }
    }
    return sum / (4.0 * radius * radius);
}

ImageStack render_observations(const GroundTruthScene& scene, const AngleSet& angles, const NoiseSpec& noise) {
    noise.validate();
    scene.check_consistent();
    if (angles.size() == 0) throw std::invalid_argument("empty angle set");
    const std::vector<PathWeights> white(scene.i_u.pixel_count());
    std::mt19937_64 rng(noise.seed);
    return render_with(scene, angles, white, &rng, noise.gaussian_sigma);
}

std::vector<ImageStack> render_patterned(const GroundTruthScene& scene, const AngleSet& angles,
                                         const std::vector<DoubleImage>& patterns, const NoiseSpec& noise) {
    noise.validate();
    scene.check_consistent();
    if (angles.size() == 0) throw std::invalid_argument("empty angle set");
    for (const auto& p : patterns) {
        if (p.width != scene.projector_width || p.height != scene.projector_height || p.channels != 1) {
            throw DimensionMismatch("pattern is " + std::to_string(p.width) + "x" + std::to_string(p.height) +
                                    ", projector is " + std::to_string(scene.projector_width) + "x" +
                                    std::to_string(scene.projector_height));
        }
    }

    bool any_global = false;
    for (double g : scene.i_u_global.data) any_global = any_global || g != 0.0;

    std::vector<ImageStack> out;
    out.reserve(patterns.size());
    std::vector<PathWeights> weights(scene.i_u.pixel_count());
    for (std::size_t k = 0; k < patterns.size(); ++k) {
        const auto& pat = patterns[k];
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const auto& d = *scene.direct_map[i];
            auto& w = weights[i];
            w.local = pat.at(d.col, d.row);
            w.global = any_global ? footprint_mean(pat, d.col, d.row, scene.footprint_radius) : 0.0;
            const auto& s = scene.source_map[i];
            w.reverse = s ? pat.at(s->col, s->row) : 0.0;
            w.third = 0.0;
            if (scene.has_third() && scene.third_map[i]) w.third = pat.at(scene.third_map[i]->col, scene.third_map[i]->row);
        }
        std::mt19937_64 rng(stream_seed(noise.seed, k));
        out.push_back(render_with(scene, angles, weights, &rng, noise.gaussian_sigma));
    }
    return out;
}

}  // namespace polarsep::synthetic
