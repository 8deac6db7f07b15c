#pragma once

#include <cstdint>
#include <vector>

#include "polarsep/angle_set.hpp"
#include "polarsep/image.hpp"
#include "polarsep/scene.hpp"

namespace polarsep::synthetic {

struct NoiseSpec {
    double gaussian_sigma = 0.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on a negative or non-finite sigma.
    void validate() const;
};

/// One frame per pair of the mixture model under white illumination, plus
/// additive Gaussian noise.
ImageStack render_observations(const GroundTruthScene& scene, const AngleSet& angles, const NoiseSpec& noise = {});

/// One stack per projector pattern. The forward and local unpolarized terms
/// are scaled by the pattern at the direct pixel, the reverse term by the
/// pattern at the source pixel, the third-bounce term by the pattern at its
/// own source, and the global unpolarized term by the mean of the pattern
/// over the footprint window (wrapping at the projector border). Pattern k
/// draws its noise from a stream derived from (seed, k).
/// Throws DimensionMismatch when a pattern is not projector-sized.
std::vector<ImageStack> render_patterned(const GroundTruthScene& scene, const AngleSet& angles,
                                         const std::vector<DoubleImage>& patterns, const NoiseSpec& noise = {});

/// Mean of `pattern` over [col - r, col + r) x [row - r, row + r), wrapping.
/// r = 0 samples the single pixel.
double footprint_mean(const DoubleImage& pattern, int col, int row, int radius);

}  // namespace polarsep::synthetic
