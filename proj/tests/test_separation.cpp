#include <gtest/gtest.h>

#include <cmath>

#include "polarsep/angle_set.hpp"
#include "polarsep/decompose.hpp"
#include "polarsep/errors.hpp"
#include "polarsep/render.hpp"
#include "polarsep/scene.hpp"
#include "polarsep/separation.hpp"

using namespace polarsep;
using namespace polarsep::separation;
using polarsep::synthetic::generate_scene;
using polarsep::synthetic::SceneRecipe;

namespace {

DoubleImage single(double v) { return DoubleImage(1, 1, 1, v); }

PatternedStack render_checker(const synthetic::GroundTruthScene& s, const AngleSet& set, CheckerSpec spec) {
    PatternedStack out;
    out.checker = spec;
    out.phases = synthetic::render_patterned(s, set, checker_patterns(s.projector_width, s.projector_height, spec));
    return out;
}

double sum_over(const DoubleImage& im, const Image<int>& region, int label) {
    double total = 0.0;
    for (std::size_t i = 0; i < im.size(); ++i) {
        if (region.data[i] == label) total += im.data[i];
    }
    return total;
}

SolutionVector x_at(const DecompositionResult& r, std::size_t i) {
    return linearize({r.i_u_raw.data[i], r.i_f.data[i], r.phi_f.data[i], r.i_r.data[i], r.phi_r.data[i]});
}

}  // namespace

TEST(Checker, PhasesAreComplementaryAndShifted) {
    const auto p = checker_patterns(16, 16, {4, 2});
    ASSERT_EQ(p.size(), 2u);
    for (std::size_t i = 0; i < p[0].size(); ++i) EXPECT_EQ(p[0].data[i] + p[1].data[i], 1.0);
    EXPECT_EQ(p[0].at(0, 0), 1.0);
    EXPECT_EQ(p[0].at(4, 0), 0.0);
    EXPECT_EQ(p[0].at(0, 4), 0.0);

    const auto q = checker_patterns(16, 16, {4, 4});
    ASSERT_EQ(q.size(), 4u);
    for (int x = 0; x < 14; ++x) EXPECT_EQ(q[1].at(x, 0), q[0].at(x + 2, 0));
    for (const auto& im : q) {
        double lit = 0.0;
        for (double v : im.data) lit += v;
        EXPECT_EQ(lit, 128.0);
    }
    EXPECT_THROW(checker_patterns(8, 8, {3, 4}), std::invalid_argument);
    EXPECT_THROW(checker_patterns(8, 8, {4, 1}), std::invalid_argument);
}

TEST(Nayar, Examples) {
    const std::vector<DoubleImage> lit_dark{single(1.0), single(0.2)};
    const auto dg = nayar_separate(lit_dark);
    EXPECT_NEAR(dg.direct.data[0], 0.8, 1e-15);
    EXPECT_NEAR(dg.global.data[0], 0.4, 1e-15);

    const std::vector<DoubleImage> even{single(0.5), single(0.5)};
    const auto flat = nayar_separate(even);
    EXPECT_EQ(flat.direct.data[0], 0.0);
    EXPECT_EQ(flat.global.data[0], 1.0);

    const std::vector<DoubleImage> one{single(1.0)};
    EXPECT_THROW(nayar_separate(one), std::invalid_argument);
    const std::vector<DoubleImage> mismatched{single(1.0), DoubleImage(2, 1)};
    EXPECT_THROW(nayar_separate(mismatched), DimensionMismatch);
}

TEST(NayarProperty, DirectPlusGlobalIsFullIlluminationForDirectOnlyScenes) {
    // Without interreflections, a lit pixel sees full direct light plus half
    // the global light; the split recovers the full-illumination image.
    const auto s = generate_scene(SceneRecipe{"hexagon", 64, 64, {{"mirror_reverse", 0.0}}}, 2);
    const auto set = preset_pol_cam_2();
    const auto full = synthetic::render_observations(s, set);
    const auto patterned = render_checker(s, set, {8, 2});
    for (std::size_t f = 0; f < set.size(); ++f) {
        const std::vector<DoubleImage> phases{patterned.phases[0].frames[f], patterned.phases[1].frames[f]};
        const auto dg = nayar_separate(phases);
        for (std::size_t i = 0; i < dg.direct.size(); ++i) {
            ASSERT_NEAR(dg.direct.data[i] + dg.global.data[i], full.frames[f].data[i], 1e-9);
        }
    }
}

TEST(CombinedProperty, SeparationCommutesWithDecomposition) {
    // The checker period matches the footprint, so every pixel sees half of
    // its global footprint lit in either phase and the lit phase is the same
    // in every polarizer frame. Separation and the linear solve then commute:
    // X(direct) = X(lit) - X(unlit) and X(global) = 2 X(unlit).
    const auto s = generate_scene(SceneRecipe{"hexagon", 64, 64, {}}, 3);
    const auto set = preset_pol_cam_2();
    const auto patterned = render_checker(s, set, {8, 2});
    const auto grid = combined_decompose(patterned);
    const auto d0 = decompose_stack(patterned.phases[0]);
    const auto d1 = decompose_stack(patterned.phases[1]);
    for (std::size_t i = 0; i < s.i_u.size(); ++i) {
        const bool lit0 = patterned.phases[0].frames[0].data[i] >= patterned.phases[1].frames[0].data[i];
        const auto x_on = x_at(lit0 ? d0 : d1, i);
        const auto x_off = x_at(lit0 ? d1 : d0, i);
        const auto x_dir = x_at(grid.direct, i);
        const auto x_glob = x_at(grid.global, i);
        for (std::size_t j = 0; j < 5; ++j) {
            ASSERT_NEAR(x_dir[j], x_on[j] - x_off[j], 1e-7);
            ASSERT_NEAR(x_glob[j], 2.0 * x_off[j], 1e-7);
        }
    }
}

TEST(Combined, DirectForwardOnlySceneHasNoGlobalPolarization) {
    const auto s = generate_scene(SceneRecipe{"hexagon", 64, 64,
                                              {{"global", 0.0}, {"mirror_reverse", 0.0}, {"diffuse", 0.0}}},
                                  4);
    const auto grid = combined_decompose(render_checker(s, preset_pol_cam_2(), {8, 2}));
    for (std::size_t i = 0; i < s.i_f.size(); ++i) {
        EXPECT_NEAR(grid.direct.i_f.data[i], s.i_f.data[i], 1e-9);
        EXPECT_NEAR(grid.global.i_f.data[i], 0.0, 1e-9);
        EXPECT_NEAR(grid.global.i_r.data[i], 0.0, 1e-9);
    }
}

TEST(Combined, HexagonReverseLightLandsInDirectReverse) {
    const auto s = generate_scene(SceneRecipe{"hexagon", 64, 64, {}}, 5);
    const auto grid = combined_decompose(render_checker(s, preset_pol_cam_2(), {8, 2}));
    const double dir_r = sum_over(grid.direct.i_r, s.region, 1);
    const double glob_r = sum_over(grid.global.i_r, s.region, 1);
    const double injected = sum_over(s.i_r, s.region, 1);
    EXPECT_GT(dir_r / (dir_r + glob_r), 0.9);
    EXPECT_NEAR(dir_r, injected, 0.05 * injected);

    // The slowly varying unpolarized term ends up in the global column.
    double glob_u = 0.0, dir_u_global_part = 0.0, injected_global = 0.0;
    for (std::size_t i = 0; i < s.i_u.size(); ++i) {
        glob_u += grid.global.i_u.data[i];
        injected_global += s.i_u_global.data[i];
        dir_u_global_part += std::max(0.0, grid.direct.i_u.data[i] - s.i_u.data[i]);
    }
    EXPECT_NEAR(glob_u, injected_global, 0.02 * injected_global);
    EXPECT_LT(dir_u_global_part, 0.1 * injected_global);
}

TEST(Combined, RejectsInconsistentStacks) {
    PatternedStack p;
    p.checker = {8, 2};
    ImageStack a;
    a.frames = {DoubleImage(4, 4)};
    a.pairs = {PolarizerPair(0, 0)};
    p.phases = {a};
    EXPECT_THROW(p.check_consistent(), std::invalid_argument);
    ImageStack b = a;
    b.pairs = {PolarizerPair(0.5, 0)};
    p.phases = {a, b};
    EXPECT_THROW(p.check_consistent(), std::invalid_argument);
    b = a;
    b.frames = {DoubleImage(5, 4)};
    p.phases = {a, b};
    EXPECT_THROW(p.check_consistent(), DimensionMismatch);
}
