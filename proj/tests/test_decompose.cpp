#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/LU>

#include "polarsep/angle_set.hpp"
#include "polarsep/decompose.hpp"
#include "polarsep/errors.hpp"

using namespace polarsep;

namespace {

const ComponentParams kFixture{0.4, 0.6, 0.1, 0.2, 1.0};

// Frozen from an independent scalar script expanding the three closed-form terms.
constexpr std::array<double, 5> kFixtureX{0.59999999999999998, 0.25240528969765819, 0.33563465700708672,
                                          0.031328943444049816, 0.15053054192108653};
// Fixture observed over camera {0,45,90,135} x light {0,45} (light-major).
constexpr std::array<double, 8> kFixtureI{0.85240528969765827, 0.75053054192108659, 0.34759471030234179,
                                          0.44946945807891336, 0.63132894344404988, 0.93563465700708681,
                                          0.56867105655595018, 0.26436534299291325};

double phase_error(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

std::vector<double> synthesize(const ComponentParams& p, const AngleSet& set) {
    std::vector<double> out;
    for (const auto& pair : set.pairs()) out.push_back(mixture_intensity(p, pair));
    return out;
}

ComponentParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(1e-3, 2.0), ph(0.0, kPi);
    return {mag(rng), mag(rng), ph(rng), mag(rng), ph(rng)};
}

AngleSet random_full_rank_set(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> a(0.0, kPi);
    for (;;) {
        std::vector<PolarizerPair> pairs;
        for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(a(rng), a(rng));
        AngleSet set(pairs);
        const auto r = validate_angle_set(set);
        if (r.rank == 5 && r.cond < 50) return set;
    }
}

void expect_recovered(const ComponentParams& got, const ComponentParams& want, double rel) {
    const auto close = [&](double g, double w) { return std::abs(g - w) <= rel * std::max(std::abs(w), 1e-6); };
    EXPECT_TRUE(close(got.i_u, want.i_u)) << got.i_u << " vs " << want.i_u;
    EXPECT_TRUE(close(got.i_f, want.i_f)) << got.i_f << " vs " << want.i_f;
    EXPECT_TRUE(close(got.i_r, want.i_r)) << got.i_r << " vs " << want.i_r;
    if (want.i_f > 1e-6) {
        EXPECT_LE(phase_error(got.phi_f, want.phi_f), 1e-9);
    }
    if (want.i_r > 1e-6) {
        EXPECT_LE(phase_error(got.phi_r, want.phi_r), 1e-9);
    }
}

}  // namespace

TEST(Linearize, FixtureMatchesIndependentExpansion) {
    const auto x = linearize(kFixture);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(x[j], kFixtureX[j], 1e-15) << "x" << j + 1;
}

TEST(Linearize, DesignRowTimesXReproducesForwardModel) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> a(0.0, kPi);
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_params(rng);
        const PolarizerPair pair(a(rng), a(rng));
        const auto w = design_vector(pair);
        const auto x = linearize(p);
        double model = 0.0;
        for (std::size_t j = 0; j < 5; ++j) model += w[j] * x[j];
        ASSERT_NEAR(model, mixture_intensity(p, pair), 1e-12);
    }
}

TEST(SolveLinear, FixtureIntensitiesMatchFrozenValues) {
    const auto set = preset_pol_cam_2();
    const auto got = synthesize(kFixture, set);
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(got[k], kFixtureI[k], 1e-15) << "frame " << k;
}

TEST(SolveLinear, FixtureRecoversLinearizedUnknowns) {
    const auto w = build_design_matrix(preset_pol_cam_2());
    const auto x = solve_linear(w, kFixtureI);
    ASSERT_TRUE(x.has_value());
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR((*x)[j], kFixtureX[j], 1e-12);
}

TEST(SolveLinear, ConstantSignalIsPureUnpolarized) {
    for (const auto& set : {preset_min5(), preset_pol_cam_2(), preset_pol_cam_4()}) {
        const auto w = build_design_matrix(set);
        const std::vector<double> c(set.size(), 0.37);
        const auto x = solve_linear(w, c);
        ASSERT_TRUE(x);
        EXPECT_NEAR((*x)[0], 0.37, 1e-14);
        for (std::size_t j = 1; j < 5; ++j) EXPECT_NEAR((*x)[j], 0.0, 1e-14);
    }
}

TEST(SolveLinear, NonFiniteSampleMasksPixel) {
    const auto w = build_design_matrix(preset_min5());
    std::vector<double> v{0.1, 0.2, std::numeric_limits<double>::quiet_NaN(), 0.3, 0.4};
    EXPECT_FALSE(solve_linear(w, v).has_value());
    v[2] = std::numeric_limits<double>::infinity();
    EXPECT_FALSE(solve_linear(w, v).has_value());
}

TEST(SolveLinear, LengthMismatchThrows) {
    const auto w = build_design_matrix(preset_min5());
    const std::vector<double> v{0.1, 0.2, 0.3};
    EXPECT_THROW(solve_linear(w, v), std::invalid_argument);
}

TEST(ExtractComponents, UnpolarizedOnly) {
    const auto c = extract_components({{0.25, 0, 0, 0, 0}});
    EXPECT_DOUBLE_EQ(c.params.i_u, 0.5);
    EXPECT_EQ(c.params.i_f, 0.0);
    EXPECT_EQ(c.params.i_r, 0.0);
    EXPECT_EQ(c.params.phi_f, 0.0);
    EXPECT_EQ(c.params.phi_r, 0.0);
    EXPECT_TRUE(c.physical);
}

TEST(ExtractComponents, FixtureChain) {
    SolutionVector x;
    x.x = kFixtureX;
    const auto c = extract_components(x);
    EXPECT_NEAR(c.params.i_u, 0.4, 1e-14);
    EXPECT_NEAR(c.params.i_f, 0.6, 1e-14);
    EXPECT_NEAR(c.params.phi_f, 0.1, 1e-14);
    EXPECT_NEAR(c.params.i_r, 0.2, 1e-14);
    EXPECT_NEAR(c.params.phi_r, 1.0, 1e-14);
}

TEST(ExtractComponents, NegativeUnpolarizedIsFlaggedAndClamped) {
    ComponentParams p{0.0, 0.5, 0.3, 0.5, 0.9};
    auto x = linearize(p);
    x.x[0] -= 0.01;
    const auto c = extract_components(x);
    EXPECT_LT(c.i_u_raw, 0.0);
    EXPECT_NEAR(c.i_u_raw, -0.02, 1e-14);
    EXPECT_EQ(c.params.i_u, 0.0);
    EXPECT_FALSE(c.physical);
}

TEST(DecomposeProperty, RoundTripOverRandomParamsAndAngleSets) {
    std::mt19937_64 rng(2024);
    const std::vector<AngleSet> sets{preset_min5(), preset_pol_cam_2(), preset_pol_cam_4(), random_full_rank_set(rng, 5),
                                     random_full_rank_set(rng, 9), random_full_rank_set(rng, 24)};
    for (const auto& set : sets) {
        const auto w = build_design_matrix(set);
        for (int i = 0; i < 1000; ++i) {
            const auto p = random_params(rng);
            const auto x = solve_linear(w, synthesize(p, set));
            ASSERT_TRUE(x);
            const auto c = extract_components(*x);
            expect_recovered(c.params, p, 1e-9);
            if (::testing::Test::HasFailure()) return;
        }
    }
}

TEST(DecomposeProperty, PureForwardHasNoReverse) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(1e-3, 2.0), ph(0.0, kPi);
    for (const auto& set : {preset_min5(), preset_pol_cam_2(), preset_pol_cam_4()}) {
        const auto w = build_design_matrix(set);
        for (int i = 0; i < 500; ++i) {
            const ComponentParams p{mag(rng), mag(rng), ph(rng), 0.0, 0.0};
            const auto c = extract_components(*solve_linear(w, synthesize(p, set)));
            ASSERT_LE(c.params.i_r, 1e-9);
            ASSERT_NEAR(c.params.i_f, p.i_f, 1e-9 * p.i_f);
        }
    }
}

TEST(DecomposeProperty, PureReverseHasNoForward) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> mag(1e-3, 2.0), ph(0.0, kPi);
    for (const auto& set : {preset_min5(), preset_pol_cam_2(), preset_pol_cam_4()}) {
        const auto w = build_design_matrix(set);
        for (int i = 0; i < 500; ++i) {
            const ComponentParams p{mag(rng), 0.0, 0.0, mag(rng), ph(rng)};
            const auto c = extract_components(*solve_linear(w, synthesize(p, set)));
            ASSERT_LE(c.params.i_f, 1e-9);
            ASSERT_NEAR(c.params.i_r, p.i_r, 1e-9 * p.i_r);
        }
    }
}

TEST(DecomposeProperty, EnergyConsistency) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        SolutionVector x{{g(rng), g(rng), g(rng), g(rng), g(rng)}};
        const auto c = extract_components(x);
        ASSERT_NEAR(c.i_u_raw + c.params.i_f + c.params.i_r, 2.0 * x[0], 1e-14 * (1 + std::abs(x[0]) + c.params.i_f + c.params.i_r));
    }
}

TEST(DecomposeProperty, LeastSquaresOptimality) {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const auto set = random_full_rank_set(rng, 6 + trial % 20);
        const auto w = build_design_matrix(set);
        auto obs = synthesize(random_params(rng), set);
        for (auto& v : obs) v += 1e-2 * g(rng);
        const auto x = *solve_linear(w, obs);
        const double base = residual_sum_squares(w, x, obs);
        for (int d = 0; d < 50; ++d) {
            SolutionVector y = x;
            std::array<double, 5> dir{};
            double norm = 0.0;
            for (auto& c : dir) {
                c = g(rng);
                norm += c * c;
            }
            norm = std::sqrt(norm);
            for (std::size_t j = 0; j < 5; ++j) y.x[j] += 1e-4 * dir[j] / norm;
            ASSERT_GE(residual_sum_squares(w, y, obs), base);
        }
    }
}

TEST(DecomposeProperty, NoiseMatchesPseudoInverseCovariance) {
    std::mt19937_64 rng(11);
    const auto set = random_full_rank_set(rng, 40);
    const auto w = build_design_matrix(set);
    const Eigen::MatrixXd cov = (w.rows().transpose() * w.rows()).inverse();
    const auto p = random_params(rng);
    const auto clean = synthesize(p, set);
    const auto x0 = *solve_linear(w, clean);
    const double sigma = 1e-3;
    std::normal_distribution<double> noise(0.0, sigma);
    const int trials = 1000;
    std::array<double, 5> sq{};
    std::vector<double> obs(clean.size());
    for (int t = 0; t < trials; ++t) {
        for (std::size_t k = 0; k < obs.size(); ++k) obs[k] = clean[k] + noise(rng);
        const auto x = *solve_linear(w, obs);
        for (std::size_t j = 0; j < 5; ++j) {
            const double bound = sigma * std::sqrt(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
            const double dx = x[j] - x0[j];
            ASSERT_LE(std::abs(dx), 5.0 * bound) << "coordinate " << j;
            sq[j] += dx * dx;
        }
    }
    for (std::size_t j = 0; j < 5; ++j) {
        const double expected = sigma * std::sqrt(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
        EXPECT_NEAR(std::sqrt(sq[j] / trials), expected, 0.1 * expected) << "coordinate " << j;
    }
}

TEST(DecomposeStack, ConstantFramesArePureUnpolarized) {
    ImageStack s;
    s.pairs = preset_pol_cam_2().pairs();
    for (std::size_t k = 0; k < s.pairs.size(); ++k) s.frames.emplace_back(4, 3, 1, 0.3);
    const auto r = decompose_stack(s);
    for (std::size_t i = 0; i < r.i_u.size(); ++i) {
        EXPECT_NEAR(r.i_u.data[i], 0.6, 1e-14);
        EXPECT_NEAR(r.i_f.data[i], 0.0, 1e-14);
        EXPECT_NEAR(r.i_r.data[i], 0.0, 1e-14);
        EXPECT_EQ(r.valid.data[i], 1);
    }
    EXPECT_EQ(r.report.rank, 5);
}

TEST(DecomposeStack, MaskedPixelLeavesOthersUntouched) {
    const auto set = preset_pol_cam_2();
    ImageStack s;
    s.pairs = set.pairs();
    const auto obs = synthesize(kFixture, set);
    for (std::size_t k = 0; k < set.size(); ++k) s.frames.emplace_back(3, 3, 1, obs[k]);
    const auto clean = decompose_stack(s);
    s.frames[4].at(1, 2) = std::numeric_limits<double>::quiet_NaN();
    const auto r = decompose_stack(s);
    EXPECT_EQ(r.invalid_count, 1u);
    EXPECT_EQ(r.valid.at(1, 2), 0);
    EXPECT_EQ(r.i_f.at(1, 2), 0.0);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            if (x == 1 && y == 2) continue;
            EXPECT_EQ(r.i_f.at(x, y), clean.i_f.at(x, y));
            EXPECT_EQ(r.phi_r.at(x, y), clean.phi_r.at(x, y));
            EXPECT_EQ(r.valid.at(x, y), 1);
        }
    }
}

TEST(DecomposeStack, ResidualIsZeroForExactData) {
    const auto set = preset_pol_cam_4();
    ImageStack s;
    s.pairs = set.pairs();
    const auto obs = synthesize(kFixture, set);
    for (std::size_t k = 0; k < set.size(); ++k) s.frames.emplace_back(2, 2, 1, obs[k]);
    const auto r = decompose_stack(s);
    for (double v : r.residual_rms.data) EXPECT_LT(v, 1e-14);
    EXPECT_NEAR(r.phi_f.data[0], 0.1, 1e-12);
}

TEST(DecomposeStack, Errors) {
    ImageStack s;
    s.pairs = preset_pol_cam_2().pairs();
    for (std::size_t k = 0; k < s.pairs.size(); ++k) s.frames.emplace_back(4, 4);
    s.frames[3] = DoubleImage(4, 5);
    EXPECT_THROW(decompose_stack(s), DimensionMismatch);

    ImageStack d;
    d.pairs = AngleSet::from_degrees({{0, 0}, {45, 0}, {90, 0}, {135, 0}, {30, 0}}).pairs();
    for (std::size_t k = 0; k < d.pairs.size(); ++k) d.frames.emplace_back(2, 2);
    EXPECT_THROW(decompose_stack(d), DegenerateAngleSet);

    ImageStack m;
    m.pairs = preset_min5().pairs();
    m.frames.emplace_back(2, 2);
    EXPECT_THROW(decompose_stack(m), DimensionMismatch);
}
