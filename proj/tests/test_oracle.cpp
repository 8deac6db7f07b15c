#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "polarsep/angle_set.hpp"
#include "polarsep/decompose.hpp"
#include "polarsep/oracle.hpp"

using namespace polarsep;

namespace {

std::vector<double> synthesize(const ComponentParams& p, const AngleSet& set) {
    std::vector<double> out;
    for (const auto& pair : set.pairs()) out.push_back(mixture_intensity(p, pair));
    return out;
}

SolutionVector oracle_x(const OracleFit& fit) {
    ComponentParams p = fit.params;
    p.i_u = fit.i_u_raw;
    return linearize(p);
}

double max_abs_diff(const SolutionVector& a, const SolutionVector& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < 5; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

}  // namespace

TEST(Oracle, CanonicalFixtureAgreesWithClosedForm) {
    const auto set = preset_pol_cam_2();
    const ComponentParams p{0.4, 0.6, 0.1, 0.2, 1.0};
    const auto obs = synthesize(p, set);
    const auto fit = brute_force_fit(obs, set);
    EXPECT_NEAR(fit.params.i_u, 0.4, 1e-6);
    EXPECT_NEAR(fit.params.i_f, 0.6, 1e-6);
    EXPECT_NEAR(fit.params.phi_f, 0.1, 1e-6);
    EXPECT_NEAR(fit.params.i_r, 0.2, 1e-6);
    EXPECT_NEAR(fit.params.phi_r, 1.0, 1e-6);
    const auto x = *solve_linear(build_design_matrix(set), obs);
    EXPECT_LE(max_abs_diff(oracle_x(fit), x), 1e-6);
}

TEST(Oracle, PureForwardInputHasNegligibleReverse) {
    const auto set = preset_min5();
    const auto fit = brute_force_fit(synthesize({0.3, 0.8, 2.0, 0.0, 0.0}, set), set);
    EXPECT_LE(fit.params.i_r, 1e-6);
    EXPECT_NEAR(fit.params.i_f, 0.8, 1e-6);
}

TEST(Oracle, IsDeterministic) {
    const auto set = preset_pol_cam_4();
    const auto obs = synthesize({0.1, 0.2, 0.3, 0.4, 0.5}, set);
    const auto a = brute_force_fit(obs, set);
    const auto b = brute_force_fit(obs, set);
    EXPECT_EQ(a.params.i_f, b.params.i_f);
    EXPECT_EQ(a.params.phi_r, b.params.phi_r);
    EXPECT_EQ(a.residual, b.residual);
}

TEST(Oracle, ModelResidualIsZeroAtTruth) {
    const auto set = preset_pol_cam_2();
    const ComponentParams p{0.25, 0.5, 0.7, 0.75, 2.9};
    EXPECT_NEAR(model_residual(synthesize(p, set), set, p.i_u, p.i_f, p.phi_f, p.i_r, p.phi_r), 0.0, 1e-28);
}

TEST(OracleProperty, AgreesWithClosedFormOnRandomInstances) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> mag(0.0, 1.5), ph(0.0, kPi);
    const std::vector<AngleSet> sets{preset_min5(), preset_pol_cam_2(), preset_pol_cam_4()};
    for (int i = 0; i < 120; ++i) {
        const auto& set = sets[static_cast<std::size_t>(i) % sets.size()];
        const ComponentParams p{mag(rng), mag(rng), ph(rng), mag(rng), ph(rng)};
        const auto obs = synthesize(p, set);
        const auto fit = brute_force_fit(obs, set);
        const auto x = *solve_linear(build_design_matrix(set), obs);
        ASSERT_LE(max_abs_diff(oracle_x(fit), x), 1e-6) << "instance " << i;
    }
}

TEST(OracleProperty, ClosedFormResidualNeverExceedsOracle) {
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> mag(0.0, 1.5), ph(0.0, kPi);
    std::normal_distribution<double> noise(0.0, 1e-3);
    const auto set = preset_pol_cam_4();
    const auto w = build_design_matrix(set);
    for (int i = 0; i < 100; ++i) {
        auto obs = synthesize({mag(rng), mag(rng), ph(rng), mag(rng), ph(rng)}, set);
        for (auto& v : obs) v += noise(rng);
        const auto fit = brute_force_fit(obs, set);
        const auto x = *solve_linear(w, obs);
        ASSERT_LE(residual_sum_squares(w, x, obs), fit.residual + 1e-9);
        ASSERT_LE(max_abs_diff(oracle_x(fit), x), 1e-6);
    }
}
