#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polarsep/errors.hpp"
#include "polarsep/pfm.hpp"
#include "../tools/colormap.hpp"
#include "../tools/commands.hpp"

using namespace polarsep;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "polarsep");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

// Runs the CLI and returns (exit code, captured stdout).
std::pair<int, std::string> run_captured(std::vector<std::string> args) {
    testing::internal::CaptureStdout();
    const int rc = run_cli(std::move(args));
    return {rc, testing::internal::GetCapturedStdout()};
}

fs::path fresh_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("polarsep_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::set<std::string> listing(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
    return names;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Colormap, HueValueExamples) {
    EXPECT_EQ(viz::hue_value_to_rgb8(0.0, 1.0), (viz::Rgb8{255, 0, 0}));
    EXPECT_EQ(viz::hue_value_to_rgb8(120.0, 1.0), (viz::Rgb8{0, 255, 0}));
    EXPECT_EQ(viz::hue_value_to_rgb8(240.0, 1.0), (viz::Rgb8{0, 0, 255}));
    EXPECT_EQ(viz::hue_value_to_rgb8(60.0, 0.5), (viz::Rgb8{128, 128, 0}));
    EXPECT_EQ(viz::hue_value_to_rgb8(30.0, 1.0), (viz::Rgb8{255, 128, 0}));
    EXPECT_EQ(viz::hue_value_to_rgb8(300.0, 2.0), (viz::Rgb8{255, 0, 255}));
    EXPECT_EQ(viz::hue_value_to_rgb8(200.0, 0.0), (viz::Rgb8{0, 0, 0}));
}

TEST(Colormap, ZeroPhaseIsOneHueAndZeroIntensityIsBlack) {
    DoubleImage intensity(4, 1), phase(4, 1);
    intensity.data = {0.0, 0.25, 0.5, 1.0};
    const auto rgb = viz::phase_colormap(intensity, phase, 1.0);
    for (int x = 0; x < 4; ++x) {
        EXPECT_EQ(rgb.at(x, 0, 1), 0);
        EXPECT_EQ(rgb.at(x, 0, 2), 0);
        EXPECT_EQ(rgb.at(x, 0, 0), static_cast<std::uint8_t>(std::lround(255 * intensity.data[static_cast<std::size_t>(x)])));
    }
}

TEST(Colormap, PhaseRampCoversTheHueWheel) {
    const int n = 180;
    DoubleImage intensity(n, 1, 1, 1.0), phase(n, 1);
    for (int x = 0; x < n; ++x) phase.at(x, 0) = kPi * x / n;
    const auto rgb = viz::phase_colormap(intensity, phase, 1.0);
    std::set<int> sectors;
    for (int x = 0; x < n; ++x) {
        const int r = rgb.at(x, 0, 0), g = rgb.at(x, 0, 1), b = rgb.at(x, 0, 2);
        EXPECT_EQ(std::max({r, g, b}), 255);
        EXPECT_EQ(std::min({r, g, b}), 0);
        sectors.insert(x * 6 / n);
    }
    EXPECT_EQ(sectors.size(), 6u);
    EXPECT_EQ(rgb.at(30, 0, 0), 255);  // 60 degrees: yellow
    EXPECT_EQ(rgb.at(30, 0, 1), 255);
    EXPECT_EQ(rgb.at(90, 0, 2), 255);  // 180 degrees: cyan
    EXPECT_EQ(rgb.at(90, 0, 1), 255);
}

TEST(Colormap, AutoScaleIsNearestRankPercentile) {
    DoubleImage im(100, 1);
    for (int i = 0; i < 100; ++i) im.data[static_cast<std::size_t>(i)] = i + 1;
    EXPECT_EQ(viz::auto_scale(im), 99.0);
    im.data[0] = NAN;
    EXPECT_EQ(viz::auto_scale(DoubleImage(3, 1)), 1.0);
    EXPECT_THROW(viz::phase_colormap(DoubleImage(2, 1), DoubleImage(3, 1)), DimensionMismatch);
}

TEST(Colormap, WritesBinaryPpm) {
    Image<std::uint8_t> rgb(2, 1, 3);
    rgb.data = {255, 0, 0, 1, 2, 3};
    const auto dir = fresh_dir("ppm");
    viz::write_ppm(rgb, dir / "a.ppm");
    EXPECT_EQ(slurp(dir / "a.ppm"), std::string("P6\n2 1\n255\n") + std::string("\xff\x00\x00\x01\x02\x03", 6));
}

TEST(Cli, ConditionReportsAndExitCodes) {
    auto [rc, out] = run_captured({"condition", "--json"});
    EXPECT_EQ(rc, cli::kOk);
    const auto j = nlohmann::json::parse(out);
    EXPECT_EQ(j["rank"], 5);
    EXPECT_NEAR(j["cond"].get<double>(), 3.99, 0.01);

    auto [rc2, out2] = run_captured({"condition", "--pairs", "0,0;45,0;90,0;135,0", "--json"});
    EXPECT_EQ(rc2, cli::kDegenerate);
    EXPECT_EQ(nlohmann::json::parse(out2)["cond"], "inf");

    EXPECT_EQ(run_captured({"condition", "--angles", "bogus"}).first, cli::kConfigError);
    EXPECT_EQ(run_captured({"condition", "--not-an-option"}).first, cli::kConfigError);
    EXPECT_EQ(run_captured({}).first, cli::kConfigError);
}

TEST(Cli, SimulateDecomposeVerifyAndVisualize) {
    const auto dir = fresh_dir("pipeline");
    const auto sim = dir / "sim";
    ASSERT_EQ(run_captured({"simulate", "--recipe", "v-groove", "--size", "32", "--seed", "2", "--out", sim.string()})
                  .first,
              cli::kOk);
    const auto files = listing(sim);
    EXPECT_EQ(files.count("manifest.json"), 1u);
    EXPECT_EQ(files.count("frame_0007.pfm"), 1u);
    EXPECT_EQ(files.count("gt_phi_r.pfm"), 1u);
    EXPECT_EQ(files.count("region.pfm"), 1u);

    const auto dec = dir / "dec";
    auto [rc, out] = run_captured({"decompose", "--manifest", (sim / "manifest.json").string(), "--out", dec.string(),
                                   "--verify-against", sim.string(), "--oracle", "--oracle-pixels", "32", "--json"});
    ASSERT_EQ(rc, cli::kOk) << out;
    const auto rep = nlohmann::json::parse(out);
    EXPECT_TRUE(rep["verify"]["pass"].get<bool>());
    EXPECT_LE(rep["oracle"]["max_abs_diff"].get<double>(), 1e-6);
    for (const char* n : {"i_u.pfm", "i_f.pfm", "i_r.pfm", "phi_f.pfm", "phi_r.pfm", "residual.pfm", "mask.pfm"}) {
        EXPECT_TRUE(fs::exists(dec / n)) << n;
    }

    const auto vis = dir / "vis";
    EXPECT_EQ(run_captured({"visualize", "--dir", dec.string(), "--out", vis.string()}).first, cli::kOk);
    EXPECT_TRUE(fs::exists(vis / "phase_forward.ppm"));
    EXPECT_TRUE(fs::exists(vis / "phase_reverse.ppm"));

    // Tampering with a ground-truth map fails verification.
    auto gt = imaging::read_pfm(sim / "gt_i_f.pfm");
    for (auto& v : gt.data) v += 0.5f;
    imaging::write_pfm(gt, sim / "gt_i_f.pfm");
    EXPECT_EQ(run_captured({"decompose", "--manifest", (sim / "manifest.json").string(), "--out", dec.string(),
                            "--verify-against", sim.string()})
                  .first,
              cli::kVerifyFailed);
}

TEST(Cli, DecomposeRejectsDegenerateAndMissingInput) {
    const auto dir = fresh_dir("degenerate");
    ASSERT_EQ(run_captured({"simulate", "--recipe", "flat-diffuse", "--size", "8", "--pairs",
                            "0,0;45,0;90,0;135,0", "--out", dir.string()})
                  .first,
              cli::kOk);
    EXPECT_EQ(run_captured({"decompose", "--manifest", (dir / "manifest.json").string(), "--out",
                            (dir / "o").string()})
                  .first,
              cli::kDegenerate);
    EXPECT_EQ(run_captured({"decompose", "--manifest", (dir / "nope.json").string()}).first, cli::kIoError);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_EQ(run_captured({"decompose", "--manifest", (dir / "bad.json").string()}).first, cli::kIoError);
}

TEST(Cli, SeparateReportsReverseInDirectColumn) {
    const auto dir = fresh_dir("separate");
    auto [rc, out] = run_captured({"separate", "--size", "64", "--out", dir.string(), "--json"});
    ASSERT_EQ(rc, cli::kOk);
    const auto rep = nlohmann::json::parse(out);
    EXPECT_GT(rep["reverse_in_direct_i_r"].get<double>(), 0.9);
    EXPECT_GT(rep["low_frequency_in_global_i_u"].get<double>(), 0.9);
    EXPECT_EQ(listing(dir).size(), 10u);
}

TEST(Cli, GraycodeComparesComponentWithRaw) {
    const auto dir = fresh_dir("graycode");
    auto [rc, out] = run_captured({"graycode", "--seed", "3", "--out", dir.string(), "--json"});
    ASSERT_EQ(rc, cli::kOk);
    const auto rep = nlohmann::json::parse(out);
    EXPECT_GT(rep["forward"]["proportion"].get<double>(), rep["raw"]["proportion"].get<double>());
    EXPECT_GT(rep["difference"].get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(dir / "cloud_forward.xyz"));
    EXPECT_TRUE(fs::exists(dir / "correspondence_raw.pfm"));
    EXPECT_EQ(run_captured({"graycode", "--component", "sideways", "--out", dir.string()}).first, cli::kConfigError);
    EXPECT_EQ(run_captured({"graycode", "--recipe", "hexagon", "--out", dir.string()}).first, cli::kConfigError);
}

TEST(Cli, DemosaicSplitsFourChannels) {
    const auto dir = fresh_dir("demosaic");
    FloatImage raw(4, 2);
    for (std::size_t i = 0; i < raw.size(); ++i) raw.data[i] = static_cast<float>(i);
    imaging::write_pfm(raw, dir / "raw.pfm");
    EXPECT_EQ(run_captured({"demosaic", "--input", (dir / "raw.pfm").string(), "--out", (dir / "o").string()}).first,
              cli::kOk);
    EXPECT_EQ(listing(dir / "o"), (std::set<std::string>{"pol_000.pfm", "pol_045.pfm", "pol_090.pfm", "pol_135.pfm"}));
    EXPECT_EQ(imaging::read_pfm(dir / "o" / "pol_090.pfm").data, (std::vector<float>{0.0f, 2.0f}));
    EXPECT_EQ(run_captured({"demosaic", "--input", (dir / "raw.pfm").string(), "--layout", "0,0,90,135", "--out",
                            (dir / "p").string()})
                  .first,
              cli::kConfigError);
}

TEST(Cli, SimulateIsDeterministic) {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    for (const auto& d : {a, b}) {
        ASSERT_EQ(run_captured({"simulate", "--recipe", "hexagon", "--size", "32", "--noise", "0.01", "--patterns",
                                "checker", "--out", d.string()})
                      .first,
                  cli::kOk);
    }
    const auto names = listing(a);
    ASSERT_EQ(names, listing(b));
    for (const auto& n : names) EXPECT_EQ(slurp(a / n), slurp(b / n)) << n;
}
