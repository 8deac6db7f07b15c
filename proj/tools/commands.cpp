#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colormap.hpp"
#include "json.hpp"
#include "polarsep/angle_set.hpp"
#include "polarsep/decompose.hpp"
#include "polarsep/design_matrix.hpp"
#include "polarsep/errors.hpp"
#include "polarsep/graycode_pipeline.hpp"
#include "polarsep/manifest.hpp"
#include "polarsep/oracle.hpp"
#include "polarsep/pfm.hpp"
#include "polarsep/polarization_mosaic.hpp"
#include "polarsep/render.hpp"
#include "polarsep/scene.hpp"
#include "polarsep/separation.hpp"

namespace polarsep::cli {

namespace fs = std::filesystem;
using nlohmann::json;
namespace sl = structured_light;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("POLARSEP_OUT");
    return env != nullptr && *env != '\0' ? env : "polarsep_out";
}

// Formats a double for human-readable reports with enough digits to be useful
// and no locale dependence.
std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void emit(const json& report, bool as_json, const std::vector<std::string>& lines) {
    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& l : lines) std::cout << l << "\n";
    }
}

void write_image(const DoubleImage& im, const fs::path& path) { imaging::write_pfm(to_float_image(im), path); }

DoubleImage read_image(const fs::path& path) { return to_double_image(imaging::read_pfm(path)); }

AngleSet resolve_angles(const std::string& preset, const std::string& pairs) {
    if (!pairs.empty()) return parse_angle_list(pairs);
    if (auto set = preset_by_name(preset)) return *set;
    throw std::invalid_argument("unknown angle preset '" + preset + "' (expected min-5, pol-cam-2 or pol-cam-4)");
}

json report_json(const AngleSetReport& r) {
    return {{"measurements", r.measurements},
            {"rank", r.rank},
            {"cond", std::isfinite(r.cond) ? json(r.cond) : json("inf")},
            {"minimal", r.minimal},
            {"polarization_camera_layout", r.polarization_camera_layout},
            {"light_angles", r.light_angle_count},
            {"summary", r.summary}};
}

std::vector<std::string> report_lines(const AngleSetReport& r) {
    return {"measurements: " + std::to_string(r.measurements), "rank: " + std::to_string(r.rank),
            "cond: " + (std::isfinite(r.cond) ? fmt(r.cond) : std::string("inf")),
            std::string("minimal: ") + (r.minimal ? "true" : "false"), "angle set: " + r.summary};
}

json rig_json(const sl::RigCalibration& r) {
    return {{"focal_px", r.focal_px}, {"cx", r.cx}, {"cy", r.cy}, {"projector_cx", r.projector_cx},
            {"baseline_mm", r.baseline_mm}};
}

sl::RigCalibration rig_from_json(const json& j) {
    sl::RigCalibration r;
    r.focal_px = j.at("focal_px").get<double>();
    r.cx = j.at("cx").get<double>();
    r.cy = j.at("cy").get<double>();
    r.projector_cx = j.at("projector_cx").get<double>();
    r.baseline_mm = j.at("baseline_mm").get<double>();
    r.validate();
    return r;
}

json planes_json(const std::vector<sl::Plane3D>& planes) {
    json arr = json::array();
    for (const auto& p : planes) arr.push_back({p.normal.x(), p.normal.y(), p.normal.z(), p.offset});
    return arr;
}

std::vector<sl::Plane3D> planes_from_json(const json& j) {
    std::vector<sl::Plane3D> out;
    for (const auto& p : j) {
        const auto v = p.get<std::vector<double>>();
        if (v.size() != 4) throw FormatError("plane entries must be [nx, ny, nz, offset]");
        sl::Plane3D plane = sl::Plane3D::through(Eigen::Vector3d::Zero(), Eigen::Vector3d(v[0], v[1], v[2]));
        plane.offset = v[3] / Eigen::Vector3d(v[0], v[1], v[2]).norm();
        out.push_back(plane);
    }
    return out;
}

Image<int> labels_from_image(const DoubleImage& im) {
    Image<int> out(im.width, im.height, 1, -1);
    for (std::size_t i = 0; i < im.pixel_count(); ++i) out.data[i] = static_cast<int>(std::lround(im.data[i]));
    return out;
}

DoubleImage labels_to_image(const Image<int>& labels) {
    DoubleImage out(labels.width, labels.height);
    for (std::size_t i = 0; i < labels.size(); ++i) out.data[i] = labels.data[i];
    return out;
}

synthetic::SceneRecipe make_recipe(const std::string& name, const std::string& recipe_file, int size) {
    if (!recipe_file.empty()) {
        std::ifstream in(recipe_file);
        if (!in) throw std::ios_base::failure("cannot open recipe " + recipe_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("recipe is not valid JSON: ") + e.what());
        }
        return synthetic::recipe_from_json(j);
    }
    if (size < 1) throw std::invalid_argument("--size must be positive");
    synthetic::SceneRecipe r;
    r.name = name;
    r.width = size;
    r.height = size;
    return r;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string recipe = "v-groove";
    std::string recipe_file;
    int size = 64;
    std::string angles = "pol-cam-2";
    std::string pairs;
    std::uint64_t seed = 1;
    double noise = 0.0;
    std::string patterns = "none";
    int period = 8;
    int phases = 2;
    std::vector<double> exposures{1.0};
    double saturation = std::numeric_limits<double>::infinity();
    std::string out;
    bool as_json = false;
};

int cmd_simulate(const SimulateOptions& o) {
    const auto recipe = make_recipe(o.recipe, o.recipe_file, o.size);
    const AngleSet angles = resolve_angles(o.angles, o.pairs);
    const synthetic::NoiseSpec noise{o.noise, o.seed};
    noise.validate();
    if (o.patterns != "none" && o.patterns != "graycode" && o.patterns != "checker") {
        throw std::invalid_argument("--patterns must be none, graycode or checker");
    }
    if (o.exposures.empty()) throw std::invalid_argument("at least one exposure is required");
    for (double t : o.exposures) {
        if (!(t > 0.0)) throw std::invalid_argument("exposures must be positive");
    }
    if (!(o.saturation > 0.0)) throw std::invalid_argument("--saturation must be positive");

    const auto scene = synthetic::generate_scene(recipe, o.seed);

    struct Group {
        std::optional<std::string> id;
        imaging::FrameRole role;
        ImageStack stack;
    };
    std::vector<Group> groups;
    groups.push_back({std::nullopt, imaging::FrameRole::regular, synthetic::render_observations(scene, angles, noise)});

    imaging::CaptureManifest manifest;
    manifest.saturation_level = o.saturation;
    auto& attr = manifest.attributes;
    attr["scene"] = synthetic::recipe_to_json(recipe);
    attr["seed"] = o.seed;
    attr["noise_sigma"] = o.noise;
    attr["projector"] = {{"width", scene.projector_width}, {"height", scene.projector_height}};

    if (o.patterns == "graycode") {
        auto capture = sl::simulate_graycode(scene, angles, {o.noise, o.seed + 1});
        json bits = json::array();
        for (auto& b : capture.bits) {
            const std::string stem = "gray_b" + std::to_string(b.bit);
            bits.push_back({{"bit", b.bit}, {"pattern", stem + "_pos"}, {"inverse", stem + "_neg"}});
            groups.push_back({stem + "_pos", imaging::FrameRole::graycode, std::move(b.pattern)});
            groups.push_back({stem + "_neg", imaging::FrameRole::graycode, std::move(b.inverse)});
        }
        attr["graycode"] = {{"n_bits", capture.n_bits}, {"bits", bits}};
    } else if (o.patterns == "checker") {
        const separation::CheckerSpec spec{o.period, o.phases};
        auto pats = separation::checker_patterns(scene.projector_width, scene.projector_height, spec);
        auto stacks = synthetic::render_patterned(scene, angles, pats, {o.noise, o.seed + 1});
        json ids = json::array();
        for (std::size_t k = 0; k < stacks.size(); ++k) {
            const std::string id = "checker_" + std::to_string(k);
            ids.push_back(id);
            groups.push_back({id, imaging::FrameRole::checker, std::move(stacks[k])});
        }
        attr["checker"] = {{"period", o.period}, {"phases", o.phases}, {"patterns", ids}};
    }

    const fs::path out = o.out;
    fs::create_directories(out);
    std::size_t counter = 0;
    for (const auto& g : groups) {
        for (std::size_t k = 0; k < g.stack.size(); ++k) {
            for (double t : o.exposures) {
                char name[32];
                std::snprintf(name, sizeof name, "frame_%04zu.pfm", counter++);
                DoubleImage frame = g.stack.frames[k];
                for (auto& v : frame.data) v = std::min(v * t, o.saturation);
                write_image(frame, out / name);
                imaging::FrameRecord rec;
                rec.file = name;
                rec.theta_c_deg = radians_to_degrees(g.stack.pairs[k].theta_c());
                rec.theta_l_deg = radians_to_degrees(g.stack.pairs[k].theta_l());
                rec.exposure_s = t;
                rec.pattern_id = g.id;
                rec.role = g.role;
                manifest.frames.push_back(rec);
            }
        }
    }

    DoubleImage gt_iu(scene.width, scene.height), gt_if(scene.width, scene.height), gt_pf(scene.width, scene.height),
        gt_ir(scene.width, scene.height), gt_pr(scene.width, scene.height);
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            const auto p = scene.params_at(x, y);
            gt_iu.at(x, y) = p.i_u;
            gt_if.at(x, y) = p.i_f;
            gt_pf.at(x, y) = p.phi_f;
            gt_ir.at(x, y) = p.i_r;
            gt_pr.at(x, y) = p.phi_r;
        }
    }
    write_image(gt_iu, out / "gt_i_u.pfm");
    write_image(gt_if, out / "gt_i_f.pfm");
    write_image(gt_pf, out / "gt_phi_f.pfm");
    write_image(gt_ir, out / "gt_i_r.pfm");
    write_image(gt_pr, out / "gt_phi_r.pfm");
    if (scene.rig) attr["rig"] = rig_json(*scene.rig);
    if (!scene.planes.empty()) {
        attr["planes"] = planes_json(scene.planes);
        attr["region_file"] = "region.pfm";
        write_image(labels_to_image(scene.region), out / "region.pfm");
    }
    imaging::write_manifest(manifest, out / "manifest.json");

    const json report{{"frames", manifest.frames.size()}, {"out", out.generic_string()}, {"recipe", recipe.name}};
    emit(report, o.as_json,
         {"recipe: " + recipe.name, "frames: " + std::to_string(manifest.frames.size()), "out: " + out.generic_string()});
    return kOk;
}

// --------------------------------------------------------------- decompose

struct DecomposeOptions {
    std::string manifest;
    std::string out;
    std::string verify_against;
    double tol = 1e-5;
    bool oracle = false;
    int oracle_pixels = 256;
    bool as_json = false;
};

imaging::PatternStack regular_stack(std::vector<imaging::PatternStack>& stacks) {
    for (auto& s : stacks) {
        if (s.pattern_id.empty()) return std::move(s);
    }
    throw std::invalid_argument("manifest has no unpatterned frames");
}

double phase_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

int cmd_decompose(const DecomposeOptions& o) {
    const fs::path manifest_path = o.manifest;
    const auto manifest = imaging::read_manifest(manifest_path);
    auto stacks = imaging::load_stacks(manifest, manifest_path.parent_path());
    const auto regular = regular_stack(stacks);
    const ImageStack& stack = regular.stack;
    const AngleSet angles(stack.pairs, true);
    const auto report = validate_angle_set(angles);

    json rep{{"angle_set", report_json(report)}};
    auto lines = report_lines(report);
    if (report.rank < 5) {
        emit(rep, o.as_json, lines);
        std::cerr << "error: degenerate angle set (rank " << report.rank << " < 5)\n";
        return kDegenerate;
    }

    const auto w = build_design_matrix(angles);
    const auto result = decompose_stack(stack, w);
    const fs::path out = o.out;
    fs::create_directories(out);
    write_image(result.i_u, out / "i_u.pfm");
    write_image(result.i_u_raw, out / "i_u_raw.pfm");
    write_image(result.i_f, out / "i_f.pfm");
    write_image(result.i_r, out / "i_r.pfm");
    write_image(result.phi_f, out / "phi_f.pfm");
    write_image(result.phi_r, out / "phi_r.pfm");
    write_image(result.residual_rms, out / "residual.pfm");
    DoubleImage mask(result.valid.width, result.valid.height, result.valid.channels);
    for (std::size_t i = 0; i < mask.size(); ++i) mask.data[i] = result.valid.data[i];
    write_image(mask, out / "mask.pfm");

    rep["invalid_pixels"] = result.invalid_count;
    rep["unphysical_pixels"] = result.unphysical_count;
    lines.push_back("invalid pixels: " + std::to_string(result.invalid_count));
    lines.push_back("unphysical pixels: " + std::to_string(result.unphysical_count));

    int rc = kOk;
    if (!o.verify_against.empty()) {
        const fs::path gt = o.verify_against;
        const auto gt_iu = read_image(gt / "gt_i_u.pfm"), gt_if = read_image(gt / "gt_i_f.pfm"),
                   gt_ir = read_image(gt / "gt_i_r.pfm"), gt_pf = read_image(gt / "gt_phi_f.pfm"),
                   gt_pr = read_image(gt / "gt_phi_r.pfm");
        if (!gt_iu.same_shape(result.i_u)) throw DimensionMismatch("ground truth differs in size from the stack");
        double peak = 0.0;
        for (const auto* im : {&gt_iu, &gt_if, &gt_ir}) {
            for (double v : im->data) peak = std::max(peak, std::abs(v));
        }
        const double scale = peak > 0.0 ? peak : 1.0;
        double err_i = 0.0, err_phi = 0.0;
        for (std::size_t i = 0; i < gt_iu.size(); ++i) {
            if (!result.valid.data[i]) continue;
            err_i = std::max({err_i, std::abs(result.i_u.data[i] - gt_iu.data[i]) / scale,
                              std::abs(result.i_f.data[i] - gt_if.data[i]) / scale,
                              std::abs(result.i_r.data[i] - gt_ir.data[i]) / scale});
            if (gt_if.data[i] > 1e-3 * scale) err_phi = std::max(err_phi, phase_distance(result.phi_f.data[i], gt_pf.data[i]));
            if (gt_ir.data[i] > 1e-3 * scale) err_phi = std::max(err_phi, phase_distance(result.phi_r.data[i], gt_pr.data[i]));
        }
        const bool pass = err_i <= o.tol && err_phi <= std::sqrt(o.tol);
        rep["verify"] = {{"max_intensity_error", err_i}, {"max_phase_error_rad", err_phi}, {"tol", o.tol}, {"pass", pass}};
        lines.push_back("verify: max intensity error " + fmt(err_i) + " (relative to peak), max phase error " +
                        fmt(err_phi) + " rad -> " + (pass ? "PASS" : "FAIL"));
        if (!pass) rc = kVerifyFailed;
    }

    if (o.oracle) {
        if (o.oracle_pixels < 1) throw std::invalid_argument("--oracle-pixels must be positive");
        const std::size_t total = result.i_u.size();
        const std::size_t stride = std::max<std::size_t>(1, (total + static_cast<std::size_t>(o.oracle_pixels) - 1) /
                                                                 static_cast<std::size_t>(o.oracle_pixels));
        std::vector<double> samples(stack.size());
        double max_diff = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
        std::size_t checked = 0;
        for (std::size_t i = 0; i < total; i += stride) {
            for (std::size_t k = 0; k < stack.size(); ++k) samples[k] = stack.frames[k].data[i];
            const auto x = solve_linear(w, samples);
            if (!x) continue;
            const auto fit = brute_force_fit(samples, angles);
            ComponentParams p = fit.params;
            p.i_u = fit.i_u_raw;
            const auto xo = linearize(p);
            for (std::size_t j = 0; j < 5; ++j) max_diff = std::max(max_diff, std::abs(xo.x[j] - x->x[j]));
            worst_excess = std::max(worst_excess, residual_sum_squares(w, *x, samples) - fit.residual);
            ++checked;
        }
        rep["oracle"] = {{"pixels", checked}, {"max_abs_diff", max_diff}, {"closed_form_residual_excess", worst_excess}};
        lines.push_back("oracle: " + std::to_string(checked) + " pixels, closed-form vs brute-force max |diff| " +
                        fmt(max_diff, 3) + ", closed-form residual minus oracle residual <= " + fmt(worst_excess, 3));
    }
    emit(rep, o.as_json, lines);
    return rc;
}

// --------------------------------------------------------------- condition

int cmd_condition(const std::string& preset, const std::string& pairs, bool as_json) {
    const AngleSet angles = resolve_angles(preset, pairs);
    const auto report = validate_angle_set(angles);
    emit(report_json(report), as_json, report_lines(report));
    return report.rank < 5 ? kDegenerate : kOk;
}

// ---------------------------------------------------------------- separate

struct SeparateOptions {
    std::string recipe = "hexagon";
    std::string recipe_file;
    int size = 64;
    std::string angles = "pol-cam-2";
    std::string pairs;
    std::uint64_t seed = 1;
    double noise = 0.0;
    int period = 8;
    int phases = 2;
    std::string manifest;
    std::string out;
    bool as_json = false;
};

double image_sum(const DoubleImage& im) {
    double s = 0.0;
    for (double v : im.data) s += v;
    return s;
}

int cmd_separate(const SeparateOptions& o) {
    separation::PatternedStack patterned;
    std::optional<synthetic::GroundTruthScene> scene;
    if (!o.manifest.empty()) {
        const fs::path path = o.manifest;
        const auto manifest = imaging::read_manifest(path);
        auto stacks = imaging::load_stacks(manifest, path.parent_path());
        for (auto& s : stacks) {
            if (s.role == imaging::FrameRole::checker) patterned.phases.push_back(std::move(s.stack));
        }
        if (manifest.attributes.contains("checker")) {
            patterned.checker.period = manifest.attributes["checker"].value("period", 8);
            patterned.checker.phases = manifest.attributes["checker"].value("phases", 2);
        } else {
            patterned.checker.phases = static_cast<int>(patterned.phases.size());
        }
    } else {
        const auto recipe = make_recipe(o.recipe, o.recipe_file, o.size);
        const AngleSet angles = resolve_angles(o.angles, o.pairs);
        scene = synthetic::generate_scene(recipe, o.seed);
        patterned.checker = {o.period, o.phases};
        const auto pats = separation::checker_patterns(scene->projector_width, scene->projector_height, patterned.checker);
        patterned.phases = synthetic::render_patterned(*scene, angles, pats, {o.noise, o.seed});
    }
    const auto angles_report = validate_angle_set(AngleSet(patterned.phases.empty() ? std::vector<PolarizerPair>{}
                                                                                     : patterned.phases.front().pairs,
                                                           true));
    if (angles_report.rank < 5) {
        emit({{"angle_set", report_json(angles_report)}}, o.as_json, report_lines(angles_report));
        return kDegenerate;
    }
    const auto grid = separation::combined_decompose(patterned);

    const fs::path out = o.out;
    fs::create_directories(out);
    const std::pair<const char*, const DecompositionResult*> cells[] = {{"direct", &grid.direct},
                                                                        {"global", &grid.global}};
    json rep{{"angle_set", report_json(angles_report)}};
    std::vector<std::string> lines{"checker period " + std::to_string(patterned.checker.period) + ", phases " +
                                   std::to_string(patterned.checker.phases)};
    for (const auto& [name, r] : cells) {
        const std::string n = name;
        write_image(r->i_u, out / (n + "_i_u.pfm"));
        write_image(r->i_f, out / (n + "_i_f.pfm"));
        write_image(r->i_r, out / (n + "_i_r.pfm"));
        write_image(r->phi_f, out / (n + "_phi_f.pfm"));
        write_image(r->phi_r, out / (n + "_phi_r.pfm"));
        const double su = image_sum(r->i_u), sf = image_sum(r->i_f), sr = image_sum(r->i_r);
        rep["energy"][n] = {{"i_u", su}, {"i_f", sf}, {"i_r", sr}};
        lines.push_back(n + ": sum I_U " + fmt(su) + ", sum I_F " + fmt(sf) + ", sum I_R " + fmt(sr));
    }
    if (scene) {
        const double injected_r = image_sum(scene->i_r), injected_g = image_sum(scene->i_u_global);
        if (injected_r > 0.0) {
            const double frac = image_sum(grid.direct.i_r) / injected_r;
            rep["reverse_in_direct_i_r"] = frac;
            lines.push_back("injected reverse energy in (direct, I_R): " + fmt(frac));
        }
        if (injected_g > 0.0) {
            const double frac = image_sum(grid.global.i_u) / injected_g;
            rep["low_frequency_in_global_i_u"] = frac;
            lines.push_back("injected low-frequency energy in (global, I_U): " + fmt(frac));
        }
    }
    emit(rep, o.as_json, lines);
    return kOk;
}

// ---------------------------------------------------------------- graycode

struct GraycodeOptions {
    std::string recipe = "v-groove";
    std::string recipe_file;
    int size = 64;
    std::string angles = "pol-cam-2";
    std::string pairs;
    std::uint64_t seed = 1;
    double noise = 0.0;
    std::string component = "forward";
    double threshold = 0.02;
    double tol_mm = 1.0;
    std::string planes = "truth";
    std::string manifest;
    std::string out;
    bool as_json = false;
};

DoubleImage correspondence_image(const sl::CorrespondenceMap& map) {
    DoubleImage im(map.width, map.height);
    for (std::size_t i = 0; i < im.size(); ++i) im.data[i] = map.column[i];
    return im;
}

// Share of pixels carrying the given light path whose decoded column equals
// the projector column that path originates from.
std::optional<double> path_agreement(const sl::CorrespondenceMap& map, const synthetic::ProjectorMap& truth,
                                     const DoubleImage& weight) {
    std::size_t hits = 0, total = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!truth[i] || !(weight.data[i] > 0.0)) continue;
        ++total;
        if (map.column[i] == truth[i]->col) ++hits;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(total);
}

int cmd_graycode(const GraycodeOptions& o) {
    const auto signal = sl::decode_signal_from_string(o.component);
    sl::ExperimentOptions eo;
    eo.threshold_fraction = o.threshold;
    eo.tol_mm = o.tol_mm;
    if (o.planes == "truth") {
        eo.planes = sl::PlaneSource::ground_truth;
    } else if (o.planes == "fitted") {
        eo.planes = sl::PlaneSource::fitted;
    } else {
        throw std::invalid_argument("--planes must be truth or fitted");
    }
    if (!(o.threshold >= 0.0)) throw std::invalid_argument("--threshold must be non-negative");

    sl::GraycodeCapture capture;
    sl::RigCalibration rig;
    sl::GrooveSpec spec;
    std::optional<synthetic::GroundTruthScene> scene;
    if (!o.manifest.empty()) {
        const fs::path path = o.manifest;
        const auto manifest = imaging::read_manifest(path);
        const auto& attr = manifest.attributes;
        if (!attr.contains("graycode") || !attr.contains("rig") || !attr.contains("planes")) {
            throw std::invalid_argument("manifest lacks graycode, rig or planes attributes");
        }
        rig = rig_from_json(attr.at("rig"));
        spec.planes = planes_from_json(attr.at("planes"));
        if (attr.contains("region_file")) {
            spec.region = labels_from_image(read_image(path.parent_path() / attr.at("region_file").get<std::string>()));
        }
        auto stacks = imaging::load_stacks(manifest, path.parent_path());
        std::map<std::string, ImageStack> by_id;
        for (auto& s : stacks) by_id[s.pattern_id] = std::move(s.stack);
        capture.n_bits = attr.at("graycode").at("n_bits").get<int>();
        for (const auto& b : attr.at("graycode").at("bits")) {
            const auto pos = by_id.find(b.at("pattern").get<std::string>());
            const auto neg = by_id.find(b.at("inverse").get<std::string>());
            if (pos == by_id.end() || neg == by_id.end()) throw std::invalid_argument("manifest misses a Gray-code stack");
            capture.bits.push_back({b.at("bit").get<int>(), pos->second, neg->second});
        }
    } else {
        const auto recipe = make_recipe(o.recipe, o.recipe_file, o.size);
        const AngleSet angles = resolve_angles(o.angles, o.pairs);
        scene = synthetic::generate_scene(recipe, o.seed);
        if (!scene->rig || scene->planes.empty()) {
            throw std::invalid_argument("recipe '" + recipe.name + "' has no scanning geometry");
        }
        rig = *scene->rig;
        spec.planes = scene->planes;
        spec.region = scene->region;
        capture = sl::simulate_graycode(*scene, angles, {o.noise, o.seed});
    }
    if (signal != sl::DecodeSignal::raw) {
        const auto report = validate_angle_set(AngleSet(capture.bits.front().pattern.pairs, true));
        if (report.rank < 5) {
            emit({{"angle_set", report_json(report)}}, o.as_json, report_lines(report));
            return kDegenerate;
        }
    }

    const auto raw = sl::run_decode(capture, sl::DecodeSignal::raw, rig, spec, eo);
    const auto comp = sl::run_decode(capture, signal, rig, spec, eo);

    const fs::path out = o.out;
    fs::create_directories(out);
    json rep;
    std::vector<std::string> lines;
    for (const auto* r : {&raw, &comp}) {
        const std::string n = sl::to_string(r->signal);
        write_image(correspondence_image(r->map), out / ("correspondence_" + n + ".pfm"));
        sl::write_xyz(r->cloud, out / ("cloud_" + n + ".xyz"));
        rep[n] = {{"proportion", r->metric.proportion}, {"points", r->metric.points},
                  {"valid_pixels", r->map.valid_count()}, {"threshold", r->threshold}};
        lines.push_back(n + ": proportion " + fmt(r->metric.proportion) + " (" + std::to_string(r->metric.within) +
                        "/" + std::to_string(r->metric.points) + " points within " + fmt(o.tol_mm) + " mm)");
        if (r->metric.warning) std::cerr << "warning: " << *r->metric.warning << "\n";
    }
    const double diff = comp.metric.proportion - raw.metric.proportion;
    rep["difference"] = diff;
    rep["component"] = sl::to_string(signal);
    lines.push_back("difference (" + sl::to_string(signal) + " - raw): " + fmt(diff));
    if (scene) {
        const auto agree = signal == sl::DecodeSignal::reverse ? path_agreement(comp.map, scene->source_map, scene->i_r)
                                                               : path_agreement(comp.map, scene->direct_map, scene->i_f);
        if (agree) {
            rep["path_agreement"] = *agree;
            lines.push_back(std::string(signal == sl::DecodeSignal::reverse ? "source" : "direct") +
                            "-map agreement of " + sl::to_string(signal) + " decode: " + fmt(*agree));
        }
    }
    emit(rep, o.as_json, lines);
    return kOk;
}

// --------------------------------------------------------------- visualize

int cmd_visualize(const std::string& intensity, const std::string& phase, const std::string& dir, double scale,
                  const std::string& out, bool as_json) {
    json rep = json::object();
    std::vector<std::string> lines;
    const auto render = [&](const fs::path& ip, const fs::path& pp, const fs::path& target) {
        const auto i = read_image(ip);
        const auto p = read_image(pp);
        const double s = scale > 0.0 ? scale : viz::auto_scale(i);
        viz::write_ppm(viz::phase_colormap(i, p, s), target);
        rep[target.filename().string()] = {{"scale", s}};
        lines.push_back(target.generic_string() + " (scale " + fmt(s) + ")");
    };
    if (!dir.empty()) {
        const fs::path d = dir;
        const fs::path target = out.empty() ? d : fs::path(out);
        fs::create_directories(target);
        render(d / "i_f.pfm", d / "phi_f.pfm", target / "phase_forward.ppm");
        render(d / "i_r.pfm", d / "phi_r.pfm", target / "phase_reverse.ppm");
    } else {
        if (intensity.empty() || phase.empty() || out.empty()) {
            throw std::invalid_argument("visualize needs --dir, or --intensity, --phase and --out");
        }
        const fs::path target = out;
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        render(intensity, phase, target);
    }
    emit(rep, as_json, lines);
    return kOk;
}

// ---------------------------------------------------------------- demosaic

int cmd_demosaic(const std::string& input, const std::vector<double>& layout, const std::string& out, bool as_json) {
    imaging::MosaicPattern pattern;
    if (!layout.empty()) {
        if (layout.size() != 4) throw std::invalid_argument("--layout takes four angles (row-major 2x2)");
        pattern.angles_deg = {{{layout[0], layout[1]}, {layout[2], layout[3]}}};
    }
    pattern.validate();
    const auto raw = imaging::read_pfm(input);
    const auto channels = imaging::demosaic_polarization(raw, pattern);
    const fs::path target = out;
    fs::create_directories(target);
    json rep = json::array();
    std::vector<std::string> lines;
    for (const auto& c : channels) {
        char name[32];
        std::snprintf(name, sizeof name, "pol_%03d.pfm", static_cast<int>(std::lround(c.angle_deg)));
        imaging::write_pfm(c.image, target / name);
        rep.push_back({{"angle_deg", c.angle_deg}, {"file", name}});
        lines.push_back(std::string(name) + " <- " + fmt(c.angle_deg) + " deg");
    }
    emit(rep, as_json, lines);
    return kOk;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Polarimetric decomposition of image stacks into unpolarized, forward and reverse components"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    const std::string out_default = default_out_dir();

    SimulateOptions sim;
    sim.out = out_default;
    auto* s = app.add_subcommand("simulate", "Render a synthetic polarimetric stack with ground truth");
    s->add_option("--recipe", sim.recipe, "flat-diffuse, v-groove, v-groove-direct or hexagon")->capture_default_str();
    s->add_option("--recipe-file", sim.recipe_file, "JSON scene recipe (overrides --recipe and --size)");
    s->add_option("--size", sim.size, "Image width and height in pixels")->capture_default_str();
    s->add_option("--angles", sim.angles, "Angle preset: min-5, pol-cam-2, pol-cam-4")->capture_default_str();
    s->add_option("--pairs", sim.pairs, "Explicit pairs \"c,l;c,l;...\" in degrees");
    s->add_option("--seed", sim.seed, "Scene and noise seed")->capture_default_str();
    s->add_option("--noise", sim.noise, "Gaussian noise sigma")->capture_default_str();
    s->add_option("--patterns", sim.patterns, "none, graycode or checker")->capture_default_str();
    s->add_option("--period", sim.period, "Checker cell size in projector pixels")->capture_default_str();
    s->add_option("--phases", sim.phases, "Number of checker shifts")->capture_default_str();
    s->add_option("--exposures", sim.exposures, "Exposure bracket in seconds")->delimiter(',');
    s->add_option("--saturation", sim.saturation, "Sensor clipping level");
    s->add_option("--out", sim.out, "Output directory")->capture_default_str();
    s->add_flag("--json", sim.as_json, "Machine-readable report");

    DecomposeOptions dec;
    dec.out = out_default;
    auto* d = app.add_subcommand("decompose", "Per-pixel least-squares decomposition of a captured stack");
    d->add_option("--manifest", dec.manifest, "Capture manifest")->required();
    d->add_option("--out", dec.out, "Output directory")->capture_default_str();
    d->add_option("--verify-against", dec.verify_against, "Directory holding gt_*.pfm ground truth");
    d->add_option("--tol", dec.tol, "Verification tolerance relative to the peak intensity")->capture_default_str();
    d->add_flag("--oracle", dec.oracle, "Compare against the brute-force fit on a pixel subsample");
    d->add_option("--oracle-pixels", dec.oracle_pixels, "Maximum pixels checked by --oracle")->capture_default_str();
    d->add_flag("--json", dec.as_json, "Machine-readable report");

    std::string cond_preset = "min-5", cond_pairs;
    bool cond_json = false;
    auto* c = app.add_subcommand("condition", "Rank and condition number of an angle set");
    c->add_option("--angles", cond_preset, "Angle preset")->capture_default_str();
    c->add_option("--pairs", cond_pairs, "Explicit pairs \"c,l;c,l;...\" in degrees");
    c->add_flag("--json", cond_json, "Machine-readable report");

    SeparateOptions sep;
    sep.out = out_default;
    auto* p = app.add_subcommand("separate", "Direct/global separation combined with polarimetric decomposition");
    p->add_option("--recipe", sep.recipe, "Scene recipe")->capture_default_str();
    p->add_option("--recipe-file", sep.recipe_file, "JSON scene recipe");
    p->add_option("--size", sep.size, "Image width and height")->capture_default_str();
    p->add_option("--angles", sep.angles, "Angle preset")->capture_default_str();
    p->add_option("--pairs", sep.pairs, "Explicit pairs in degrees");
    p->add_option("--seed", sep.seed, "Seed")->capture_default_str();
    p->add_option("--noise", sep.noise, "Gaussian noise sigma")->capture_default_str();
    p->add_option("--period", sep.period, "Checker cell size")->capture_default_str();
    p->add_option("--phases", sep.phases, "Checker shifts")->capture_default_str();
    p->add_option("--manifest", sep.manifest, "Use checker stacks from a manifest instead of simulating");
    p->add_option("--out", sep.out, "Output directory")->capture_default_str();
    p->add_flag("--json", sep.as_json, "Machine-readable report");

    GraycodeOptions gc;
    gc.out = out_default;
    auto* g = app.add_subcommand("graycode", "Gray-code scan decoded on raw intensity and on a decomposed component");
    g->add_option("--recipe", gc.recipe, "Scene recipe")->capture_default_str();
    g->add_option("--recipe-file", gc.recipe_file, "JSON scene recipe");
    g->add_option("--size", gc.size, "Image width and height")->capture_default_str();
    g->add_option("--angles", gc.angles, "Angle preset")->capture_default_str();
    g->add_option("--pairs", gc.pairs, "Explicit pairs in degrees");
    g->add_option("--seed", gc.seed, "Seed")->capture_default_str();
    g->add_option("--noise", gc.noise, "Gaussian noise sigma")->capture_default_str();
    g->add_option("--component", gc.component, "forward, reverse or raw")->capture_default_str();
    g->add_option("--threshold", gc.threshold, "Decode threshold as a fraction of the brightest sample")
        ->capture_default_str();
    g->add_option("--tol-mm", gc.tol_mm, "Plane distance tolerance in mm")->capture_default_str();
    g->add_option("--planes", gc.planes, "truth or fitted reference planes")->capture_default_str();
    g->add_option("--manifest", gc.manifest, "Use Gray-code stacks from a manifest instead of simulating");
    g->add_option("--out", gc.out, "Output directory")->capture_default_str();
    g->add_flag("--json", gc.as_json, "Machine-readable report");

    std::string vis_i, vis_p, vis_dir, vis_out;
    double vis_scale = 0.0;
    bool vis_json = false;
    auto* v = app.add_subcommand("visualize", "Hue-mapped phase images");
    v->add_option("--intensity", vis_i, "Intensity PFM (brightness)");
    v->add_option("--phase", vis_p, "Phase PFM in radians (hue)");
    v->add_option("--dir", vis_dir, "Decomposition directory; renders forward and reverse");
    v->add_option("--scale", vis_scale, "Brightness scale; 0 selects the 99th percentile")->capture_default_str();
    v->add_option("--out", vis_out, "Output PPM file, or directory with --dir");
    v->add_flag("--json", vis_json, "Machine-readable report");

    std::string dm_in, dm_out = out_default;
    std::vector<double> dm_layout;
    bool dm_json = false;
    auto* m = app.add_subcommand("demosaic", "Split a polarization-mosaic frame into four half-resolution images");
    m->add_option("--input", dm_in, "Raw mosaic PFM")->required();
    m->add_option("--layout", dm_layout, "2x2 polarizer angles row-major, degrees")->delimiter(',');
    m->add_option("--out", dm_out, "Output directory")->capture_default_str();
    m->add_flag("--json", dm_json, "Machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim);
        if (d->parsed()) return cmd_decompose(dec);
        if (c->parsed()) return cmd_condition(cond_preset, cond_pairs, cond_json);
        if (p->parsed()) return cmd_separate(sep);
        if (g->parsed()) return cmd_graycode(gc);
        if (v->parsed()) return cmd_visualize(vis_i, vis_p, vis_dir, vis_scale, vis_out, vis_json);
        if (m->parsed()) return cmd_demosaic(dm_in, dm_layout, dm_out, dm_json);
    } catch (const DegenerateAngleSet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kConfigError;
}

}  // namespace polarsep::cli
