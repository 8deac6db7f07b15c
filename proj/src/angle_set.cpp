#include "polarsep/angle_set.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace polarsep {

namespace {

constexpr double kAngleEps = 1e-12;

bool same_angle(double a, double b) {
    const double d = std::abs(a - b);
    return d < kAngleEps || std::abs(d - kPi) < kAngleEps;
}

bool same_pair(const PolarizerPair& a, const PolarizerPair& b) {
    return same_angle(a.theta_c(), b.theta_c()) && same_angle(a.theta_l(), b.theta_l());
}

double parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw std::invalid_argument("bad angle value '" + std::string(s) + "'");
    }
    return v;
}

AngleSet product(const std::vector<double>& light_deg) {
    std::vector<PolarizerPair> pairs;
    for (double l : light_deg) {
        for (double c : {0.0, 45.0, 90.0, 135.0}) pairs.push_back(PolarizerPair::from_degrees(c, l));
    }
    return AngleSet(std::move(pairs));
}

}  // namespace

AngleSet::AngleSet(std::vector<PolarizerPair> pairs, bool allow_repeats)
    : pairs_(std::move(pairs)), allow_repeats_(allow_repeats) {
    if (allow_repeats_) return;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (same_pair(pairs_[i], pairs_[j])) {
                throw std::invalid_argument("duplicate polarizer pair at index " + std::to_string(i));
            }
        }
    }
}

AngleSet AngleSet::from_degrees(const std::vector<std::array<double, 2>>& pairs_deg, bool allow_repeats) {
    std::vector<PolarizerPair> pairs;
    pairs.reserve(pairs_deg.size());
    for (const auto& p : pairs_deg) pairs.push_back(PolarizerPair::from_degrees(p[0], p[1]));
    return AngleSet(std::move(pairs), allow_repeats);
}

std::vector<double> AngleSet::light_angles() const {
    std::vector<double> out;
    for (const auto& p : pairs_) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](double l) { return same_angle(l, p.theta_l()); });
        if (!seen) out.push_back(p.theta_l());
    }
    return out;
}

bool AngleSet::is_polarization_camera_layout() const {
    const auto lights = light_angles();
    if (lights.empty() || pairs_.size() != 4 * lights.size()) return false;
    for (double l : lights) {
        for (double c_deg : {0.0, 45.0, 90.0, 135.0}) {
            const PolarizerPair want(degrees_to_radians(c_deg), l);
            const bool found = std::any_of(pairs_.begin(), pairs_.end(),
                                           [&](const PolarizerPair& p) { return same_pair(p, want); });
            if (!found) return false;
        }
    }
    return true;
}

AngleSet preset_min5() {
    return AngleSet::from_degrees({{0, 0}, {45, 45}, {0, 45}, {45, 0}, {90, 0}});
}

AngleSet preset_pol_cam_2() { return product({0.0, 45.0}); }

AngleSet preset_pol_cam_4() { return product({0.0, 45.0, 90.0, 135.0}); }

std::optional<AngleSet> preset_by_name(std::string_view name) {
    if (name == "min-5") return preset_min5();
    if (name == "pol-cam-2") return preset_pol_cam_2();
    if (name == "pol-cam-4") return preset_pol_cam_4();
    return std::nullopt;
}

AngleSet parse_angle_list(std::string_view text, bool allow_repeats) {
    std::vector<std::array<double, 2>> pairs;
    while (!text.empty()) {
        const auto semi = text.find(';');
        const auto item = text.substr(0, semi);
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
        if (item.find_first_not_of(' ') == std::string_view::npos) continue;
        const auto comma = item.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument("angle pair '" + std::string(item) + "' is not of the form c,l");
        }
        pairs.push_back({parse_number(item.substr(0, comma)), parse_number(item.substr(comma + 1))});
    }
    if (pairs.empty()) throw std::invalid_argument("empty angle list");
    return AngleSet::from_degrees(pairs, allow_repeats);
}

}  // namespace polarsep
