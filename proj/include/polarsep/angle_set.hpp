#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polarsep/polar_model.hpp"

namespace polarsep {

/// Ordered measurement sequence of polarizer pairs.
///
/// Pairs are compared after canonicalization; a repeated pair is rejected
/// unless the set is built with `allow_repeats` (repeated captures for noise
/// averaging).
class AngleSet {
public:
    AngleSet() = default;
    explicit AngleSet(std::vector<PolarizerPair> pairs, bool allow_repeats = false);

    static AngleSet from_degrees(const std::vector<std::array<double, 2>>& pairs_deg,
                                 bool allow_repeats = false);

    const std::vector<PolarizerPair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }
    bool allows_repeats() const noexcept { return allow_repeats_; }
    const PolarizerPair& operator[](std::size_t i) const { return pairs_[i]; }

    /// Distinct light-side angles in first-seen order.
    std::vector<double> light_angles() const;

    /// True when the set is a full product of camera angles {0,45,90,135} deg
    /// with one or more light angles, i.e. what a mosaic polarization camera
    /// captures.
    bool is_polarization_camera_layout() const;

private:
    std::vector<PolarizerPair> pairs_;
    bool allow_repeats_ = false;
};

/// The five-pair sequence {(0,0),(45,45),(0,45),(45,0),(90,0)} deg.
AngleSet preset_min5();
/// Camera {0,45,90,135} x light {0,45} deg.
AngleSet preset_pol_cam_2();
/// Camera {0,45,90,135} x light {0,45,90,135} deg.
AngleSet preset_pol_cam_4();

/// Looks up `min-5`, `pol-cam-2` or `pol-cam-4`.
std::optional<AngleSet> preset_by_name(std::string_view name);

/// Parses "c,l;c,l;..." with angles in degrees. Throws std::invalid_argument.
AngleSet parse_angle_list(std::string_view text, bool allow_repeats = false);

}  // namespace polarsep
