#include "colormap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarsep/errors.hpp"

namespace polarsep::viz {

Rgb8 hue_value_to_rgb8(double hue_deg, double value) {
    const double v = std::isfinite(value) ? std::clamp(value, 0.0, 1.0) : 0.0;
    double h = std::isfinite(hue_deg) ? std::fmod(hue_deg, 360.0) : 0.0;
    if (h < 0.0) h += 360.0;
    const double h6 = h / 60.0;
    const int sector = std::min(static_cast<int>(std::floor(h6)), 5);
    const double f = h6 - sector;
    const double q = v * (1.0 - f);
    const double t = v * f;
    double r = 0, g = 0, b = 0;
    switch (sector) {
        case 0: r = v, g = t, b = 0; break;
        case 1: r = q, g = v, b = 0; break;
        case 2: r = 0, g = v, b = t; break;
        case 3: r = 0, g = q, b = v; break;
        case 4: r = t, g = 0, b = v; break;
        default: r = v, g = 0, b = q; break;
    }
    const auto q8 = [](double c) { return static_cast<std::uint8_t>(std::lround(255.0 * c)); };
    return {q8(r), q8(g), q8(b)};
}

double auto_scale(const DoubleImage& intensity, double percentile) {
    std::vector<double> finite;
    finite.reserve(intensity.size());
    for (double v : intensity.data) {
        if (std::isfinite(v)) finite.push_back(v);
    }
    if (finite.empty()) return 1.0;
    std::sort(finite.begin(), finite.end());
    const auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(finite.size())));
    const double s = finite[std::clamp<std::size_t>(rank, 1, finite.size()) - 1];
    return s > 0.0 ? s : 1.0;
}

Image<std::uint8_t> phase_colormap(const DoubleImage& intensity, const DoubleImage& phase, double scale) {
    if (!intensity.same_shape(phase) || intensity.channels != 1) {
        throw DimensionMismatch("intensity and phase images must be single-channel and equal in size");
    }
    const double s = scale > 0.0 ? scale : auto_scale(intensity);
    Image<std::uint8_t> out(intensity.width, intensity.height, 3);
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        const double hue = 360.0 * phase.data[i] / kPi;
        const auto rgb = hue_value_to_rgb8(hue, intensity.data[i] / s);
        for (int c = 0; c < 3; ++c) out.data[3 * i + static_cast<std::size_t>(c)] = rgb[static_cast<std::size_t>(c)];
    }
    return out;
}

void write_ppm(const Image<std::uint8_t>& rgb, const std::filesystem::path& path) {
    if (rgb.channels != 3) throw DimensionMismatch("PPM output needs three channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
    out << "P6\n" << rgb.width << ' ' << rgb.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data.data()), static_cast<std::streamsize>(rgb.data.size()));
    if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

}  // namespace polarsep::viz
