#pragma once

#include <cstddef>
#include <vector>

#include "polarsep/polar_model.hpp"

namespace polarsep {

/// Row-major interleaved image. Row 0 is the top row.
template <class T>
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int c = 1, T fill = T{})
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels) +
               static_cast<std::size_t>(c);
    }
    T& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

    template <class U>
    bool same_shape(const Image<U>& other) const {
        return width == other.width && height == other.height && channels == other.channels;
    }
};

using FloatImage = Image<float>;
/// Double-precision working image used by the solver and synthesizer.
using DoubleImage = Image<double>;

DoubleImage to_double_image(const FloatImage& image);
FloatImage to_float_image(const DoubleImage& plane);

/// Co-registered frames, each bound to the polarizer pair it was captured at.
struct ImageStack {
    std::vector<DoubleImage> frames;
    std::vector<PolarizerPair> pairs;

    std::size_t size() const { return frames.size(); }
    /// Throws DimensionMismatch when frames disagree in shape or count.
    void check_consistent() const;
};

}  // namespace polarsep
