#include "polarsep/pfm.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "polarsep/errors.hpp"

namespace polarsep::imaging {

namespace {

std::string next_token(std::istream& in) {
    std::string tok;
    int ch = in.get();
    while (ch != EOF && std::isspace(ch)) ch = in.get();
    while (ch != EOF && !std::isspace(ch)) {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    }
    // the single whitespace byte after the scale token ends the header
    return tok;
}

long parse_positive(const std::string& tok, const char* what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v <= 0) throw FormatError("");
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("pfm: bad ") + what + " '" + tok + "'");
    }
}

std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

}  // namespace

FloatImage read_pfm(std::istream& in) {
    const std::string magic = next_token(in);
    int channels = 0;
    if (magic == "Pf") {
        channels = 1;
    } else if (magic == "PF") {
        channels = 3;
    } else {
        throw FormatError("pfm: unsupported magic '" + magic + "'");
    }
    const long w = parse_positive(next_token(in), "width");
    const long h = parse_positive(next_token(in), "height");
    const std::string scale_tok = next_token(in);
    double scale = 0.0;
    try {
        std::size_t used = 0;
        scale = std::stod(scale_tok, &used);
        if (used != scale_tok.size()) throw FormatError("");
    } catch (const std::exception&) {
        throw FormatError("pfm: bad scale '" + scale_tok + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("pfm: scale must be finite and nonzero");
    if (w > std::numeric_limits<int>::max() / 4 || h > std::numeric_limits<int>::max() / 4) {
        throw FormatError("pfm: dimensions too large");
    }

    const bool file_little = scale < 0.0;
    const bool host_little = std::endian::native == std::endian::little;

    FloatImage img(static_cast<int>(w), static_cast<int>(h), channels);
    const std::size_t row_len = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
    std::vector<std::uint32_t> row(row_len);
    for (long y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_len * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != row_len * sizeof(float)) {
            throw FormatError("pfm: truncated payload");
        }
        float* dst = img.data.data() + static_cast<std::size_t>(y) * row_len;
        for (std::size_t i = 0; i < row_len; ++i) {
            const std::uint32_t bits = file_little == host_little ? row[i] : byteswap32(row[i]);
            std::memcpy(dst + i, &bits, sizeof(float));
        }
    }
    return img;
}

FloatImage read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    return read_pfm(in);
}

void write_pfm(const FloatImage& image, std::ostream& out) {
    if (image.channels != 1 && image.channels != 3) {
        throw FormatError("pfm: only 1 or 3 channels are supported");
    }
    if (image.width <= 0 || image.height <= 0 || image.size() != image.pixel_count() * static_cast<std::size_t>(image.channels)) {
        throw FormatError("pfm: image has inconsistent dimensions");
    }
    out << (image.channels == 1 ? "Pf" : "PF") << '\n' << image.width << ' ' << image.height << '\n' << "-1.0\n";

    const bool host_little = std::endian::native == std::endian::little;
    const std::size_t row_len = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.channels);
    std::vector<std::uint32_t> row(row_len);
    for (int y = image.height - 1; y >= 0; --y) {
        const float* src = image.data.data() + static_cast<std::size_t>(y) * row_len;
        for (std::size_t i = 0; i < row_len; ++i) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, src + i, sizeof(float));
            row[i] = host_little ? bits : byteswap32(bits);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_len * sizeof(float)));
    }
    if (!out) throw std::ios_base::failure("pfm: write failed");
}

void write_pfm(const FloatImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot create " + path.string());
    write_pfm(image, out);
}

}  // namespace polarsep::imaging
