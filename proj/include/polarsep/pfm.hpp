#pragma once

#include <filesystem>
#include <iosfwd>

#include "polarsep/image.hpp"

namespace polarsep::imaging {

/// Portable float map reader. Accepts "Pf" (1 channel) and "PF" (3 channels)
/// in either byte order; rows are stored bottom-up in the file and returned
/// top-down. Throws FormatError on malformed or truncated input.
FloatImage read_pfm(std::istream& in);
FloatImage read_pfm(const std::filesystem::path& path);

/// Writes little-endian (scale -1.0). Round trips every float bit.
void write_pfm(const FloatImage& image, std::ostream& out);
void write_pfm(const FloatImage& image, const std::filesystem::path& path);

}  // namespace polarsep::imaging
