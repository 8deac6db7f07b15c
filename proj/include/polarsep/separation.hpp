#pragma once

#include <span>
#include <vector>

#include "polarsep/decompose.hpp"
#include "polarsep/image.hpp"

namespace polarsep::separation {

/// Checkerboard of square cells `period` pixels wide. Phase k shifts the
/// board horizontally by k * 2 * period / phases pixels, so two phases are
/// exact complements.
struct CheckerSpec {
    int period = 8;
    int phases = 2;

    /// Throws std::invalid_argument unless period >= 1, phases >= 2 and
    /// 2 * period is divisible by phases.
    void validate() const;
};

std::vector<DoubleImage> checker_patterns(int width, int height, const CheckerSpec& spec);

struct DirectGlobal {
    DoubleImage direct;
    DoubleImage global;
};

/// Per pixel over the phase images: direct = max - min, global = 2 min
/// (half the projector pixels lit). Throws std::invalid_argument with fewer
/// than two images and DimensionMismatch on differing shapes.
DirectGlobal nayar_separate(std::span<const DoubleImage> phase_images);

/// Polarimetric stacks captured under each checker phase.
struct PatternedStack {
    std::vector<ImageStack> phases;
    CheckerSpec checker;

    /// All stacks share dimensions and polarizer pairs.
    void check_consistent() const;
};

/// Direct and global polarimetric decompositions: the {direct, global} x
/// {I_U, I_F, I_R} grid plus phases.
struct SeparationGrid {
    DecompositionResult direct;
    DecompositionResult global;
};

/// Separates each polarizer frame across phases, then decomposes the direct
/// and the global stacks independently.
SeparationGrid combined_decompose(const PatternedStack& patterned);

}  // namespace polarsep::separation
