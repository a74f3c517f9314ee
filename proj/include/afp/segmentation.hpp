#pragma once

#include <limits>
#include <vector>

#include "afp/raster.hpp"
#include "afp/towlines.hpp"

namespace afp {

inline constexpr double kDefaultTolerance = 1.0;

/// Two facing boundaries of neighbouring tows. Indices refer to the boundary
/// list passed to pair_boundaries.
struct TowPair {
    std::size_t upper_tow_lower_boundary = 0;  // polarity lower
    std::size_t lower_tow_upper_boundary = 0;  // polarity upper
    int x0 = 0;                                // shared domain, inclusive
    int x1 = 0;
};

struct PairingResult {
    std::vector<TowPair> pairs;      // top to bottom
    std::vector<std::size_t> unpaired;  // boundaries that take part in no pair
};

/// Pairs each tow's lower boundary with the next tow's upper boundary.
///
/// A column x supports the pair (L, U) when, among the boundaries defined at
/// x, U is the upper boundary closest to L, L is the lower boundary closest to
/// U, and there is evidence of two distinct tows: another upper boundary above
/// both, or another lower boundary below both. A pair is accepted when at least
/// half of the shared columns support it.
PairingResult pair_boundaries(const std::vector<TowBoundary>& boundaries);

struct Contribution {
    Pixel pixel;
    DefectClass cls = DefectClass::neutral;
};

/// Per-column classification between y_L (lower boundary of the upper tow) and
/// y_U (upper boundary of the lower tow), w = y_U - y_L: rows strictly between
/// are gap when w > tol, overlap when w < -tol. Rows outside [0, height) are
/// dropped.
std::vector<Contribution> segment_pair(const TowBoundary& upper_tow_lower,
                                       const TowBoundary& lower_tow_upper, int x0, int x1, double tol,
                                       int height = std::numeric_limits<int>::max());

struct AssembledMask {
    DefectMask mask;
    std::size_t conflict_pixels = 0;  // claimed as gap and as overlap; resolved to overlap
};

AssembledMask assemble_mask(const std::vector<std::vector<Contribution>>& contributions, int width,
                            int height);

struct DefectRegion {
    DefectClass cls = DefectClass::neutral;
    std::vector<Pixel> pixels;
    BoundingBox bbox;
    std::size_t area = 0;
    int max_width = 0;  // max over columns of the region's row extent in that column
};

/// 8-connected regions per defect class, gaps first, each in raster discovery order.
std::vector<DefectRegion> extract_regions(const DefectMask& mask);

}  // namespace afp
