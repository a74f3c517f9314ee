#pragma once

#include <vector>

#include "afp/image_io.hpp"
#include "afp/towlines.hpp"

namespace afp {

/// Upper edge pixels green, lower edge pixels red, everything else black.
RgbImage render_polarity(const PolarEdgeMap& edges);

/// One color per group with the group id printed next to its leftmost pixel.
/// Both polarities share the image; lower groups use a second palette.
RgbImage render_groups(int width, int height, const std::vector<EdgeRegion>& upper_regions,
                       const std::vector<std::vector<std::size_t>>& upper_groups,
                       const std::vector<EdgeRegion>& lower_regions,
                       const std::vector<std::vector<std::size_t>>& lower_groups);

/// Fitted curves sampled per column and drawn over the grayscale base.
RgbImage render_boundaries(const DepthMap& base, const std::vector<TowBoundary>& boundaries);

/// Stamps decimal digits with a 3x5 pixel font, top-left corner at `origin`.
void draw_number(RgbImage& image, Pixel origin, int value, Rgb color);

}  // namespace afp
