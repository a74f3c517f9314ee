#pragma once

#include "afp/raster.hpp"

namespace afp {

inline constexpr int kDefaultMedianWindow = 3;

/// n x n median with edge replication; output has the input's dimensions.
/// Throws std::invalid_argument for even n, n < 1, or n larger than the image.
DepthMap median_filter(const DepthMap& img, int n = kDefaultMedianWindow);

}  // namespace afp
