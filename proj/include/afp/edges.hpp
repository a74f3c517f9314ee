#pragma once

#include "afp/raster.hpp"

namespace afp {

/// Canny settings. Hysteresis thresholds are fractions of an anchor equal to the
/// 90th percentile of the nonzero gradient magnitudes of the smoothed image.
struct CannyParams {
    double sigma = 1.0;
    double low_ratio = 0.3;
    double high_ratio = 0.5;

    void validate() const;
};

inline constexpr int kDefaultStructuringLength = 5;

/// Gaussian smoothing, Sobel gradient, 4-direction non-maximum suppression and
/// 8-connected hysteresis. Requires an image of at least 3x3.
BinaryMask canny(const DepthMap& img, const CannyParams& params = {});

/// Truncated (radius ceil(3 sigma)) separable Gaussian blur with edge replication.
Raster<double> gaussian_blur(const Raster<double>& img, double sigma);

/// Erosion / dilation by a 1 x len horizontal line anchored at len / 2.
/// Pixels outside the image count as unset for erosion.
BinaryMask erode_horizontal(const BinaryMask& mask, int len);
BinaryMask dilate_horizontal(const BinaryMask& mask, int len);

/// Morphological opening by a 1 x se_len horizontal line: keeps exactly the
/// horizontal runs of length >= se_len.
BinaryMask open_horizontal(const BinaryMask& mask, int se_len = kDefaultStructuringLength);

/// Vertical Sobel response, positive where intensity increases with row index
/// (dark above, bright below). Borders use edge replication.
SignedGradientMap sobel_vertical(const DepthMap& img);
SignedGradientMap sobel_vertical(const Raster<double>& img);
SignedGradientMap sobel_horizontal(const Raster<double>& img);

/// Labels each edge pixel upper (positive gradient) or lower (negative). Edge
/// pixels with zero gradient take the sign of their 3x3 gradient sum, or are
/// dropped when that sum is zero.
PolarEdgeMap classify_edges(const BinaryMask& edges, const SignedGradientMap& gradient);

}  // namespace afp
