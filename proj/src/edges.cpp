#include "afp/edges.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace afp {
namespace {

// Relative tolerance for treating two gradient magnitudes as equal in NMS.
// Symmetric step profiles produce equal magnitudes on both sides of the
// transition up to rounding noise.
constexpr double kTieEpsilon = 1e-9;

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kTieEpsilon * std::max(std::abs(a), std::abs(b));
}

void require_min_size(int w, int h, const char* what) {
    if (w < 3 || h < 3) {
        throw std::invalid_argument(std::string(what) + ": image must be at least 3x3, got " +
                                    std::to_string(w) + "x" + std::to_string(h));
    }
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

struct Step {
    int dcol;
    int drow;
};

// Unit step along the gradient, quantized to 0/45/90/135 degrees and pointing
// toward increasing intensity.
Step quantized_direction(double gx, double gy) {
    constexpr double kTan22_5 = 0.41421356237309503;
    const double ax = std::abs(gx);
    const double ay = std::abs(gy);
    if (ay <= kTan22_5 * ax) {
        return {gx >= 0 ? 1 : -1, 0};
    }
    if (ax <= kTan22_5 * ay) {
        return {0, gy >= 0 ? 1 : -1};
    }
    return {gx >= 0 ? 1 : -1, gy >= 0 ? 1 : -1};
}

}  // namespace

void CannyParams::validate() const {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("canny sigma must be positive");
    }
    if (!(low_ratio > 0.0 && low_ratio < high_ratio && high_ratio <= 1.0)) {
        throw std::invalid_argument("canny thresholds must satisfy 0 < low < high <= 1");
    }
}

Raster<double> gaussian_blur(const Raster<double>& img, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("gaussian sigma must be positive");
    }
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = img.width();
    const int h = img.height();

    Raster<double> horizontal(w, h);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * img.clamped(col + k, row);
            }
            horizontal.at(col, row) = acc;
        }
    }
    Raster<double> out(w, h);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * horizontal.clamped(col, row + k);
            }
            out.at(col, row) = acc;
        }
    }
    return out;
}

SignedGradientMap sobel_vertical(const Raster<double>& img) {
    require_min_size(img.width(), img.height(), "sobel_vertical");
    SignedGradientMap out(img.width(), img.height());
    for (int row = 0; row < img.height(); ++row) {
        for (int col = 0; col < img.width(); ++col) {
            const double below = img.clamped(col - 1, row + 1) + 2.0 * img.clamped(col, row + 1) +
                                 img.clamped(col + 1, row + 1);
            const double above = img.clamped(col - 1, row - 1) + 2.0 * img.clamped(col, row - 1) +
                                 img.clamped(col + 1, row - 1);
            out.at(col, row) = below - above;
        }
    }
    return out;
}

SignedGradientMap sobel_vertical(const DepthMap& img) { return sobel_vertical(img.raster()); }

SignedGradientMap sobel_horizontal(const Raster<double>& img) {
    require_min_size(img.width(), img.height(), "sobel_horizontal");
    SignedGradientMap out(img.width(), img.height());
    for (int row = 0; row < img.height(); ++row) {
        for (int col = 0; col < img.width(); ++col) {
            const double right = img.clamped(col + 1, row - 1) + 2.0 * img.clamped(col + 1, row) +
                                 img.clamped(col + 1, row + 1);
            const double left = img.clamped(col - 1, row - 1) + 2.0 * img.clamped(col - 1, row) +
                                img.clamped(col - 1, row + 1);
            out.at(col, row) = right - left;
        }
    }
    return out;
}

BinaryMask canny(const DepthMap& img, const CannyParams& params) {
    params.validate();
    const int w = img.width();
    const int h = img.height();
    require_min_size(w, h, "canny");

    const Raster<double> smooth = gaussian_blur(img.raster(), params.sigma);
    const SignedGradientMap gx = sobel_horizontal(smooth);
    const SignedGradientMap gy = sobel_vertical(smooth);

    Raster<double> magnitude(w, h);
    std::vector<double> nonzero;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const double m = std::hypot(gx.at(col, row), gy.at(col, row));
            magnitude.at(col, row) = m;
            if (m > 0.0) nonzero.push_back(m);
        }
    }
    BinaryMask edges(w, h, 0);
    if (nonzero.empty()) {
        return edges;
    }

    // Nearest-rank 90th percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(nonzero.size())));
    const auto nth = nonzero.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(rank, 1) - 1);
    std::nth_element(nonzero.begin(), nth, nonzero.end());
    const double anchor = *nth;
    const double high = params.high_ratio * anchor;
    const double low = params.low_ratio * anchor;

    auto mag_or_zero = [&](int col, int row) {
        return magnitude.contains(col, row) ? magnitude.at(col, row) : 0.0;
    };

    // NMS. Along the gradient a pixel must be >= its predecessor and strictly
    // greater than its successor, so a plateau of two equal responses keeps
    // the pixel on the brighter side.
    Raster<double> thin(w, h, 0.0);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const double m = magnitude.at(col, row);
            if (m < low || m == 0.0) continue;
            const Step d = quantized_direction(gx.at(col, row), gy.at(col, row));
            const double behind = mag_or_zero(col - d.dcol, row - d.drow);
            const double ahead = mag_or_zero(col + d.dcol, row + d.drow);
            const bool ge_behind = m > behind || nearly_equal(m, behind);
            const bool gt_ahead = m > ahead && !nearly_equal(m, ahead);
            if (ge_behind && gt_ahead) {
                thin.at(col, row) = m;
            }
        }
    }

    std::vector<Pixel> stack;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            if (thin.at(col, row) >= high && !edges.at(col, row)) {
                edges.at(col, row) = 1;
                stack.push_back({col, row});
                while (!stack.empty()) {
                    const Pixel p = stack.back();
                    stack.pop_back();
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int c = p.col + dx;
                            const int r = p.row + dy;
                            if ((dx == 0 && dy == 0) || !edges.contains(c, r)) continue;
                            if (!edges.at(c, r) && thin.at(c, r) >= low && thin.at(c, r) > 0.0) {
                                edges.at(c, r) = 1;
                                stack.push_back({c, r});
                            }
                        }
                    }
                }
            }
        }
    }
    return edges;
}

BinaryMask erode_horizontal(const BinaryMask& mask, int len) {
    if (len < 1) throw std::invalid_argument("structuring element length must be >= 1");
    const int anchor = len / 2;
    BinaryMask out(mask.width(), mask.height(), 0);
    for (int row = 0; row < mask.height(); ++row) {
        // Length of the set run ending at each column.
        int run = 0;
        for (int col = 0; col < mask.width(); ++col) {
            run = mask.at(col, row) ? run + 1 : 0;
            if (run >= len) {
                out.at(col - (len - 1) + anchor, row) = 1;
            }
        }
    }
    return out;
}

BinaryMask dilate_horizontal(const BinaryMask& mask, int len) {
    if (len < 1) throw std::invalid_argument("structuring element length must be >= 1");
    const int anchor = len / 2;
    BinaryMask out(mask.width(), mask.height(), 0);
    for (int row = 0; row < mask.height(); ++row) {
        for (int col = 0; col < mask.width(); ++col) {
            if (!mask.at(col, row)) continue;
            const int first = std::max(0, col - anchor);
            const int last = std::min(mask.width() - 1, col - anchor + len - 1);
            for (int c = first; c <= last; ++c) out.at(c, row) = 1;
        }
    }
    return out;
}

BinaryMask open_horizontal(const BinaryMask& mask, int se_len) {
    return dilate_horizontal(erode_horizontal(mask, se_len), se_len);
}

PolarEdgeMap classify_edges(const BinaryMask& edges, const SignedGradientMap& gradient) {
    require_same_shape(edges, gradient, "classify_edges");
    PolarEdgeMap out(edges.width(), edges.height(), Polarity::none);
    for (int row = 0; row < edges.height(); ++row) {
        for (int col = 0; col < edges.width(); ++col) {
            if (!edges.at(col, row)) continue;
            double g = gradient.at(col, row);
            if (g == 0.0) {
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (gradient.contains(col + dx, row + dy)) g += gradient.at(col + dx, row + dy);
                    }
                }
            }
            if (g > 0.0) {
                out.at(col, row) = Polarity::upper;
            } else if (g < 0.0) {
                out.at(col, row) = Polarity::lower;
            }
        }
    }
    return out;
}

}  // namespace afp
