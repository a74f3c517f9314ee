#include "afp/preprocess.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace afp {

DepthMap median_filter(const DepthMap& img, int n) {
    if (n < 1 || n % 2 == 0) {
        throw std::invalid_argument("median window must be a positive odd integer, got " +
                                    std::to_string(n));
    }
    if (n > std::min(img.width(), img.height())) {
        throw std::invalid_argument("median window " + std::to_string(n) +
                                    " exceeds image size " + std::to_string(img.width()) + "x" +
                                    std::to_string(img.height()));
    }
    if (n == 1) {
        return img;
    }

    const int w = img.width();
    const int h = img.height();
    const int radius = n / 2;
    const std::size_t mid = static_cast<std::size_t>(n) * n / 2;
    Raster<double> out(w, h);
    std::vector<double> window(static_cast<std::size_t>(n) * n);

    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            std::size_t k = 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    window[k++] = img.clamped(col + dx, row + dy);
                }
            }
            std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid),
                             window.end());
            out.at(col, row) = window[mid];
        }
    }
    return DepthMap(std::move(out));
}

}  // namespace afp
