#include "afp/render.hpp"

#include <array>
#include <cmath>
#include <string>

namespace afp {
namespace {

constexpr Rgb kUpper{0, 255, 0};
constexpr Rgb kLower{255, 0, 0};

constexpr std::array<Rgb, 6> kUpperPalette{{
    {0, 255, 0}, {0, 200, 255}, {255, 255, 0}, {0, 255, 160}, {120, 160, 255}, {200, 255, 120},
}};
constexpr std::array<Rgb, 6> kLowerPalette{{
    {255, 0, 0}, {255, 0, 255}, {255, 140, 0}, {255, 90, 140}, {180, 60, 255}, {255, 200, 160},
}};

// 3x5 glyphs, one row per 3-bit group, most significant bit leftmost.
constexpr std::array<std::array<std::uint8_t, 5>, 10> kDigits{{
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
}};

void paint_groups(RgbImage& img, const std::vector<EdgeRegion>& regions,
                  const std::vector<std::vector<std::size_t>>& groups,
                  const std::array<Rgb, 6>& palette, bool label_above) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const Rgb color = palette[g % palette.size()];
        for (std::size_t idx : groups[g]) {
            for (const Pixel& p : regions[idx].pixels) img.at(p.col, p.row) = color;
        }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const Pixel anchor = regions[groups[g].front()].leftmost;
        // Upper edges are labelled above the line and lower edges below it, so the
        // two facing boundaries of a gap do not stamp over each other.
        int row = label_above ? anchor.row - 7 : anchor.row + 3;
        if (row < 0) row = anchor.row + 3;
        if (row + 5 > img.height()) row = anchor.row - 7;
        draw_number(img, {anchor.col, row}, static_cast<int>(g + 1), palette[g % palette.size()]);
    }
}

}  // namespace

void draw_number(RgbImage& image, Pixel origin, int value, Rgb color) {
    const std::string text = std::to_string(value);
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto& glyph = kDigits[static_cast<std::size_t>(text[i] - '0')];
        const int x0 = origin.col + static_cast<int>(i) * 4;
        for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 3; ++c) {
                if (!(glyph[static_cast<std::size_t>(r)] & (4 >> c))) continue;
                if (image.contains(x0 + c, origin.row + r)) image.at(x0 + c, origin.row + r) = color;
            }
        }
    }
}

RgbImage render_polarity(const PolarEdgeMap& edges) {
    RgbImage img(edges.width(), edges.height());
    for (int r = 0; r < edges.height(); ++r) {
        for (int c = 0; c < edges.width(); ++c) {
            if (edges.at(c, r) == Polarity::upper) img.at(c, r) = kUpper;
            if (edges.at(c, r) == Polarity::lower) img.at(c, r) = kLower;
        }
    }
    return img;
}

RgbImage render_groups(int width, int height, const std::vector<EdgeRegion>& upper_regions,
                       const std::vector<std::vector<std::size_t>>& upper_groups,
                       const std::vector<EdgeRegion>& lower_regions,
                       const std::vector<std::vector<std::size_t>>& lower_groups) {
    RgbImage img(width, height);
    paint_groups(img, upper_regions, upper_groups, kUpperPalette, true);
    paint_groups(img, lower_regions, lower_groups, kLowerPalette, false);
    return img;
}

RgbImage render_boundaries(const DepthMap& base, const std::vector<TowBoundary>& boundaries) {
    RgbImage img = to_rgb(base);
    for (const auto& b : boundaries) {
        const Rgb color = b.polarity == Polarity::upper ? kUpper : kLower;
        for (int x = b.x_min; x <= b.x_max; ++x) {
            const int row = static_cast<int>(std::lround(b(x)));
            if (img.contains(x, row)) img.at(x, row) = color;
        }
    }
    return img;
}

}  // namespace afp
