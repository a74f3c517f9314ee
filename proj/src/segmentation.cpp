#include "afp/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "afp/detail/ccl.hpp"

namespace afp {
namespace {

struct Sample {
    std::size_t index;
    double row;
};

std::size_t nearest(const std::vector<Sample>& candidates, double row) {
    std::size_t best = candidates.front().index;
    double best_dist = std::abs(candidates.front().row - row);
    for (const Sample& s : candidates) {
        const double d = std::abs(s.row - row);
        if (d < best_dist) {
            best = s.index;
            best_dist = d;
        }
    }
    return best;
}

}  // namespace

PairingResult pair_boundaries(const std::vector<TowBoundary>& boundaries) {
    PairingResult result;
    if (boundaries.empty()) return result;

    int first = boundaries.front().x_min;
    int last = boundaries.front().x_max;
    for (const auto& b : boundaries) {
        first = std::min(first, b.x_min);
        last = std::max(last, b.x_max);
    }

    std::map<std::pair<std::size_t, std::size_t>, int> support;
    std::vector<Sample> uppers, lowers;
    for (int x = first; x <= last; ++x) {
        uppers.clear();
        lowers.clear();
        for (std::size_t i = 0; i < boundaries.size(); ++i) {
            const auto& b = boundaries[i];
            if (x < b.x_min || x > b.x_max) continue;
            const Sample s{i, b(x)};
            if (b.polarity == Polarity::upper) {
                uppers.push_back(s);
            } else if (b.polarity == Polarity::lower) {
                lowers.push_back(s);
            }
        }
        if (uppers.empty() || lowers.empty()) continue;

        for (const Sample& low : lowers) {
            const std::size_t u = nearest(uppers, low.row);
            const double u_row = boundaries[u](x);
            if (nearest(lowers, u_row) != low.index) continue;

            const double top = std::min(u_row, low.row);
            const double bottom = std::max(u_row, low.row);
            const bool tow_above = std::any_of(uppers.begin(), uppers.end(), [&](const Sample& s) {
                return s.index != u && s.row < top;
            });
            const bool tow_below = std::any_of(lowers.begin(), lowers.end(), [&](const Sample& s) {
                return s.index != low.index && s.row > bottom;
            });
            if (tow_above || tow_below) {
                ++support[{low.index, u}];
            }
        }
    }

    std::vector<bool> used(boundaries.size(), false);
    std::vector<std::pair<double, TowPair>> accepted;
    for (const auto& [key, count] : support) {
        const auto& lower = boundaries[key.first];
        const auto& upper = boundaries[key.second];
        const int x0 = std::max(lower.x_min, upper.x_min);
        const int x1 = std::min(lower.x_max, upper.x_max);
        if (x1 < x0 || 2 * count < (x1 - x0 + 1)) continue;
        used[key.first] = used[key.second] = true;
        const double level = 0.5 * (lower((x0 + x1) / 2) + upper((x0 + x1) / 2));
        accepted.push_back({level, TowPair{key.first, key.second, x0, x1}});
    }
    std::stable_sort(accepted.begin(), accepted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first, a.second.x0) < std::tie(b.first, b.second.x0);
    });
    for (auto& [level, pair] : accepted) result.pairs.push_back(pair);
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (!used[i]) result.unpaired.push_back(i);
    }
    return result;
}

std::vector<Contribution> segment_pair(const TowBoundary& upper_tow_lower,
                                       const TowBoundary& lower_tow_upper, int x0, int x1, double tol,
                                       int height) {
    if (!(tol >= 0.0)) throw std::invalid_argument("segment_pair: tolerance must be >= 0");
    std::vector<Contribution> out;
    for (int x = x0; x <= x1; ++x) {
        const double y_lower = upper_tow_lower(x);
        const double y_upper = lower_tow_upper(x);
        const double w = y_upper - y_lower;
        DefectClass cls;
        double from, to;
        if (w > tol) {
            cls = DefectClass::gap;
            from = y_lower;
            to = y_upper;
        } else if (w < -tol) {
            cls = DefectClass::overlap;
            from = y_upper;
            to = y_lower;
        } else {
            continue;
        }
        // Rows strictly inside (from, to).
        const double first_row = std::max(std::floor(from) + 1.0, 0.0);
        const double last_row = std::min(std::ceil(to) - 1.0, static_cast<double>(height) - 1.0);
        for (double r = first_row; r <= last_row; r += 1.0) {
            out.push_back({Pixel{x, static_cast<int>(r)}, cls});
        }
    }
    return out;
}

AssembledMask assemble_mask(const std::vector<std::vector<Contribution>>& contributions, int width,
                            int height) {
    AssembledMask result{DefectMask(width, height, DefectClass::neutral), 0};
    Raster<std::uint8_t> claims(width, height, 0);  // bit 0: gap, bit 1: overlap
    for (const auto& pair : contributions) {
        for (const Contribution& c : pair) {
            if (!claims.contains(c.pixel.col, c.pixel.row)) {
                throw std::out_of_range("assemble_mask: contribution outside the image");
            }
            if (c.cls == DefectClass::gap) claims.at(c.pixel.col, c.pixel.row) |= 1;
            if (c.cls == DefectClass::overlap) claims.at(c.pixel.col, c.pixel.row) |= 2;
        }
    }
    const auto src = claims.values();
    auto dst = result.mask.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == 3) {
            ++result.conflict_pixels;
            dst[i] = DefectClass::overlap;
        } else if (src[i] == 2) {
            dst[i] = DefectClass::overlap;
        } else if (src[i] == 1) {
            dst[i] = DefectClass::gap;
        }
    }
    return result;
}

std::vector<DefectRegion> extract_regions(const DefectMask& mask) {
    std::vector<DefectRegion> regions;
    for (DefectClass cls : {DefectClass::gap, DefectClass::overlap}) {
        for (auto& pixels : detail::connected_components(mask, cls)) {
            DefectRegion region;
            region.cls = cls;
            region.area = pixels.size();
            BoundingBox box{pixels.front().col, pixels.front().row, pixels.front().col,
                            pixels.front().row};
            std::map<int, std::pair<int, int>> extent;
            for (const Pixel& p : pixels) {
                box.min_col = std::min(box.min_col, p.col);
                box.max_col = std::max(box.max_col, p.col);
                box.min_row = std::min(box.min_row, p.row);
                box.max_row = std::max(box.max_row, p.row);
                auto [it, inserted] = extent.try_emplace(p.col, p.row, p.row);
                if (!inserted) {
                    it->second.first = std::min(it->second.first, p.row);
                    it->second.second = std::max(it->second.second, p.row);
                }
            }
            for (const auto& [col, span] : extent) {
                region.max_width = std::max(region.max_width, span.second - span.first + 1);
            }
            region.bbox = box;
            region.pixels = std::move(pixels);
            regions.push_back(std::move(region));
        }
    }
    return regions;
}

}  // namespace afp
