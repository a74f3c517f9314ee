#include "afp/towlines.hpp"

#include "afp/detail/ccl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace afp {
namespace {

int lower_median(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

}  // namespace

void GroupingParams::validate() const {
    if (!(alpha_x >= 0.0) || !(alpha_y >= 0.0)) {
        throw std::invalid_argument("grouping weights must be nonnegative");
    }
    if (!(alpha_x < alpha_y)) {
        throw std::invalid_argument("grouping requires alpha_x < alpha_y");
    }
    if (!(d_th > 0.0)) {
        throw std::invalid_argument("grouping threshold d_th must be positive");
    }
}

double TowBoundary::median_row() const {
    std::vector<double> rows;
    rows.reserve(knots.size());
    for (const Knot& k : knots) rows.push_back(spline(k.x));
    std::sort(rows.begin(), rows.end());
    return rows[(rows.size() - 1) / 2];
}

EdgeRegion make_region(int id, Polarity polarity, std::vector<Pixel> pixels) {
    if (pixels.empty()) throw std::invalid_argument("edge region must be nonempty");
    EdgeRegion region;
    region.id = id;
    region.polarity = polarity;
    BoundingBox box{pixels.front().col, pixels.front().row, pixels.front().col, pixels.front().row};
    for (const Pixel& p : pixels) {
        box.min_col = std::min(box.min_col, p.col);
        box.max_col = std::max(box.max_col, p.col);
        box.min_row = std::min(box.min_row, p.row);
        box.max_row = std::max(box.max_row, p.row);
    }
    std::vector<int> left_rows, right_rows;
    for (const Pixel& p : pixels) {
        if (p.col == box.min_col) left_rows.push_back(p.row);
        if (p.col == box.max_col) right_rows.push_back(p.row);
    }
    region.bbox = box;
    region.leftmost = {box.min_col, lower_median(std::move(left_rows))};
    region.rightmost = {box.max_col, lower_median(std::move(right_rows))};
    region.pixels = std::move(pixels);
    return region;
}

std::vector<EdgeRegion> label_components(const PolarEdgeMap& edges, Polarity polarity) {
    auto components = detail::connected_components(edges, polarity);
    std::vector<EdgeRegion> regions;
    regions.reserve(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) {
        regions.push_back(make_region(static_cast<int>(i + 1), polarity, std::move(components[i])));
    }
    return regions;
}

double region_distance(const EdgeRegion& a, const EdgeRegion& b, const GroupingParams& params) {
    if (a.polarity != b.polarity) {
        throw std::invalid_argument("region_distance: polarity mismatch");
    }
    auto key = [](const EdgeRegion& r) {
        return std::make_tuple(r.leftmost.col, r.rightmost.col, r.leftmost.row, r.rightmost.row);
    };
    const bool a_is_left = key(a) <= key(b);
    const EdgeRegion& left = a_is_left ? a : b;
    const EdgeRegion& right = a_is_left ? b : a;
    const int dx = std::max(0, right.leftmost.col - left.rightmost.col);
    const int dy = std::abs(right.leftmost.row - left.rightmost.row);
    return params.alpha_x * dx + params.alpha_y * dy;
}

std::vector<std::vector<std::size_t>> group_regions(const std::vector<EdgeRegion>& regions,
                                                    const GroupingParams& params) {
    params.validate();
    const std::size_t n = regions.size();
    detail::DisjointSet sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (region_distance(regions[i], regions[j], params) < params.d_th) {
                sets.unite(i, j);
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < n; ++i) by_root[sets.find(i)].push_back(i);

    std::vector<std::vector<std::size_t>> groups;
    groups.reserve(by_root.size());
    for (auto& [root, members] : by_root) groups.push_back(std::move(members));

    auto top_left = [&](const std::vector<std::size_t>& g) {
        std::tuple<int, int, std::size_t> best{regions[g.front()].bbox.min_row,
                                               regions[g.front()].leftmost.col, g.front()};
        for (std::size_t idx : g) {
            best = std::min(best, std::make_tuple(regions[idx].bbox.min_row,
                                                  regions[idx].leftmost.col, idx));
        }
        return best;
    };
    std::sort(groups.begin(), groups.end(),
              [&](const auto& x, const auto& y) { return top_left(x) < top_left(y); });
    return groups;
}

std::vector<Pixel> bresenham_line(Pixel from, Pixel to) {
    std::vector<Pixel> out;
    const int dx = std::abs(to.col - from.col);
    const int dy = -std::abs(to.row - from.row);
    const int sx = from.col < to.col ? 1 : -1;
    const int sy = from.row < to.row ? 1 : -1;
    int err = dx + dy;
    Pixel p = from;
    while (true) {
        out.push_back(p);
        if (p == to) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.col += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.row += sy;
        }
    }
    return out;
}

Polyline merge_group(const std::vector<EdgeRegion>& group) {
    if (group.empty()) throw std::invalid_argument("merge_group: empty group");
    std::vector<const EdgeRegion*> ordered;
    ordered.reserve(group.size());
    for (const auto& r : group) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(), [](const EdgeRegion* a, const EdgeRegion* b) {
        return std::tie(a->leftmost.col, a->leftmost.row, a->id) <
               std::tie(b->leftmost.col, b->leftmost.row, b->id);
    });

    std::map<int, std::vector<int>> contributions;
    for (std::size_t k = 0; k < ordered.size(); ++k) {
        std::map<int, std::vector<int>> rows_by_col;
        for (const Pixel& p : ordered[k]->pixels) rows_by_col[p.col].push_back(p.row);
        for (auto& [col, rows] : rows_by_col) contributions[col].push_back(lower_median(rows));
        if (k + 1 < ordered.size()) {
            for (const Pixel& p : bresenham_line(ordered[k]->rightmost, ordered[k + 1]->leftmost)) {
                contributions[p.col].push_back(p.row);
            }
        }
    }

    Polyline out;
    out.reserve(contributions.size());
    for (auto& [col, rows] : contributions) out.push_back({col, lower_median(rows)});
    return out;
}

double default_smoothing(const std::vector<Knot>& knots) {
    if (knots.size() < 4) return 0.0;
    std::vector<double> d2;
    d2.reserve(knots.size() - 2);
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
        d2.push_back(std::abs(knots[i - 1].y - 2.0 * knots[i].y + knots[i + 1].y));
    }
    auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    // Second differences of white noise have standard deviation sigma * sqrt(6).
    const double sigma = *mid / (0.6744897501960817 * std::sqrt(6.0));
    return static_cast<double>(knots.size()) * sigma * sigma;
}

std::vector<Knot> refine_subpixel(const Polyline& polyline, const SignedGradientMap& gradient,
                                  Polarity polarity) {
    const double sign = polarity == Polarity::lower ? -1.0 : 1.0;
    std::vector<Knot> knots;
    knots.reserve(polyline.size());
    for (const Pixel& p : polyline) {
        Knot k{static_cast<double>(p.col), static_cast<double>(p.row)};
        if (gradient.contains(p.col, p.row - 1) && gradient.contains(p.col, p.row + 1)) {
            const double a = sign * gradient.at(p.col, p.row - 1);
            const double b = sign * gradient.at(p.col, p.row);
            const double c = sign * gradient.at(p.col, p.row + 1);
            const double curvature = a - 2.0 * b + c;
            if (b > 0.0 && b >= a && b >= c && curvature < 0.0) {
                k.y += std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
            }
        }
        knots.push_back(k);
    }
    return knots;
}

TowBoundary fit_boundary(const Polyline& polyline, double smoothing, Polarity polarity, int group_id) {
    std::vector<Knot> knots;
    knots.reserve(polyline.size());
    for (const Pixel& p : polyline) knots.push_back({static_cast<double>(p.col), static_cast<double>(p.row)});
    return fit_boundary(knots, smoothing, polarity, group_id);
}

TowBoundary fit_boundary(const std::vector<Knot>& knots, double smoothing, Polarity polarity,
                         int group_id) {
    if (knots.size() < 2) {
        throw std::invalid_argument("fit_boundary: need at least two points, got " +
                                    std::to_string(knots.size()));
    }
    std::vector<double> x(knots.size()), y(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (i > 0 && !(knots[i].x > knots[i - 1].x)) {
            throw std::invalid_argument("fit_boundary: columns must be strictly increasing");
        }
        x[i] = knots[i].x;
        y[i] = knots[i].y;
    }
    TowBoundary b;
    b.polarity = polarity;
    b.group_id = group_id;
    b.x_min = static_cast<int>(std::ceil(knots.front().x));
    b.x_max = static_cast<int>(std::floor(knots.back().x));
    b.knots = knots;
    b.spline = Spline::smoothing_spline(x, y, smoothing);
    return b;
}

}  // namespace afp
