#pragma once

#include <vector>

#include "afp/raster.hpp"
#include "afp/spline.hpp"

namespace afp {

struct BoundingBox {
    int min_col = 0;
    int min_row = 0;
    int max_col = 0;
    int max_row = 0;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// One 8-connected component of same-polarity edge pixels.
struct EdgeRegion {
    int id = 0;
    Polarity polarity = Polarity::none;
    std::vector<Pixel> pixels;  // raster order
    Pixel leftmost;             // min column; lower-median row within that column
    Pixel rightmost;            // max column; lower-median row within that column
    BoundingBox bbox;
};

/// Weights and threshold of the weighted region distance
/// d = alpha_x * dx + alpha_y * dy; regions closer than d_th are related.
struct GroupingParams {
    double alpha_x = 1.0;
    double alpha_y = 4.0;
    double d_th = 30.0;

    void validate() const;
};

using Polyline = std::vector<Pixel>;

/// Boundary sample with a sub-pixel row.
struct Knot {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Knot&, const Knot&) = default;
};

/// Smooth y = f(x) curve reconstructed for one tow edge.
struct TowBoundary {
    Polarity polarity = Polarity::none;
    int group_id = 0;
    int x_min = 0;
    int x_max = 0;
    std::vector<Knot> knots;  // strictly increasing x
    Spline spline;

    /// Throws std::out_of_range outside [x_min, x_max].
    double operator()(double x) const { return spline(x); }
    double median_row() const;
};

/// Builds an EdgeRegion (extremes and bbox) from its pixel list.
EdgeRegion make_region(int id, Polarity polarity, std::vector<Pixel> pixels);

/// Maximal 8-connected sets of `polarity` pixels, labeled 1.. in raster-scan
/// discovery order (two-pass union-find).
std::vector<EdgeRegion> label_components(const PolarEdgeMap& edges, Polarity polarity);

/// Weighted distance between facing endpoints: the right end of the left
/// region against the left end of the right region, horizontal gap clipped at 0.
double region_distance(const EdgeRegion& a, const EdgeRegion& b, const GroupingParams& params);

/// Partition induced by the transitive closure of d(a, b) < d_th. Each group
/// lists indices into `regions`; groups are ordered by their topmost, then
/// leftmost member so group k (0-based) carries id k + 1.
std::vector<std::vector<std::size_t>> group_regions(const std::vector<EdgeRegion>& regions,
                                                    const GroupingParams& params);

/// 8-connected line from `from` to `to`, endpoints included.
std::vector<Pixel> bresenham_line(Pixel from, Pixel to);

/// Joins a group's regions left to right into one point per column.
Polyline merge_group(const std::vector<EdgeRegion>& group);

/// Moves each polyline row to the vertex of the parabola through the
/// polarity-signed vertical gradient at rows y-1, y, y+1. Rows that are not a
/// local gradient peak (bridged gaps, borders) keep their integer position.
std::vector<Knot> refine_subpixel(const Polyline& polyline, const SignedGradientMap& gradient,
                                  Polarity polarity);

/// m * sigma^2 for m knots, with the row noise sigma estimated robustly from
/// the median absolute second difference. Zero below four knots.
double default_smoothing(const std::vector<Knot>& knots);

/// Fits y = f(x) through the polyline. Requires >= 2 points with strictly
/// increasing columns.
TowBoundary fit_boundary(const Polyline& polyline, double smoothing, Polarity polarity = Polarity::none,
                         int group_id = 0);
TowBoundary fit_boundary(const std::vector<Knot>& knots, double smoothing,
                         Polarity polarity = Polarity::none, int group_id = 0);

}  // namespace afp
