#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afp/edges.hpp"
#include "afp/preprocess.hpp"
#include "afp/raster.hpp"
#include "afp/segmentation.hpp"
#include "afp/towlines.hpp"

namespace afp {

/// Every tunable of the inspection pipeline, with defaults.
struct PipelineParams {
    int median_window = kDefaultMedianWindow;  // 0 disables the median stage
    CannyParams canny;
    int se_length = kDefaultStructuringLength;
    GroupingParams grouping;
    std::optional<double> spline_s;  // unset: estimated from the knots, see default_smoothing
    double tolerance = kDefaultTolerance;
    int min_boundary_span = 2;  // merged polylines with fewer columns are discarded

    void validate() const;
};

/// Intermediate products of one run, kept for stage dumps and reporting.
struct InspectResult {
    DepthMap filtered;
    BinaryMask edges;
    BinaryMask opened;
    SignedGradientMap gradient;
    PolarEdgeMap polarity;
    std::vector<EdgeRegion> upper_regions;
    std::vector<EdgeRegion> lower_regions;
    std::vector<std::vector<std::size_t>> upper_groups;
    std::vector<std::vector<std::size_t>> lower_groups;
    std::vector<TowBoundary> boundaries;  // upper boundaries first, each polarity by group id
    PairingResult pairing;
    DefectMask mask;
    std::size_t conflict_pixels = 0;
    std::vector<DefectRegion> defects;
    std::vector<std::string> warnings;
};

/// median -> canny -> horizontal opening -> polarity -> grouping/merging ->
/// spline fitting -> pairing -> per-pair segmentation.
InspectResult inspect(const DepthMap& image, const PipelineParams& params = {});

/// Fitted boundaries for one polarity, knots refined against `gradient`.
std::vector<TowBoundary> reconstruct_boundaries(const std::vector<EdgeRegion>& regions,
                                                const std::vector<std::vector<std::size_t>>& groups,
                                                const SignedGradientMap& gradient, Polarity polarity,
                                                const PipelineParams& params);

}  // namespace afp
