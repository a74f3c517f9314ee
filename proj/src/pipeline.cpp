#include "afp/pipeline.hpp"

#include <string>

namespace afp {

void PipelineParams::validate() const {
    if (median_window != 0 && (median_window < 1 || median_window % 2 == 0)) {
        throw std::invalid_argument("--median must be 0 (disabled) or a positive odd integer, got " +
                                    std::to_string(median_window));
    }
    canny.validate();
    if (se_length < 1) throw std::invalid_argument("--se-length must be >= 1");
    grouping.validate();
    if (spline_s && !(*spline_s >= 0.0)) throw std::invalid_argument("--spline-s must be >= 0");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("--tolerance must be >= 0");
    if (min_boundary_span < 2) throw std::invalid_argument("min_boundary_span must be >= 2");
}

std::vector<TowBoundary> reconstruct_boundaries(const std::vector<EdgeRegion>& regions,
                                                const std::vector<std::vector<std::size_t>>& groups,
                                                const SignedGradientMap& gradient, Polarity polarity,
                                                const PipelineParams& params) {
    std::vector<TowBoundary> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<EdgeRegion> members;
        members.reserve(groups[g].size());
        for (std::size_t idx : groups[g]) members.push_back(regions[idx]);
        const Polyline line = merge_group(members);
        if (static_cast<int>(line.size()) < params.min_boundary_span) continue;
        const std::vector<Knot> knots = refine_subpixel(line, gradient, polarity);
        const double s = params.spline_s.value_or(default_smoothing(knots));
        out.push_back(fit_boundary(knots, s, polarity, static_cast<int>(g + 1)));
    }
    return out;
}

InspectResult inspect(const DepthMap& image, const PipelineParams& params) {
    params.validate();
    InspectResult r;
    r.filtered = params.median_window > 1 ? median_filter(image, params.median_window) : image;
    r.edges = canny(r.filtered, params.canny);
    r.opened = open_horizontal(r.edges, params.se_length);
    r.gradient = sobel_vertical(r.filtered);
    r.polarity = classify_edges(r.opened, r.gradient);

    r.upper_regions = label_components(r.polarity, Polarity::upper);
    r.lower_regions = label_components(r.polarity, Polarity::lower);
    r.upper_groups = group_regions(r.upper_regions, params.grouping);
    r.lower_groups = group_regions(r.lower_regions, params.grouping);

    r.boundaries = reconstruct_boundaries(r.upper_regions, r.upper_groups, r.gradient,
                                          Polarity::upper, params);
    auto lower = reconstruct_boundaries(r.lower_regions, r.lower_groups, r.gradient,
                                           Polarity::lower, params);
    r.boundaries.insert(r.boundaries.end(), lower.begin(), lower.end());

    r.pairing = pair_boundaries(r.boundaries);
    std::vector<std::vector<Contribution>> contributions;
    contributions.reserve(r.pairing.pairs.size());
    for (const TowPair& p : r.pairing.pairs) {
        contributions.push_back(segment_pair(r.boundaries[p.upper_tow_lower_boundary],
                                             r.boundaries[p.lower_tow_upper_boundary], p.x0, p.x1,
                                             params.tolerance, image.height()));
    }
    AssembledMask assembled = assemble_mask(contributions, image.width(), image.height());
    r.mask = std::move(assembled.mask);
    r.conflict_pixels = assembled.conflict_pixels;
    r.defects = extract_regions(r.mask);

    if (r.boundaries.empty()) {
        r.warnings.push_back("no tow boundaries found");
    } else if (r.pairing.pairs.empty()) {
        r.warnings.push_back("no adjacent tow boundaries could be paired");
    }
    if (r.conflict_pixels > 0) {
        r.warnings.push_back(std::to_string(r.conflict_pixels) +
                             " pixels claimed as both gap and overlap; resolved to overlap");
    }
    return r;
}

}  // namespace afp
