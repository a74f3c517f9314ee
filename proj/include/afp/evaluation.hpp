#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "afp/raster.hpp"
#include "afp/towlines.hpp"

namespace afp {

struct ClassCounts {
    std::uint64_t intersection = 0;
    std::uint64_t union_ = 0;
    std::uint64_t pred = 0;
    std::uint64_t gt = 0;
};

struct EvalReport {
    double iou_gap = 0.0;
    double iou_overlap = 0.0;
    double mean_iou = 0.0;
    ClassCounts gap;
    ClassCounts overlap;
    /// confusion[gt][pred] over {neutral, gap, overlap}.
    std::array<std::array<std::uint64_t, 3>, 3> confusion{};
};

/// |pred ∩ gt| / |pred ∪ gt| for one class; 1.0 when both sets are empty.
double iou(const DefectMask& pred, const DefectMask& gt, DefectClass cls);

EvalReport evaluate(const DefectMask& pred, const DefectMask& gt);

/// IoU from counts, with the empty-vs-empty convention.
double iou_from_counts(const ClassCounts& counts);

struct BatchSummary {
    std::size_t scored = 0;
    /// Mean of the per-image IoUs.
    double macro_iou_gap = 0.0;
    double macro_iou_overlap = 0.0;
    double macro_mean_iou = 0.0;
    /// IoUs of the summed pixel counts.
    double micro_iou_gap = 0.0;
    double micro_iou_overlap = 0.0;
    double micro_mean_iou = 0.0;
    ClassCounts gap;
    ClassCounts overlap;
};

BatchSummary aggregate(const std::vector<EvalReport>& reports);

struct BoundaryErrorStats {
    double rms = 0.0;
    double max_abs = 0.0;
    std::size_t samples = 0;
    std::size_t unmatched_boundaries = 0;
};

/// RMS row error of reconstructed boundaries against reference curves. Each
/// boundary is compared, over its domain, with the same-polarity reference of
/// least mean squared error.
BoundaryErrorStats boundary_error(const std::vector<TowBoundary>& reconstructed,
                                  const std::vector<BoundaryCurve>& reference);

}  // namespace afp
