#include "afp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace afp {

double iou_from_counts(const ClassCounts& counts) {
    if (counts.union_ == 0) return 1.0;
    return static_cast<double>(counts.intersection) / static_cast<double>(counts.union_);
}

double iou(const DefectMask& pred, const DefectMask& gt, DefectClass cls) {
    require_same_shape(pred, gt, "iou");
    ClassCounts counts;
    const auto p = pred.values();
    const auto g = gt.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool in_p = p[i] == cls;
        const bool in_g = g[i] == cls;
        counts.intersection += in_p && in_g;
        counts.union_ += in_p || in_g;
    }
    return iou_from_counts(counts);
}

EvalReport evaluate(const DefectMask& pred, const DefectMask& gt) {
    require_same_shape(pred, gt, "evaluate");
    EvalReport report;
    const auto p = pred.values();
    const auto g = gt.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto pi = static_cast<std::size_t>(p[i]);
        const auto gi = static_cast<std::size_t>(g[i]);
        if (pi > 2 || gi > 2) throw std::invalid_argument("evaluate: class code outside {0,1,2}");
        ++report.confusion[gi][pi];
    }
    auto counts_for = [&](DefectClass cls) {
        const auto c = static_cast<std::size_t>(cls);
        ClassCounts counts;
        counts.intersection = report.confusion[c][c];
        for (std::size_t k = 0; k < 3; ++k) {
            counts.gt += report.confusion[c][k];
            counts.pred += report.confusion[k][c];
        }
        counts.union_ = counts.gt + counts.pred - counts.intersection;
        return counts;
    };
    report.gap = counts_for(DefectClass::gap);
    report.overlap = counts_for(DefectClass::overlap);
    report.iou_gap = iou_from_counts(report.gap);
    report.iou_overlap = iou_from_counts(report.overlap);
    report.mean_iou = (report.iou_gap + report.iou_overlap) / 2.0;
    return report;
}

BatchSummary aggregate(const std::vector<EvalReport>& reports) {
    BatchSummary s;
    s.scored = reports.size();
    if (reports.empty()) return s;
    for (const auto& r : reports) {
        s.macro_iou_gap += r.iou_gap;
        s.macro_iou_overlap += r.iou_overlap;
        s.macro_mean_iou += r.mean_iou;
        for (auto [dst, src] : {std::pair{&s.gap, &r.gap}, std::pair{&s.overlap, &r.overlap}}) {
            dst->intersection += src->intersection;
            dst->union_ += src->union_;
            dst->pred += src->pred;
            dst->gt += src->gt;
        }
    }
    const double n = static_cast<double>(reports.size());
    s.macro_iou_gap /= n;
    s.macro_iou_overlap /= n;
    s.macro_mean_iou /= n;
    s.micro_iou_gap = iou_from_counts(s.gap);
    s.micro_iou_overlap = iou_from_counts(s.overlap);
    s.micro_mean_iou = (s.micro_iou_gap + s.micro_iou_overlap) / 2.0;
    return s;
}

BoundaryErrorStats boundary_error(const std::vector<TowBoundary>& reconstructed,
                                  const std::vector<BoundaryCurve>& reference) {
    BoundaryErrorStats stats;
    double total = 0.0;
    for (const auto& b : reconstructed) {
        double best_sse = std::numeric_limits<double>::infinity();
        double best_max = 0.0;
        std::size_t best_n = 0;
        for (const auto& curve : reference) {
            if (curve.polarity != b.polarity) continue;
            const int c0 = std::max(b.x_min, curve.first_col);
            const int c1 = std::min(b.x_max, curve.first_col + static_cast<int>(curve.rows.size()) - 1);
            if (c1 < c0) continue;
            double sse = 0.0, worst = 0.0;
            for (int x = c0; x <= c1; ++x) {
                const double e = b(x) - curve.rows[static_cast<std::size_t>(x - curve.first_col)];
                sse += e * e;
                worst = std::max(worst, std::abs(e));
            }
            const auto n = static_cast<std::size_t>(c1 - c0 + 1);
            if (best_n == 0 || sse / n < best_sse / best_n) {
                best_sse = sse;
                best_max = worst;
                best_n = n;
            }
        }
        if (best_n == 0) {
            ++stats.unmatched_boundaries;
            continue;
        }
        total += best_sse;
        stats.samples += best_n;
        stats.max_abs = std::max(stats.max_abs, best_max);
    }
    stats.rms = stats.samples > 0 ? std::sqrt(total / static_cast<double>(stats.samples)) : 0.0;
    return stats;
}

}  // namespace afp
