#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "afp/cli.hpp"
#include "afp/edges.hpp"
#include "afp/evaluation.hpp"
#include "afp/image_io.hpp"
#include "afp/pipeline.hpp"
#include "afp/preprocess.hpp"
#include "afp/segmentation.hpp"
#include "afp/synth.hpp"
#include "afp/towlines.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace afp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (failures.size() < 5) failures.push_back(what);
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int lower_median(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

Polyline merge_oracle(const std::vector<EdgeRegion>& group) {
    std::vector<const EdgeRegion*> sorted;
    for (const auto& g : group) sorted.push_back(&g);
    std::sort(sorted.begin(), sorted.end(), [](const EdgeRegion* a, const EdgeRegion* b) {
        return std::tie(a->leftmost.col, a->leftmost.row, a->id) < std::tie(b->leftmost.col, b->leftmost.row, b->id);
    });
    std::map<int, std::vector<int>> contrib;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        std::map<int, std::vector<int>> cols;
        for (const Pixel& p : sorted[k]->pixels) cols[p.col].push_back(p.row);
        for (auto& [col, rows] : cols) contrib[col].push_back(lower_median(rows));
        if (k + 1 < sorted.size()) {
            for (const Pixel& p : oracle::line(sorted[k]->rightmost, sorted[k + 1]->leftmost)) {
                contrib[p.col].push_back(p.row);
            }
        }
    }
    Polyline out;
    for (auto& [col, rows] : contrib) out.push_back({col, lower_median(rows)});
    return out;
}

std::vector<EdgeRegion> random_group(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 6), row(0, 63), gap(0, 10), len(0, 8), coin(0, 3);
    std::vector<EdgeRegion> group;
    int c = 0;
    const int n = count(rng);
    for (int k = 0; k < n && c < 64; ++k) {
        const int r = row(rng);
        const int c1 = std::min(63, c + len(rng));
        std::vector<Pixel> px;
        for (int x = c; x <= c1; ++x) {
            px.push_back({x, r});
            if (coin(rng) == 0 && r + 1 < 64) px.push_back({x, r + 1});
        }
        std::sort(px.begin(), px.end(), [](Pixel a, Pixel b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
        group.push_back(make_region(k + 1, Polarity::upper, px));
        c = c1 + 1 + gap(rng);
    }
    std::shuffle(group.begin(), group.end(), rng);
    return group;
}

std::vector<EdgeRegion> random_regions(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(0, 30), col(0, 63), row(0, 63), len(0, 12);
    std::vector<EdgeRegion> out;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const int c = col(rng), r = row(rng);
        std::vector<Pixel> px;
        for (int x = c; x <= std::min(63, c + len(rng)); ++x) px.push_back({x, r});
        out.push_back(make_region(i + 1, Polarity::lower, px));
    }
    return out;
}

std::set<std::set<std::size_t>> as_sets(const std::vector<std::vector<std::size_t>>& groups) {
    std::set<std::set<std::size_t>> out;
    for (const auto& g : groups) out.insert(std::set<std::size_t>(g.begin(), g.end()));
    return out;
}

TowBoundary flat(Polarity pol, double row) {
    return fit_boundary(std::vector<Knot>{{0.0, row}, {1.0, row}, {2.0, row}}, 0.0, pol);
}

Outcome oracle_equivalence() {
    constexpr int kInstances = 1000;
    Outcome o;
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> dim(1, 64), window(0, 3), levels(0, 4);
    const auto t0 = Clock::now();
    for (int i = 0; i < kInstances; ++i) {
        const DepthMap img = oracle::random_depth(rng, dim(rng), dim(rng), levels(rng));
        const int largest = std::min(img.width(), img.height());
        const int n = std::min(2 * window(rng) + 1, largest % 2 == 1 ? largest : largest - 1);
        o.check(median_filter(img, n) == oracle::median(img, n), "median instance " + std::to_string(i));
    }
    for (int i = 0; i < kInstances; ++i) {
        PolarEdgeMap m(dim(rng), dim(rng));
        std::uniform_int_distribution<int> pol(0, 2);
        for (auto& v : m.values()) v = static_cast<Polarity>(pol(rng));
        for (Polarity p : {Polarity::upper, Polarity::lower}) {
            const auto regions = label_components(m, p);
            const auto expected = oracle::flood_components(m, p);
            bool same = regions.size() == expected.size();
            for (std::size_t k = 0; same && k < regions.size(); ++k) same = regions[k].pixels == expected[k];
            o.check(same, "labeling instance " + std::to_string(i));
        }
    }
    for (int i = 0; i < kInstances; ++i) {
        const int w = dim(rng), h = dim(rng);
        const DefectMask pred = oracle::random_labels(rng, w, h);
        const DefectMask gt = oracle::random_labels(rng, w, h);
        const EvalReport r = evaluate(pred, gt);
        const bool same = r.iou_gap == oracle::iou(pred, gt, DefectClass::gap) &&
                          r.iou_overlap == oracle::iou(pred, gt, DefectClass::overlap) &&
                          iou(pred, gt, DefectClass::gap) == r.iou_gap &&
                          r.gap.intersection == oracle::class_counts(pred, gt, DefectClass::gap).intersection;
        o.check(same, "iou instance " + std::to_string(i));
    }
    for (int i = 0; i < kInstances; ++i) {
        const auto group = random_group(rng);
        o.check(merge_group(group) == merge_oracle(group), "merge instance " + std::to_string(i));
    }
    const double secs = seconds_since(t0);
    o.check(secs < 60.0, "runtime " + std::to_string(secs) + " s");
    o.detail = std::to_string(kInstances) + " instances x 4 oracles in " + std::to_string(secs).substr(0, 5) + " s";
    return o;
}

Outcome kernel_invariants() {
    constexpr int kInstances = 1000;
    Outcome o;
    std::mt19937_64 rng(2002);
    std::uniform_int_distribution<int> dim(1, 64), se(1, 9);
    std::uniform_real_distribution<double> density(0.05, 0.95);
    for (int i = 0; i < kInstances; ++i) {
        const BinaryMask m = oracle::random_mask(rng, dim(rng), dim(rng), density(rng));
        const int len = se(rng);
        const BinaryMask once = open_horizontal(m, len);
        o.check(open_horizontal(once, len) == once, "opening not idempotent, instance " + std::to_string(i));
        bool subset = true;
        for (std::size_t k = 0; k < m.size(); ++k) subset = subset && (!once.values()[k] || m.values()[k]);
        o.check(subset, "opening not anti-extensive, instance " + std::to_string(i));
    }

    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int i = 0; i < kInstances; ++i) {
        const int w = dim(rng) + 2, h = dim(rng) + 2;
        const double a = coef(rng), b = coef(rng), c = coef(rng) * 0.02, d = coef(rng);
        Raster<double> px(w, h);
        for (int r = 0; r < h; ++r) {
            for (int col = 0; col < w; ++col) px.at(col, r) = a * r + c * r * r + d * col + b * std::sin(col * 0.1);
        }
        const SignedGradientMap g = sobel_vertical(px);
        for (int r = 1; r + 1 < h; ++r) {
            for (int col = 1; col + 1 < w; ++col) {
                const double central = px.at(col, r + 1) - px.at(col, r - 1);
                const int s1 = (central > 0) - (central < 0);
                const int s2 = (g.at(col, r) > 0) - (g.at(col, r) < 0);
                o.check(s1 == s2, "sobel sign at ramp instance " + std::to_string(i));
            }
        }
    }

    std::uniform_real_distribution<double> level(0.0, 1.0);
    for (int i = 0; i < kInstances; ++i) {
        std::uniform_int_distribution<int> side(3, 64);
        const DepthMap flat_img(Raster<double>(side(rng), side(rng), level(rng)));
        const BinaryMask e = canny(flat_img);
        o.check(std::all_of(e.values().begin(), e.values().end(), [](auto v) { return v == 0; }),
                "canny on constant image, instance " + std::to_string(i));
    }
    std::uniform_int_distribution<int> side(3, 64);
    for (int i = 0; i < kInstances; ++i) {
        const int w = side(rng), h = side(rng);
        const int step_row = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(h - 1));
        double above = level(rng), below = level(rng);
        if (above == below) below = 1.0 - above;
        const BinaryMask e = canny(synth::step_fixture(w, h, step_row, above, below));
        for (int r = 0; r + 1 < h; ++r) {
            for (int c = 0; c < w; ++c) o.check(!(e.at(c, r) && e.at(c, r + 1)), "canny step edge two pixels thick");
        }
    }
    // On drifting scenes: never two edge pixels in a row along a shared gradient direction.
    synth::CorpusSpec scenes;
    scenes.count = 100;
    scenes.seed = 2002;
    scenes.width = 64;
    scenes.drift_amplitude = {0.0, 2.0};
    for (const auto& spec : synth::corpus(scenes)) {
        const DepthMap img = synth::generate(spec).image;
        const BinaryMask e = canny(img);
        const Raster<double> smooth = gaussian_blur(img.raster(), CannyParams{}.sigma);
        const SignedGradientMap gx = sobel_horizontal(smooth), gy = sobel_vertical(smooth);
        auto sector = [&](int c, int r) {
            const double deg = std::atan2(gy.at(c, r), gx.at(c, r)) * 180.0 / 3.14159265358979323846;
            return static_cast<int>(std::lround(deg / 45.0) + 8) % 8;
        };
        const int dcol[8] = {1, 1, 0, -1, -1, -1, 0, 1};
        const int drow[8] = {0, 1, 1, 1, 0, -1, -1, -1};
        for (int r = 0; r < e.height(); ++r) {
            for (int c = 0; c < e.width(); ++c) {
                if (!e.at(c, r)) continue;
                const int s = sector(c, r);
                const int nc = c + dcol[s], nr = r + drow[s];
                o.check(!(e.contains(nc, nr) && e.at(nc, nr) && sector(nc, nr) == s),
                        "canny edge two pixels thick along its gradient");
            }
        }
    }

    for (int i = 0; i < kInstances; ++i) {
        const auto regions = random_regions(rng);
        const GroupingParams p{1.0, 4.0, 30.0};
        const auto groups = group_regions(regions, p);
        std::vector<int> seen(regions.size(), 0);
        for (const auto& g : groups) {
            for (auto k : g) ++seen[k];
        }
        o.check(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }), "grouping not a partition");

        std::vector<std::size_t> perm(regions.size());
        for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<EdgeRegion> shuffled;
        for (auto k : perm) shuffled.push_back(regions[k]);
        std::set<std::set<std::size_t>> mapped;
        for (const auto& g : group_regions(shuffled, p)) {
            std::set<std::size_t> s;
            for (auto k : g) s.insert(perm[k]);
            mapped.insert(s);
        }
        o.check(mapped == as_sets(groups), "grouping depends on input order");
        const double scale = std::ldexp(1.0, static_cast<int>(rng() % 9) - 4);
        o.check(as_sets(group_regions(regions, GroupingParams{scale, 4.0 * scale, 30.0 * scale})) == as_sets(groups),
                "grouping not scale invariant");
    }

    std::uniform_real_distribution<double> row(0.0, 60.0), tol(0.0, 4.0);
    for (int i = 0; i < kInstances; ++i) {
        const double y1 = row(rng), y2 = row(rng), t = tol(rng);
        const auto fwd = segment_pair(flat(Polarity::lower, y1), flat(Polarity::upper, y2), 0, 2, t);
        const auto rev = segment_pair(flat(Polarity::lower, y2), flat(Polarity::upper, y1), 0, 2, t);
        bool anti = fwd.size() == rev.size();
        for (std::size_t k = 0; anti && k < fwd.size(); ++k) {
            anti = fwd[k].pixel == rev[k].pixel && fwd[k].cls != rev[k].cls;
        }
        o.check(anti, "segment_pair not antisymmetric");
    }
    o.detail = "opening, sobel sign, canny, grouping, segment_pair over " + std::to_string(kInstances) + " instances each";
    return o;
}

struct CorpusResult {
    double macro_mean_iou = 0.0;
    double rms = 0.0;
    int missed = 0;
    double seconds = 0.0;
};

CorpusResult run_corpus(double salt_pepper, double texture) {
    synth::CorpusSpec spec;
    spec.count = 20;
    spec.seed = 42;
    spec.drift_amplitude = {0.0, 2.0};
    spec.offset = {-4, 4};
    spec.salt_pepper_density = {salt_pepper, salt_pepper};
    spec.texture_sigma = {texture, texture};
    spec.defect_tolerance = 1.0;
    PipelineParams params;
    params.tolerance = 1.0;

    const auto t0 = Clock::now();
    CorpusResult out;
    std::vector<EvalReport> reports;
    double sse = 0.0;
    std::size_t samples = 0;
    for (const auto& scene_spec : synth::corpus(spec)) {
        const synth::Scene scene = synth::generate(scene_spec);
        const InspectResult r = inspect(scene.image, params);
        reports.push_back(evaluate(r.mask, scene.truth));
        const BoundaryErrorStats err = boundary_error(r.boundaries, scene.curves);
        sse += err.rms * err.rms * static_cast<double>(err.samples);
        samples += err.samples;
        for (const DefectRegion& d : extract_regions(scene.truth)) {
            if (d.max_width < 3) continue;
            const bool hit = std::any_of(d.pixels.begin(), d.pixels.end(),
                                         [&](const Pixel& p) { return r.mask.at(p.col, p.row) == d.cls; });
            out.missed += !hit;
        }
    }
    out.seconds = seconds_since(t0);
    out.macro_mean_iou = aggregate(reports).macro_mean_iou;
    out.rms = samples > 0 ? std::sqrt(sse / static_cast<double>(samples)) : INFINITY;
    return out;
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(prec);
    s << v;
    return s.str();
}

Outcome clean_end_to_end() {
    Outcome o;
    const CorpusResult r = run_corpus(0.0, 0.0);
    o.check(r.macro_mean_iou >= 0.80, "macro mean IoU " + fmt(r.macro_mean_iou) + " < 0.80");
    o.check(r.rms <= 1.0, "boundary RMS " + fmt(r.rms) + " > 1");
    o.check(r.seconds < 30.0, "runtime " + fmt(r.seconds, 1) + " s");
    o.detail = "macro mean IoU " + fmt(r.macro_mean_iou) + ", boundary RMS " + fmt(r.rms) + " px, " + fmt(r.seconds, 2) + " s";
    return o;
}

Outcome noisy_end_to_end() {
    Outcome o;
    const CorpusResult r = run_corpus(0.02, 0.03);
    o.check(r.macro_mean_iou >= 0.50, "macro mean IoU " + fmt(r.macro_mean_iou) + " < 0.50");
    o.check(r.missed == 0, std::to_string(r.missed) + " missed defects of width >= 3");
    o.check(r.seconds < 60.0, "runtime " + fmt(r.seconds, 1) + " s");
    o.detail = "macro mean IoU " + fmt(r.macro_mean_iou) + ", missed wide defects " + std::to_string(r.missed) + ", " +
               fmt(r.seconds, 2) + " s";
    return o;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "afpinspect");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[fs::relative(e.path(), root).string()] = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return files;
}

Outcome determinism() {
    Outcome o;
    testutil::TempDir tmp;
    std::ofstream(tmp / "corpus.json") << R"({"count": 3, "seed": 11, "tow_count": 3, "drift_amplitude": [0, 2],
        "offset": [-4, 4], "salt_pepper_density": 0.02, "texture_sigma": 0.03})";
    for (const char* run : {"s1", "s2"}) {
        o.check(cli({"synth", "--spec", (tmp / "corpus.json").string(), "--out", (tmp / run).string()}) == 0,
                "synth failed");
    }
    const auto s1 = tree(tmp / "s1");
    o.check(!s1.empty() && s1 == tree(tmp / "s2"), "synth outputs differ");
    const std::string input = (tmp / "s1" / "scene_000" / "scene.png").string();
    for (const char* run : {"i1", "i2"}) {
        o.check(cli({"inspect", input, "--out", (tmp / run).string(), "--stages"}) == 0, "inspect failed");
    }
    const auto i1 = tree(tmp / "i1");
    o.check(i1.size() == 9 && i1 == tree(tmp / "i2"), "inspect outputs differ");
    o.detail = std::to_string(s1.size()) + " synth files and " + std::to_string(i1.size()) + " inspect files byte-identical";
    return o;
}

Outcome median_window_regression() {
    Outcome o;
    const int step_row = 20, notch_rows = 3;
    const DepthMap notch = synth::notch_fixture(40, 40, step_row, notch_rows);
    const DepthMap n3 = median_filter(notch, 3);
    const DepthMap n7 = median_filter(notch, 7);
    o.check(n3 == notch, "n=3 altered the notch");
    bool destroyed = true;
    for (int c = 0; c < 40; ++c) {
        for (int r = step_row; r < step_row + notch_rows; ++r) destroyed = destroyed && n7.at(c, r) != notch.at(c, r);
    }
    o.check(destroyed, "n=7 kept the notch rows");
    const BinaryMask e3 = canny(n3), e7 = canny(n7);
    std::size_t edges3 = 0, edges7 = 0;
    for (auto v : e3.values()) edges3 += v;
    for (auto v : e7.values()) edges7 += v;
    o.check(edges3 > 0 && edges7 == 0, "edges after n=3: " + std::to_string(edges3) + ", after n=7: " + std::to_string(edges7));

    const DepthMap step = synth::step_fixture(40, 40, step_row, 0.2, 0.8);
    o.check(median_filter(step, 3) == step, "n=3 moved the step");
    o.detail = "3-row notch kept by n=3 (" + std::to_string(edges3) + " edge px), erased by n=7 (" +
               std::to_string(edges7) + " edge px)";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"kernel invariants", kernel_invariants},
        {"clean synthetic end-to-end", clean_end_to_end},
        {"noisy synthetic end-to-end", noisy_end_to_end},
        {"determinism", determinism},
        {"median window regression", median_window_regression},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
