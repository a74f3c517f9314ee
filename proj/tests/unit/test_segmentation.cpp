#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "afp/segmentation.hpp"
#include "support/oracles.hpp"

using namespace afp;

namespace {

TowBoundary flat(Polarity pol, double row, int x0, int x1) {
    std::vector<Knot> knots;
    for (int x = x0; x <= x1; ++x) knots.push_back({double(x), row});
    return fit_boundary(knots, 0.0, pol);
}

std::vector<TowBoundary> stack(const std::vector<double>& tops, double height, int x0 = 0, int x1 = 99) {
    std::vector<TowBoundary> out;
    for (double t : tops) {
        out.push_back(flat(Polarity::upper, t, x0, x1));
        out.push_back(flat(Polarity::lower, t + height, x0, x1));
    }
    return out;
}

std::vector<int> rows_at(const std::vector<Contribution>& cs, int col, DefectClass cls) {
    std::vector<int> rows;
    for (const auto& c : cs) {
        if (c.pixel.col == col && c.cls == cls) rows.push_back(c.pixel.row);
    }
    return rows;
}

}  // namespace

TEST(SegmentPair, GapStrictlyBetween) {
    const auto cs = segment_pair(flat(Polarity::lower, 10, 0, 4), flat(Polarity::upper, 14, 0, 4), 0, 4, 1.0);
    ASSERT_EQ(cs.size(), 15u);
    for (int x = 0; x <= 4; ++x) EXPECT_EQ(rows_at(cs, x, DefectClass::gap), (std::vector<int>{11, 12, 13}));
}

TEST(SegmentPair, SwappedIsOverlap) {
    const auto cs = segment_pair(flat(Polarity::lower, 14, 0, 4), flat(Polarity::upper, 10, 0, 4), 0, 4, 1.0);
    ASSERT_EQ(cs.size(), 15u);
    for (int x = 0; x <= 4; ++x) EXPECT_EQ(rows_at(cs, x, DefectClass::overlap), (std::vector<int>{11, 12, 13}));
}

TEST(SegmentPair, WithinToleranceIsNeutral) {
    EXPECT_TRUE(segment_pair(flat(Polarity::lower, 10, 0, 4), flat(Polarity::upper, 11, 0, 4), 0, 4, 1.0).empty());
    EXPECT_TRUE(segment_pair(flat(Polarity::lower, 11, 0, 4), flat(Polarity::upper, 10, 0, 4), 0, 4, 1.0).empty());
    EXPECT_TRUE(segment_pair(flat(Polarity::lower, 0, 0, 4), flat(Polarity::upper, 50, 0, 4), 0, 4,
                             std::numeric_limits<double>::infinity())
                    .empty());
}

TEST(SegmentPair, FractionalEdgesAndClipping) {
    const auto cs = segment_pair(flat(Polarity::lower, 10.4, 0, 1), flat(Polarity::upper, 13.6, 0, 1), 0, 0, 1.0);
    EXPECT_EQ(rows_at(cs, 0, DefectClass::gap), (std::vector<int>{11, 12, 13}));
    const auto clipped = segment_pair(flat(Polarity::lower, 5, 0, 1), flat(Polarity::upper, 20, 0, 1), 0, 0, 1.0, 9);
    EXPECT_EQ(rows_at(clipped, 0, DefectClass::gap), (std::vector<int>{6, 7, 8}));
    EXPECT_THROW(segment_pair(flat(Polarity::lower, 5, 0, 1), flat(Polarity::upper, 9, 0, 1), 0, 0, -1.0),
                 std::invalid_argument);
}

TEST(SegmentPair, Antisymmetric) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> row(0.0, 40.0), tol(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = row(rng), b = row(rng), t = tol(rng);
        const auto fwd = segment_pair(flat(Polarity::lower, a, 0, 1), flat(Polarity::upper, b, 0, 1), 0, 1, t);
        const auto rev = segment_pair(flat(Polarity::lower, b, 0, 1), flat(Polarity::upper, a, 0, 1), 0, 1, t);
        ASSERT_EQ(fwd.size(), rev.size());
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            EXPECT_EQ(fwd[i].pixel, rev[i].pixel);
            EXPECT_NE(fwd[i].cls, rev[i].cls);
            EXPECT_NE(fwd[i].cls, DefectClass::neutral);
        }
    }
}

TEST(Pairing, CountsFollowTowCount) {
    EXPECT_TRUE(pair_boundaries({}).pairs.empty());
    const auto one = pair_boundaries(stack({10}, 20));
    EXPECT_TRUE(one.pairs.empty());
    EXPECT_EQ(one.unpaired.size(), 2u);

    const auto two = stack({10, 33}, 20);
    const auto p2 = pair_boundaries(two);
    ASSERT_EQ(p2.pairs.size(), 1u);
    EXPECT_EQ(p2.pairs[0].upper_tow_lower_boundary, 1u);
    EXPECT_EQ(p2.pairs[0].lower_tow_upper_boundary, 2u);
    EXPECT_EQ(p2.pairs[0].x0, 0);
    EXPECT_EQ(p2.pairs[0].x1, 99);
    EXPECT_EQ(p2.unpaired, (std::vector<std::size_t>{0, 3}));

    const auto p3 = pair_boundaries(stack({10, 28, 50}, 20));
    ASSERT_EQ(p3.pairs.size(), 2u);
    EXPECT_EQ(p3.pairs[0].upper_tow_lower_boundary, 1u);
    EXPECT_EQ(p3.pairs[0].lower_tow_upper_boundary, 2u);
    EXPECT_EQ(p3.pairs[1].upper_tow_lower_boundary, 3u);
    EXPECT_EQ(p3.pairs[1].lower_tow_upper_boundary, 4u);
}

TEST(Pairing, SharedDomainIsIntersection) {
    std::vector<TowBoundary> b{flat(Polarity::upper, 5, 0, 99), flat(Polarity::lower, 25, 0, 79),
                               flat(Polarity::upper, 27, 20, 99), flat(Polarity::lower, 47, 0, 99)};
    const auto p = pair_boundaries(b);
    ASSERT_EQ(p.pairs.size(), 1u);
    EXPECT_EQ(p.pairs[0].x0, 20);
    EXPECT_EQ(p.pairs[0].x1, 79);
}

TEST(Assemble, ConflictResolvesToOverlap) {
    std::vector<std::vector<Contribution>> cs{
        {{{1, 1}, DefectClass::gap}, {{2, 1}, DefectClass::gap}},
        {{{2, 1}, DefectClass::overlap}, {{3, 1}, DefectClass::overlap}},
    };
    const auto m = assemble_mask(cs, 5, 3);
    EXPECT_EQ(m.conflict_pixels, 1u);
    EXPECT_EQ(m.mask.at(1, 1), DefectClass::gap);
    EXPECT_EQ(m.mask.at(2, 1), DefectClass::overlap);
    EXPECT_EQ(m.mask.at(3, 1), DefectClass::overlap);
    EXPECT_EQ(m.mask.at(0, 0), DefectClass::neutral);
    EXPECT_THROW(assemble_mask({{{{5, 0}, DefectClass::gap}}}, 5, 3), std::out_of_range);
}

TEST(Regions, BandAndAdjacentClasses) {
    DefectMask m(60, 20);
    for (int r = 5; r < 8; ++r) {
        for (int c = 0; c < 50; ++c) m.at(c, r) = DefectClass::gap;
    }
    auto regions = extract_regions(m);
    ASSERT_EQ(regions.size(), 1u);
    EXPECT_EQ(regions[0].area, 150u);
    EXPECT_EQ(regions[0].max_width, 3);
    EXPECT_EQ(regions[0].bbox, (BoundingBox{0, 5, 49, 7}));

    for (int c = 0; c < 50; ++c) m.at(c, 8) = DefectClass::overlap;
    regions = extract_regions(m);
    ASSERT_EQ(regions.size(), 2u);
    EXPECT_EQ(regions[0].cls, DefectClass::gap);
    EXPECT_EQ(regions[1].cls, DefectClass::overlap);
    EXPECT_EQ(regions[1].area, 50u);
    EXPECT_EQ(regions[1].max_width, 1);
    EXPECT_TRUE(extract_regions(DefectMask(4, 4)).empty());
}

TEST(Regions, MaxWidthIsPerColumnExtent) {
    DefectMask m(10, 10);
    // diagonal staircase: 5 rows tall overall, never more than 2 in a column
    for (int k = 0; k < 5; ++k) {
        m.at(k, k) = DefectClass::overlap;
        m.at(k, k + 1) = DefectClass::overlap;
    }
    const auto regions = extract_regions(m);
    ASSERT_EQ(regions.size(), 1u);
    EXPECT_EQ(regions[0].max_width, 2);
    EXPECT_EQ(regions[0].bbox.max_row - regions[0].bbox.min_row + 1, 6);
}

TEST(Regions, MatchFloodFillPerClass) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> dim(1, 48);
    for (int trial = 0; trial < 100; ++trial) {
        const DefectMask m = oracle::random_labels(rng, dim(rng), dim(rng));
        const auto regions = extract_regions(m);
        std::vector<std::pair<DefectClass, std::vector<Pixel>>> expected;
        for (DefectClass cls : {DefectClass::gap, DefectClass::overlap}) {
            for (auto& comp : oracle::flood_components(m, cls)) expected.push_back({cls, comp});
        }
        ASSERT_EQ(regions.size(), expected.size());
        for (std::size_t i = 0; i < regions.size(); ++i) {
            EXPECT_EQ(regions[i].cls, expected[i].first);
            EXPECT_EQ(regions[i].pixels, expected[i].second);
            EXPECT_EQ(regions[i].area, expected[i].second.size());
        }
    }
}
