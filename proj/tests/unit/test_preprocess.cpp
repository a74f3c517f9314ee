#include <gtest/gtest.h>

#include <random>
#include <set>

#include "afp/preprocess.hpp"
#include "afp/synth.hpp"
#include "support/oracles.hpp"

using namespace afp;

namespace {

int isolated_extrema(const DepthMap& img) {
    int count = 0;
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            bool max = true, min = true;
            bool any = false;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if ((dr || dc) && c + dc >= 0 && c + dc < img.width() && r + dr >= 0 && r + dr < img.height()) {
                        any = true;
                        max &= img.at(c, r) > img.at(c + dc, r + dr);
                        min &= img.at(c, r) < img.at(c + dc, r + dr);
                    }
                }
            }
            count += any && (max || min);
        }
    }
    return count;
}

}  // namespace

TEST(Median, ConstantImageUnchanged) {
    DepthMap img(7, 5, std::vector<double>(35, 0.3));
    for (int n : {1, 3, 5}) EXPECT_EQ(median_filter(img, n).raster(), img.raster());
}

TEST(Median, CenterImpulseRemoved) {
    std::vector<double> v(9, 0.0);
    v[4] = 1.0;
    const DepthMap out = median_filter(DepthMap(3, 3, v), 3);
    EXPECT_EQ(out.at(1, 1), 0.0);
}

TEST(Median, WindowOneIsIdentity) {
    std::mt19937_64 rng(1);
    const DepthMap img = oracle::random_depth(rng, 9, 4);
    EXPECT_EQ(median_filter(img, 1).raster(), img.raster());
}

TEST(Median, RejectsBadWindows) {
    const DepthMap img(5, 4, std::vector<double>(20, 0.5));
    EXPECT_THROW(median_filter(img, 4), std::invalid_argument);
    EXPECT_THROW(median_filter(img, 6), std::invalid_argument);
    EXPECT_THROW(median_filter(img, 0), std::invalid_argument);
    EXPECT_THROW(median_filter(img, -3), std::invalid_argument);
    EXPECT_THROW(median_filter(img, 5), std::invalid_argument);  // larger than the 4-row image
    EXPECT_NO_THROW(median_filter(img, 3));
}

TEST(Median, MatchesFullSortOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = (trial % 3) * 2 + 1;
        const DepthMap img = oracle::random_depth(rng, 16, 16, trial % 2 ? 4 : 0);
        ASSERT_EQ(median_filter(img, n).raster(), oracle::median(img, n).raster()) << "trial " << trial;
    }
}

TEST(Median, OutputValuesDrawnFromInput) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const DepthMap img = oracle::random_depth(rng, 12, 10);
        const std::set<double> inputs(img.values().begin(), img.values().end());
        const DepthMap filtered = median_filter(img, 3);
        for (double v : filtered.values()) EXPECT_TRUE(inputs.count(v));
    }
}

TEST(Median, NeverIncreasesIsolatedExtrema) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const DepthMap img = oracle::random_depth(rng, 14, 11);
        EXPECT_LE(isolated_extrema(median_filter(img, 3)), isolated_extrema(img));
    }
}

TEST(Median, SmallWindowKeepsThinFeatureLargeWindowLosesIt) {
    const DepthMap notch = synth::notch_fixture(20, 20, 8, 3);
    const DepthMap n3 = median_filter(notch, 3);
    EXPECT_EQ(n3.raster(), notch.raster());
    const DepthMap n7 = median_filter(notch, 7);
    for (int c = 0; c < 20; ++c) {
        for (int r = 8; r < 11; ++r) EXPECT_NE(n7.at(c, r), notch.at(c, r));
    }
}
