#include "afp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace afp::synth {
namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on the engine's raw output keeps results identical across
// standard library implementations.
double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample(std::mt19937_64& rng, const Range& r) {
    if (r.min == r.max) return r.min;
    return r.min + (r.max - r.min) * uniform01(rng);
}

int sample(std::mt19937_64& rng, const IntRange& r) {
    const auto span = static_cast<std::uint64_t>(r.max - r.min) + 1;
    return r.min + static_cast<int>(rng() % span);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_range(const Range& r, const char* name) {
    if (!(r.min <= r.max)) throw std::invalid_argument(std::string("empty corpus range: ") + name);
}

void mark_between(DefectMask& mask, int col, double from, double to, DefectClass cls) {
    const int first = std::max(0, static_cast<int>(std::floor(from)) + 1);
    const int last = std::min(mask.height() - 1, static_cast<int>(std::ceil(to)) - 1);
    for (int r = first; r <= last; ++r) mask.at(col, r) = cls;
}

}  // namespace

double TowCourse::drift(double x) const {
    if (drift_amplitude == 0.0) return 0.0;
    return drift_amplitude * std::sin(2.0 * std::numbers::pi * x / drift_wavelength + drift_phase);
}

double SceneSpec::nominal_top_row(std::size_t tow) const {
    double top = first_top_row;
    for (std::size_t i = 0; i < tow; ++i) top += tow_height + offsets[i];
    return top;
}

double SceneSpec::upper_edge(std::size_t tow, double x) const {
    return nominal_top_row(tow) + tows[tow].drift(x);
}

double SceneSpec::lower_edge(std::size_t tow, double x) const {
    return upper_edge(tow, x) + tow_height;
}

void SceneSpec::validate() const {
    if (width < 3 || height < 3) throw std::invalid_argument("scene must be at least 3x3");
    if (!(tow_height > 0.0)) throw std::invalid_argument("tow_height must be positive");
    if (!(background_intensity >= 0.0 && tow_intensity <= 1.0 &&
          tow_intensity > background_intensity)) {
        throw std::invalid_argument("need 0 <= background_intensity < tow_intensity <= 1");
    }
    if (tows.empty()) throw std::invalid_argument("scene needs at least one tow");
    if (offsets.size() + 1 != tows.size()) {
        throw std::invalid_argument("offsets must have one entry per adjacent tow pair");
    }
    for (double o : offsets) {
        if (!(o > -tow_height)) {
            throw std::invalid_argument("offset " + std::to_string(o) +
                                        " would reorder tows (must exceed -tow_height)");
        }
    }
    for (const auto& t : tows) {
        if (!(t.drift_amplitude >= 0.0) || !(t.drift_wavelength > 0.0)) {
            throw std::invalid_argument("drift amplitude must be >= 0 and wavelength > 0");
        }
    }
    if (!(salt_pepper_density >= 0.0 && salt_pepper_density < 1.0)) {
        throw std::invalid_argument("salt_pepper_density must be in [0,1)");
    }
    if (!(texture_sigma >= 0.0)) throw std::invalid_argument("texture_sigma must be >= 0");
    if (!(defect_tolerance >= 0.0)) throw std::invalid_argument("defect_tolerance must be >= 0");
    for (int x = 0; x < width; ++x) {
        if (upper_edge(0, x) < 0.0 || lower_edge(tows.size() - 1, x) > height - 1.0) {
            throw std::invalid_argument("tows exceed image bounds at column " + std::to_string(x));
        }
    }
    // Stacking beyond two layers would require tows to cross.
    for (std::size_t i = 0; i + 1 < tows.size(); ++i) {
        for (int x = 0; x < width; ++x) {
            if (upper_edge(i + 1, x) <= upper_edge(i, x)) {
                throw std::invalid_argument("tow " + std::to_string(i + 1) +
                                            " rises above tow " + std::to_string(i));
            }
        }
    }
}

DefectMask truth_mask(const SceneSpec& spec) {
    DefectMask mask(spec.width, spec.height, DefectClass::neutral);
    for (std::size_t i = 0; i + 1 < spec.tows.size(); ++i) {
        for (int x = 0; x < spec.width; ++x) {
            const double y_lower = spec.lower_edge(i, x);
            const double y_upper = spec.upper_edge(i + 1, x);
            const double w = y_upper - y_lower;
            if (w > spec.defect_tolerance) {
                mark_between(mask, x, y_lower, y_upper, DefectClass::gap);
            } else if (w < -spec.defect_tolerance) {
                mark_between(mask, x, y_upper, y_lower, DefectClass::overlap);
            }
        }
    }
    return mask;
}

Scene generate(const SceneSpec& spec) {
    spec.validate();
    const double layer = spec.tow_intensity - spec.background_intensity;
    Raster<double> pixels(spec.width, spec.height, spec.background_intensity);
    for (int x = 0; x < spec.width; ++x) {
        for (std::size_t i = 0; i < spec.tows.size(); ++i) {
            const double top = spec.upper_edge(i, x);
            const double bottom = top + spec.tow_height;
            const int first = std::max(0, static_cast<int>(std::floor(top + 0.5)));
            const int last = std::min(spec.height - 1, static_cast<int>(std::ceil(bottom - 0.5)));
            for (int r = first; r <= last; ++r) {
                const double cover = std::min(r + 0.5, bottom) - std::max(r - 0.5, top);
                if (cover > 0.0) pixels.at(x, r) += layer * cover;
            }
        }
    }

    std::mt19937_64 rng(spec.seed);
    const bool texture = spec.texture_sigma > 0.0;
    const bool salt_pepper = spec.salt_pepper_density > 0.0;
    for (double& v : pixels.values()) {
        if (texture) v += spec.texture_sigma * standard_normal(rng);
        v = std::clamp(v, 0.0, 1.0);
        if (salt_pepper) {
            const double u = uniform01(rng);
            if (u < spec.salt_pepper_density / 2.0) {
                v = 0.0;
            } else if (u < spec.salt_pepper_density) {
                v = 1.0;
            }
        }
    }

    Scene scene;
    scene.spec = spec;
    scene.image = DepthMap(std::move(pixels));
    scene.truth = truth_mask(spec);
    for (std::size_t i = 0; i < spec.tows.size(); ++i) {
        BoundaryCurve upper{Polarity::upper, static_cast<int>(i), 0, {}};
        BoundaryCurve lower{Polarity::lower, static_cast<int>(i), 0, {}};
        for (int x = 0; x < spec.width; ++x) {
            upper.rows.push_back(spec.upper_edge(i, x));
            lower.rows.push_back(spec.lower_edge(i, x));
        }
        scene.curves.push_back(std::move(upper));
        scene.curves.push_back(std::move(lower));
    }
    return scene;
}

void CorpusSpec::validate() const {
    if (count < 1) throw std::invalid_argument("corpus count must be >= 1");
    if (tow_count < 1) throw std::invalid_argument("corpus tow_count must be >= 1");
    check_range(tow_height, "tow_height");
    check_range(tow_intensity, "tow_intensity");
    check_range(background_intensity, "background_intensity");
    check_range(first_top_row, "first_top_row");
    check_range(drift_amplitude, "drift_amplitude");
    check_range(drift_wavelength, "drift_wavelength");
    check_range(salt_pepper_density, "salt_pepper_density");
    check_range(texture_sigma, "texture_sigma");
    if (offset.min > offset.max) throw std::invalid_argument("empty corpus range: offset");
    if (!(defect_tolerance >= 0.0)) throw std::invalid_argument("defect_tolerance must be >= 0");
}

std::vector<SceneSpec> corpus(const CorpusSpec& ranges) {
    ranges.validate();
    std::vector<SceneSpec> specs;
    specs.reserve(static_cast<std::size_t>(ranges.count));
    for (int n = 0; n < ranges.count; ++n) {
        const std::uint64_t scene_seed = splitmix64(ranges.seed ^ splitmix64(static_cast<std::uint64_t>(n)));
        std::mt19937_64 rng(scene_seed);
        SceneSpec s;
        s.width = ranges.width;
        s.height = ranges.height;
        s.tow_height = sample(rng, ranges.tow_height);
        s.tow_intensity = sample(rng, ranges.tow_intensity);
        s.background_intensity = sample(rng, ranges.background_intensity);
        s.first_top_row = sample(rng, ranges.first_top_row);
        for (int t = 0; t < ranges.tow_count; ++t) {
            TowCourse course;
            course.drift_amplitude = sample(rng, ranges.drift_amplitude);
            course.drift_wavelength = sample(rng, ranges.drift_wavelength);
            course.drift_phase = 2.0 * std::numbers::pi * uniform01(rng);
            s.tows.push_back(course);
        }
        for (int t = 0; t + 1 < ranges.tow_count; ++t) {
            s.offsets.push_back(sample(rng, ranges.offset));
        }
        s.salt_pepper_density = sample(rng, ranges.salt_pepper_density);
        s.texture_sigma = sample(rng, ranges.texture_sigma);
        s.defect_tolerance = ranges.defect_tolerance;
        s.seed = splitmix64(scene_seed);
        s.validate();
        specs.push_back(std::move(s));
    }
    return specs;
}

DepthMap notch_fixture(int width, int height, int step_row, int notch_rows, double tow,
                       double background) {
    Raster<double> px(width, height, tow);
    for (int r = std::max(0, step_row); r < std::min(height, step_row + notch_rows); ++r) {
        for (int c = 0; c < width; ++c) px.at(c, r) = background;
    }
    return DepthMap(std::move(px));
}

DepthMap step_fixture(int width, int height, int step_row, double above, double below) {
    Raster<double> px(width, height, above);
    for (int r = std::max(0, step_row); r < height; ++r) {
        for (int c = 0; c < width; ++c) px.at(c, r) = below;
    }
    return DepthMap(std::move(px));
}

}  // namespace afp::synth
