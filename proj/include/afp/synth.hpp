#pragma once

#include <cstdint>
#include <vector>

#include "afp/raster.hpp"

namespace afp::synth {

/// Sinusoidal course deviation of one tow: drift(x) = A sin(2 pi x / wavelength + phase).
struct TowCourse {
    double drift_amplitude = 0.0;
    double drift_wavelength = 128.0;
    double drift_phase = 0.0;

    double drift(double x) const;
};

/// Synthetic layup: horizontal bright bands (tows) on a darker background.
///
/// Tow i occupies the continuous row interval [top_i(x), top_i(x) + tow_height].
/// Consecutive tows are placed `offsets[i]` rows apart (edge to edge) before
/// drift: positive leaves a gap, negative makes them overlap.
struct SceneSpec {
    int width = 256;
    int height = 128;
    double tow_height = 24.0;
    double tow_intensity = 0.55;
    double background_intensity = 0.2;
    double first_top_row = 16.0;
    std::vector<TowCourse> tows;
    std::vector<double> offsets;  // tows.size() - 1 entries
    double salt_pepper_density = 0.0;
    double texture_sigma = 0.0;
    /// Columns whose edge-to-edge separation is within +-defect_tolerance rows
    /// are not defects and stay neutral in the truth mask.
    double defect_tolerance = 0.0;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when an invariant or the image bounds are violated.
    void validate() const;

    double nominal_top_row(std::size_t tow) const;
    double upper_edge(std::size_t tow, double x) const;
    double lower_edge(std::size_t tow, double x) const;
};

struct Scene {
    SceneSpec spec;
    DepthMap image;
    DefectMask truth;
    std::vector<BoundaryCurve> curves;  // upper and lower edge of every tow
};

/// Renders the scene with area-weighted row coverage (stacked tows add
/// height), derives the truth mask from geometry alone, then applies texture
/// and salt-and-pepper noise. Deterministic for a fixed spec.
Scene generate(const SceneSpec& spec);

/// Truth classes: rows strictly between a tow's lower edge and the next tow's
/// upper edge are gap when the next tow starts more than defect_tolerance rows
/// below, overlap when it starts more than defect_tolerance rows above.
DefectMask truth_mask(const SceneSpec& spec);

struct Range {
    double min = 0.0;
    double max = 0.0;
};

struct IntRange {
    int min = 0;
    int max = 0;
};

/// Parameter ranges sampled uniformly per scene.
struct CorpusSpec {
    int count = 10;
    std::uint64_t seed = 0;
    int width = 256;
    int height = 128;
    int tow_count = 3;
    Range tow_height{24.0, 24.0};
    Range tow_intensity{0.55, 0.55};
    Range background_intensity{0.2, 0.2};
    Range first_top_row{16.0, 16.0};
    Range drift_amplitude{0.0, 2.0};
    Range drift_wavelength{64.0, 256.0};
    IntRange offset{-4, 4};
    Range salt_pepper_density{0.0, 0.0};
    Range texture_sigma{0.0, 0.0};
    double defect_tolerance = 0.0;

    void validate() const;
};

/// Reproducible list of scene specs (the manifest) drawn from `ranges`.
std::vector<SceneSpec> corpus(const CorpusSpec& ranges);

/// Bright rows everywhere except a thin background notch of `notch_rows` rows
/// starting at `step_row`.
DepthMap notch_fixture(int width, int height, int step_row, int notch_rows, double tow = 0.8,
                       double background = 0.2);

/// Rows above `step_row` at `above`, rows from `step_row` on at `below`.
DepthMap step_fixture(int width, int height, int step_row, double above, double below);

}  // namespace afp::synth
