#include "afp/report.hpp"

#include <set>
#include <stdexcept>

namespace afp {
namespace {

Json counts_to_json(const ClassCounts& c) {
    return Json{{"intersection", c.intersection}, {"union", c.union_}, {"pred", c.pred}, {"gt", c.gt}};
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("\"" + key + "\": " + e.what());
    }
}

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = get_as<T>(j, key);
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw std::invalid_argument(std::string("unknown ") + what + " key \"" + item.key() + "\"");
        }
    }
}

Json range_to_json(const synth::Range& r) { return Json::array({r.min, r.max}); }
Json range_to_json(const synth::IntRange& r) { return Json::array({r.min, r.max}); }

// Accepts [min, max] or a single number for a degenerate range.
template <typename R>
void read_range(const Json& j, const char* key, R& out) {
    if (!j.contains(key)) return;
    const Json& v = j.at(key);
    using V = decltype(out.min);
    try {
        if (v.is_array()) {
            if (v.size() != 2) throw std::invalid_argument("expected [min, max]");
            out.min = v[0].get<V>();
            out.max = v[1].get<V>();
        } else {
            out.min = out.max = v.get<V>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("\"") + key + "\": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("\"") + key + "\": " + e.what());
    }
}

}  // namespace

Json params_to_json(const PipelineParams& p) {
    Json j;
    j["median"] = p.median_window;
    j["sigma"] = p.canny.sigma;
    j["canny-low"] = p.canny.low_ratio;
    j["canny-high"] = p.canny.high_ratio;
    j["se-length"] = p.se_length;
    j["alpha-x"] = p.grouping.alpha_x;
    j["alpha-y"] = p.grouping.alpha_y;
    j["d-th"] = p.grouping.d_th;
    j["spline-s"] = p.spline_s ? Json(*p.spline_s) : Json("auto");
    j["tolerance"] = p.tolerance;
    j["min-boundary-span"] = p.min_boundary_span;
    return j;
}

void apply_params_json(const Json& config, PipelineParams& p) {
    reject_unknown(config,
                   {"median", "sigma", "canny-low", "canny-high", "se-length", "alpha-x", "alpha-y",
                    "d-th", "spline-s", "tolerance", "min-boundary-span", "jobs", "seed", "stages",
                    "timing"},
                   "config");
    read_optional(config, "median", p.median_window);
    read_optional(config, "sigma", p.canny.sigma);
    read_optional(config, "canny-low", p.canny.low_ratio);
    read_optional(config, "canny-high", p.canny.high_ratio);
    read_optional(config, "se-length", p.se_length);
    read_optional(config, "alpha-x", p.grouping.alpha_x);
    read_optional(config, "alpha-y", p.grouping.alpha_y);
    read_optional(config, "d-th", p.grouping.d_th);
    read_optional(config, "tolerance", p.tolerance);
    read_optional(config, "min-boundary-span", p.min_boundary_span);
    if (config.contains("spline-s")) {
        const Json& s = config.at("spline-s");
        if (s.is_string() && s.get<std::string>() == "auto") {
            p.spline_s.reset();
        } else {
            p.spline_s = get_as<double>(config, "spline-s");
        }
    }
}

Json inspect_report(const InspectResult& r, const PipelineParams& params, std::optional<double> timing_ms) {
    Json j;
    j["params"] = params_to_json(params);
    j["width"] = r.mask.width();
    j["height"] = r.mask.height();

    Json boundaries = Json::array();
    for (const auto& b : r.boundaries) {
        Json knots = Json::array();
        for (const Knot& k : b.knots) knots.push_back(Json::array({k.x, k.y}));
        boundaries.push_back({{"polarity", to_string(b.polarity)},
                              {"group_id", b.group_id},
                              {"domain", Json::array({b.x_min, b.x_max})},
                              {"smoothing", b.spline.smoothing()},
                              {"knots", std::move(knots)}});
    }
    j["boundaries"] = std::move(boundaries);

    Json pairs = Json::array();
    for (const auto& p : r.pairing.pairs) {
        pairs.push_back({{"upper_tow_lower_boundary", p.upper_tow_lower_boundary},
                         {"lower_tow_upper_boundary", p.lower_tow_upper_boundary},
                         {"domain", Json::array({p.x0, p.x1})}});
    }
    j["pairs"] = std::move(pairs);
    j["unpaired_boundaries"] = r.pairing.unpaired;

    Json defects = Json::array();
    for (const auto& d : r.defects) {
        defects.push_back({{"class", to_string(d.cls)},
                           {"bbox", Json::array({d.bbox.min_col, d.bbox.min_row, d.bbox.max_col, d.bbox.max_row})},
                           {"area_px", d.area},
                           {"max_width_px", d.max_width}});
    }
    j["defects"] = std::move(defects);
    j["conflict_pixels"] = r.conflict_pixels;
    j["warnings"] = r.warnings;
    if (timing_ms) j["timing_ms"] = *timing_ms;
    return j;
}

Json eval_to_json(const EvalReport& e) {
    Json confusion = Json::array();
    for (const auto& row : e.confusion) confusion.push_back(Json(row));
    return Json{{"iou_gap", e.iou_gap},
                {"iou_overlap", e.iou_overlap},
                {"mean_iou", e.mean_iou},
                {"gap", counts_to_json(e.gap)},
                {"overlap", counts_to_json(e.overlap)},
                {"confusion", std::move(confusion)}};
}

Json summary_to_json(const BatchSummary& s) {
    return Json{{"scored", s.scored},
                {"macro", {{"iou_gap", s.macro_iou_gap}, {"iou_overlap", s.macro_iou_overlap},
                           {"mean_iou", s.macro_mean_iou}}},
                {"micro", {{"iou_gap", s.micro_iou_gap}, {"iou_overlap", s.micro_iou_overlap},
                           {"mean_iou", s.micro_mean_iou}}},
                {"gap", counts_to_json(s.gap)},
                {"overlap", counts_to_json(s.overlap)}};
}

Json scene_spec_to_json(const synth::SceneSpec& s) {
    Json tows = Json::array();
    for (const auto& t : s.tows) {
        tows.push_back({{"drift_amplitude", t.drift_amplitude},
                        {"drift_wavelength", t.drift_wavelength},
                        {"drift_phase", t.drift_phase}});
    }
    return Json{{"width", s.width},
                {"height", s.height},
                {"tow_height", s.tow_height},
                {"tow_intensity", s.tow_intensity},
                {"background_intensity", s.background_intensity},
                {"first_top_row", s.first_top_row},
                {"tows", std::move(tows)},
                {"offsets", s.offsets},
                {"salt_pepper_density", s.salt_pepper_density},
                {"texture_sigma", s.texture_sigma},
                {"defect_tolerance", s.defect_tolerance},
                {"seed", s.seed}};
}

synth::SceneSpec scene_spec_from_json(const Json& j) {
    reject_unknown(j,
                   {"width", "height", "tow_height", "tow_intensity", "background_intensity",
                    "first_top_row", "tows", "offsets", "salt_pepper_density", "texture_sigma",
                    "defect_tolerance", "seed"},
                   "scene spec");
    synth::SceneSpec s;
    read_optional(j, "width", s.width);
    read_optional(j, "height", s.height);
    read_optional(j, "tow_height", s.tow_height);
    read_optional(j, "tow_intensity", s.tow_intensity);
    read_optional(j, "background_intensity", s.background_intensity);
    read_optional(j, "first_top_row", s.first_top_row);
    read_optional(j, "offsets", s.offsets);
    read_optional(j, "salt_pepper_density", s.salt_pepper_density);
    read_optional(j, "texture_sigma", s.texture_sigma);
    read_optional(j, "defect_tolerance", s.defect_tolerance);
    read_optional(j, "seed", s.seed);
    if (j.contains("tows")) {
        const Json& tows = j.at("tows");
        if (tows.is_number_integer()) {
            s.tows.assign(tows.get<std::size_t>(), synth::TowCourse{});
        } else if (tows.is_array()) {
            for (const Json& t : tows) {
                reject_unknown(t, {"drift_amplitude", "drift_wavelength", "drift_phase"}, "tow");
                synth::TowCourse c;
                read_optional(t, "drift_amplitude", c.drift_amplitude);
                read_optional(t, "drift_wavelength", c.drift_wavelength);
                read_optional(t, "drift_phase", c.drift_phase);
                s.tows.push_back(c);
            }
        } else {
            throw std::invalid_argument("\"tows\" must be a count or a list of tow courses");
        }
    }
    s.validate();
    return s;
}

Json corpus_spec_to_json(const synth::CorpusSpec& c) {
    return Json{{"count", c.count},
                {"seed", c.seed},
                {"width", c.width},
                {"height", c.height},
                {"tow_count", c.tow_count},
                {"tow_height", range_to_json(c.tow_height)},
                {"tow_intensity", range_to_json(c.tow_intensity)},
                {"background_intensity", range_to_json(c.background_intensity)},
                {"first_top_row", range_to_json(c.first_top_row)},
                {"drift_amplitude", range_to_json(c.drift_amplitude)},
                {"drift_wavelength", range_to_json(c.drift_wavelength)},
                {"offset", range_to_json(c.offset)},
                {"salt_pepper_density", range_to_json(c.salt_pepper_density)},
                {"texture_sigma", range_to_json(c.texture_sigma)},
                {"defect_tolerance", c.defect_tolerance}};
}

synth::CorpusSpec corpus_spec_from_json(const Json& j) {
    reject_unknown(j,
                   {"count", "seed", "width", "height", "tow_count", "tow_height", "tow_intensity",
                    "background_intensity", "first_top_row", "drift_amplitude", "drift_wavelength",
                    "offset", "salt_pepper_density", "texture_sigma", "defect_tolerance"},
                   "corpus spec");
    synth::CorpusSpec c;
    read_optional(j, "count", c.count);
    read_optional(j, "seed", c.seed);
    read_optional(j, "width", c.width);
    read_optional(j, "height", c.height);
    read_optional(j, "tow_count", c.tow_count);
    read_range(j, "tow_height", c.tow_height);
    read_range(j, "tow_intensity", c.tow_intensity);
    read_range(j, "background_intensity", c.background_intensity);
    read_range(j, "first_top_row", c.first_top_row);
    read_range(j, "drift_amplitude", c.drift_amplitude);
    read_range(j, "drift_wavelength", c.drift_wavelength);
    read_range(j, "offset", c.offset);
    read_range(j, "salt_pepper_density", c.salt_pepper_density);
    read_range(j, "texture_sigma", c.texture_sigma);
    read_optional(j, "defect_tolerance", c.defect_tolerance);
    c.validate();
    return c;
}

Json curves_to_json(const std::vector<BoundaryCurve>& curves) {
    Json out = Json::array();
    for (const auto& c : curves) {
        out.push_back({{"polarity", to_string(c.polarity)},
                       {"tow", c.tow},
                       {"first_col", c.first_col},
                       {"rows", c.rows}});
    }
    return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace afp
