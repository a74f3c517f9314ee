#include "afp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "afp/evaluation.hpp"
#include "afp/image_io.hpp"
#include "afp/pipeline.hpp"
#include "afp/render.hpp"
#include "afp/report.hpp"
#include "afp/synth.hpp"

namespace afp::cli {
namespace fs = std::filesystem;
namespace {

struct ParamFlags {
    std::optional<int> median;
    std::optional<double> sigma;
    std::optional<double> canny_low;
    std::optional<double> canny_high;
    std::optional<int> se_length;
    std::optional<double> alpha_x;
    std::optional<double> alpha_y;
    std::optional<double> d_th;
    std::optional<double> spline_s;
    std::optional<double> tolerance;
    std::string config;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--median", f.median, "median window N (odd, 0 disables; default 3)");
    cmd->add_option("--sigma", f.sigma, "Canny Gaussian sigma in px (default 1)");
    cmd->add_option("--canny-low", f.canny_low, "low hysteresis threshold, fraction of the P90 anchor");
    cmd->add_option("--canny-high", f.canny_high, "high hysteresis threshold, fraction of the P90 anchor");
    cmd->add_option("--se-length", f.se_length, "horizontal structuring element length (default 5)");
    cmd->add_option("--alpha-x", f.alpha_x, "horizontal distance weight (default 1)");
    cmd->add_option("--alpha-y", f.alpha_y, "vertical distance weight (default 4)");
    cmd->add_option("--d-th", f.d_th, "grouping distance threshold (default 30)");
    cmd->add_option("--spline-s", f.spline_s, "spline smoothing factor (default: estimated per boundary)");
    cmd->add_option("--tolerance", f.tolerance, "defect width tolerance in px (default 1)");
    cmd->add_option("--config", f.config, "JSON file with any of the flags above; flags win");
}

Json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    return read_json_file(path);
}

PipelineParams resolve_params(const ParamFlags& f, const Json& config) {
    PipelineParams p;
    apply_params_json(config, p);
    if (f.median) p.median_window = *f.median;
    if (f.sigma) p.canny.sigma = *f.sigma;
    if (f.canny_low) p.canny.low_ratio = *f.canny_low;
    if (f.canny_high) p.canny.high_ratio = *f.canny_high;
    if (f.se_length) p.se_length = *f.se_length;
    if (f.alpha_x) p.grouping.alpha_x = *f.alpha_x;
    if (f.alpha_y) p.grouping.alpha_y = *f.alpha_y;
    if (f.d_th) p.grouping.d_th = *f.d_th;
    if (f.spline_s) p.spline_s = *f.spline_s;
    if (f.tolerance) p.tolerance = *f.tolerance;
    p.validate();
    return p;
}

template <typename T>
T flag_or_config(const CLI::Option* opt, const T& flag, const Json& config, const char* key, T fallback) {
    if (opt->count() > 0) return flag;
    if (config.contains(key)) return config.at(key).get<T>();
    return fallback;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
    const auto workers = static_cast<std::size_t>(std::clamp<std::size_t>(
        static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void write_inspection(const fs::path& out_dir, const DepthMap& image, const InspectResult& r,
                      const PipelineParams& params, bool stages, std::optional<double> timing_ms) {
    fs::create_directories(out_dir);
    if (stages) {
        save_depth_png(r.filtered, out_dir / "01_median.png", 8);
        save_binary_png(r.edges, out_dir / "02_edges.png");
        save_binary_png(r.opened, out_dir / "03_opened.png");
        save_rgb_png(render_polarity(r.polarity), out_dir / "04_polarity.png");
        save_rgb_png(render_groups(image.width(), image.height(), r.upper_regions, r.upper_groups,
                                   r.lower_regions, r.lower_groups),
                     out_dir / "05_groups.png");
        save_rgb_png(render_boundaries(image, r.boundaries), out_dir / "06_boundaries.png");
    }
    save_overlay_png(image, r.mask, out_dir / "07_defects.png");
    save_mask_png(r.mask, out_dir / "mask.png");
    write_file_atomic(out_dir / "report.json", dump(inspect_report(r, params, timing_ms)));
}

void write_scene(const fs::path& dir, const synth::Scene& scene) {
    fs::create_directories(dir);
    save_depth_png(scene.image, dir / "scene.png", 16);
    save_mask_png(scene.truth, dir / "truth.png");
    write_file_atomic(dir / "truth_curves.json", dump(curves_to_json(scene.curves)));
    write_file_atomic(dir / "manifest.json", dump(scene_spec_to_json(scene.spec)));
}

std::string scene_dir_name(std::size_t i) {
    std::ostringstream name;
    name << "scene_" << std::setw(3) << std::setfill('0') << i;
    return name.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gap and overlap segmentation for AFP depth scans", "afpinspect"};
    app.require_subcommand(1);

    // inspect
    auto* inspect_cmd = app.add_subcommand("inspect", "segment gaps and overlaps in one depth map");
    std::string input;
    std::string inspect_out;
    bool stages = false;
    bool timing = false;
    ParamFlags inspect_flags;
    inspect_cmd->add_option("input", input, "grayscale PNG or PGM depth map")->required();
    inspect_cmd->add_option("--out", inspect_out, "output directory")->required();
    auto* stages_opt = inspect_cmd->add_flag("--stages", stages, "also write 01_median.png .. 06_boundaries.png");
    auto* timing_opt = inspect_cmd->add_flag("--timing", timing, "record wall time in report.json");
    add_param_flags(inspect_cmd, inspect_flags);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score a predicted label mask against ground truth");
    std::string pred_path;
    std::string gt_path;
    eval_cmd->add_option("--pred", pred_path, "predicted label PNG")->required();
    eval_cmd->add_option("--gt", gt_path, "ground-truth label PNG")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene or corpus");
    std::string spec_path;
    std::string synth_out;
    std::uint64_t seed = 0;
    int synth_jobs = 1;
    synth_cmd->add_option("--spec", spec_path, "scene or corpus spec (JSON)")->required();
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    auto* seed_opt = synth_cmd->add_option("--seed", seed, "overrides the seed in the spec");
    synth_cmd->add_option("--jobs", synth_jobs, "worker threads for corpora")->check(CLI::PositiveNumber);

    // batch
    auto* batch_cmd = app.add_subcommand("batch", "inspect and score every scene of a synth corpus");
    std::string batch_dir;
    std::string batch_out;
    int batch_jobs = 1;
    ParamFlags batch_flags;
    batch_cmd->add_option("dir", batch_dir, "directory of scene_*/ subdirectories")->required();
    batch_cmd->add_option("--out", batch_out, "optional directory for per-scene outputs and batch.json");
    auto* jobs_opt = batch_cmd->add_option("--jobs", batch_jobs, "worker threads")->check(CLI::PositiveNumber);
    add_param_flags(batch_cmd, batch_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kParameterError;
    }

    try {
        if (inspect_cmd->parsed()) {
            const Json config = load_config(inspect_flags.config);
            const PipelineParams params = resolve_params(inspect_flags, config);
            const bool dump_stages = flag_or_config(stages_opt, stages, config, "stages", false);
            const bool with_timing = flag_or_config(timing_opt, timing, config, "timing", false);
            const DepthMap image = load_depth_map(input);
            const auto t0 = std::chrono::steady_clock::now();
            const InspectResult r = inspect(image, params);
            const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - t0;
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            write_inspection(inspect_out, image, r, params, dump_stages,
                             with_timing ? std::optional<double>(elapsed.count()) : std::nullopt);
            return kOk;
        }

        if (eval_cmd->parsed()) {
            const DefectMask pred = load_label_mask(pred_path);
            const DefectMask gt = load_label_mask(gt_path);
            out << dump(eval_to_json(evaluate(pred, gt)));
            return kOk;
        }

        if (synth_cmd->parsed()) {
            const Json spec = read_json_file(spec_path);
            const fs::path root(synth_out);
            if (spec.is_object() && spec.contains("count")) {
                synth::CorpusSpec corpus_spec = corpus_spec_from_json(spec);
                if (seed_opt->count() > 0) corpus_spec.seed = seed;
                const std::vector<synth::SceneSpec> scenes = synth::corpus(corpus_spec);
                fs::create_directories(root);
                parallel_for(scenes.size(), synth_jobs, [&](std::size_t i) {
                    write_scene(root / scene_dir_name(i), synth::generate(scenes[i]));
                });
                Json manifest = corpus_spec_to_json(corpus_spec);
                Json list = Json::array();
                for (std::size_t i = 0; i < scenes.size(); ++i) {
                    list.push_back({{"dir", scene_dir_name(i)}, {"spec", scene_spec_to_json(scenes[i])}});
                }
                manifest = Json{{"corpus", std::move(manifest)}, {"scenes", std::move(list)}};
                write_file_atomic(root / "manifest.json", dump(manifest));
            } else {
                synth::SceneSpec scene_spec = scene_spec_from_json(spec);
                if (seed_opt->count() > 0) scene_spec.seed = seed;
                write_scene(root, synth::generate(scene_spec));
            }
            return kOk;
        }

        if (batch_cmd->parsed()) {
            const Json config = load_config(batch_flags.config);
            const PipelineParams params = resolve_params(batch_flags, config);
            const int jobs = flag_or_config(jobs_opt, batch_jobs, config, "jobs", 1);
            if (jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
            const fs::path dir(batch_dir);
            if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

            std::vector<fs::path> scene_dirs;
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (entry.is_directory()) scene_dirs.push_back(entry.path());
            }
            std::sort(scene_dirs.begin(), scene_dirs.end());

            struct Outcome {
                std::optional<EvalReport> report;
                std::size_t defects = 0;
                std::size_t boundaries = 0;
                std::vector<std::string> warnings;
                std::string skipped_reason;
            };
            std::vector<Outcome> outcomes(scene_dirs.size());
            parallel_for(scene_dirs.size(), jobs, [&](std::size_t i) {
                Outcome& o = outcomes[i];
                try {
                    const DepthMap image = load_depth_map(scene_dirs[i] / "scene.png");
                    const DefectMask truth = load_label_mask(scene_dirs[i] / "truth.png");
                    const InspectResult r = inspect(image, params);
                    o.report = evaluate(r.mask, truth);
                    o.defects = r.defects.size();
                    o.boundaries = r.boundaries.size();
                    o.warnings = r.warnings;
                    if (!batch_out.empty()) {
                        write_inspection(fs::path(batch_out) / scene_dirs[i].filename(), image, r, params,
                                         false, std::nullopt);
                    }
                } catch (const std::exception& e) {
                    o.report.reset();
                    o.skipped_reason = e.what();
                }
            });

            Json scenes = Json::array();
            Json skipped = Json::array();
            std::vector<EvalReport> scored;
            for (std::size_t i = 0; i < scene_dirs.size(); ++i) {
                const std::string name = scene_dirs[i].filename().string();
                const Outcome& o = outcomes[i];
                if (!o.report) {
                    skipped.push_back({{"scene", name}, {"reason", o.skipped_reason}});
                    err << "warning: skipped " << name << ": " << o.skipped_reason << "\n";
                    continue;
                }
                scored.push_back(*o.report);
                scenes.push_back({{"scene", name},
                                  {"boundaries", o.boundaries},
                                  {"defects", o.defects},
                                  {"warnings", o.warnings},
                                  {"eval", eval_to_json(*o.report)}});
            }
            Json result{{"params", params_to_json(params)},
                        {"scenes", std::move(scenes)},
                        {"skipped", std::move(skipped)},
                        {"summary", summary_to_json(aggregate(scored))}};
            const std::string text = dump(result);
            if (!batch_out.empty()) {
                fs::create_directories(batch_out);
                write_file_atomic(fs::path(batch_out) / "batch.json", text);
            }
            out << text;
            return kOk;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kParameterError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kParameterError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace afp::cli
