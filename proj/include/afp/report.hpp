#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "afp/evaluation.hpp"
#include "afp/pipeline.hpp"
#include "afp/synth.hpp"

namespace afp {

using Json = nlohmann::ordered_json;

/// Keys are the CLI flag names without the leading dashes.
Json params_to_json(const PipelineParams& params);

/// Applies every recognized key of `config` onto `params`. Unknown keys and
/// wrongly typed values throw std::invalid_argument.
void apply_params_json(const Json& config, PipelineParams& params);

Json inspect_report(const InspectResult& result, const PipelineParams& params,
                    std::optional<double> timing_ms = std::nullopt);

Json eval_to_json(const EvalReport& report);
Json summary_to_json(const BatchSummary& summary);

Json scene_spec_to_json(const synth::SceneSpec& spec);
synth::SceneSpec scene_spec_from_json(const Json& j);
Json corpus_spec_to_json(const synth::CorpusSpec& spec);
synth::CorpusSpec corpus_spec_from_json(const Json& j);

Json curves_to_json(const std::vector<BoundaryCurve>& curves);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace afp
