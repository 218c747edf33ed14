// Copyright 2026 The slicekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <vector>

#include "json.hpp"
#include "slicekit/dataset_slicer.hpp"
#include "slicekit/eval.hpp"
#include "slicekit/oracle_detector.hpp"
#include "slicekit/pipeline.hpp"
#include "slicekit/synthbench.hpp"

// JSON views of the configuration structs, used by manifests, benchmark
// reports and --configs files. Readers accept partial objects: missing
// keys keep their defaults, unknown keys raise ParseError.
namespace slicekit {

nlohmann::ordered_json to_json(const GridSpec& spec);
nlohmann::ordered_json to_json(const MergeConfig& config);
nlohmann::ordered_json to_json(const PipelineConfig& config);
nlohmann::ordered_json to_json(const VisibilityModel& model);
nlohmann::ordered_json to_json(const SceneConfig& config);
nlohmann::ordered_json to_json(const SliceJobConfig& config);
nlohmann::ordered_json to_json(const EvalConfig& config);

PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         PipelineConfig base = {});
VisibilityModel visibility_from_json(const nlohmann::json& j,
                                     VisibilityModel base = {});
SceneConfig scene_config_from_json(const nlohmann::json& j, SceneConfig base = {});

/// [{"label": "...", ...pipeline keys...}, ...]
std::vector<LabeledConfig> labeled_configs_from_json(const nlohmann::json& j);

}  // namespace slicekit
