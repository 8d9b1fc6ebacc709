// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "enerv/model.hpp"
#include "enerv/training.hpp"

// JSON forms of the model and plan configs. Parsing is strict: unknown keys
// and wrong types raise ConfigError naming the dotted key path.

namespace enerv {

using Json = nlohmann::ordered_json;

Json to_json(const FreqEncodingSpec& spec);
Json to_json(const ModelConfig& config);
Json to_json(const TrainPlan& plan);

ModelConfig model_config_from_json(const Json& j, const std::string& path = "model");
TrainPlan train_plan_from_json(const Json& j, const std::string& path = "plan");

/// Sets `dotted.key=value` inside `doc`. The key must already exist; the
/// value is parsed as JSON and falls back to a plain string.
void apply_override(Json& doc, const std::string& assignment);

/// Recursively checks that every key of `doc` exists in `schema` (a document
/// holding all defaults); reports the first unknown key by dotted path.
void check_known_keys(const Json& doc, const Json& schema, const std::string& path = "");

/// Overlays `patch` onto `base` object-wise (arrays and scalars replace).
void merge_into(Json& base, const Json& patch);

}  // namespace enerv
