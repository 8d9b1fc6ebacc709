// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "enerv/model.hpp"
#include "enerv/training.hpp"

namespace enerv {

inline constexpr const char* kLibraryVersion = "enerv 0.1.0";

/// Archive layout: 8-byte magic, little-endian u64 header length, a JSON
/// header (config, seed, version, parameter index, optional plan and trainer
/// state), then raw float32 parameter data, Adam moments and uint8 masks.
void save_checkpoint(const std::filesystem::path& path, const VideoINR<float>& model, const TrainPlan* plan = nullptr,
                     const TrainerState* state = nullptr);

struct LoadedCheckpoint {
  VideoINR<float> model;
  std::optional<TrainPlan> plan;
  std::optional<TrainerState> state;
  std::string version;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace enerv
