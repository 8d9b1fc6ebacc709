// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "enerv/config.hpp"
#include "enerv/data.hpp"
#include "enerv/model.hpp"
#include "enerv/training.hpp"

namespace enerv::acceptance {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::function<Verdict()> check;
};

std::vector<Criterion> analytic_criteria();    // 1-5, 12
std::vector<Criterion> experiment_criteria();  // 6-11

/// A run document from the configs directory, resolved against the CLI defaults.
struct Fixture {
  Json doc;
  ModelConfig model;
  TrainPlan plan;
  FrameDataset data;
};
Fixture load_fixture(const std::string& name, const std::vector<std::string>& overrides = {});

/// Directory receiving per-experiment CSV files; empty disables them.
const std::filesystem::path& results_dir();
void set_results_dir(const std::filesystem::path& dir);
void write_result(const std::string& file, const std::string& text);

std::string fmt(const char* f, ...);

}  // namespace enerv::acceptance
