// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "enerv/config.hpp"
#include "enerv/data.hpp"

namespace enerv::cli {

/// Run document with every key at its default. Also the schema that config
/// files and overrides are checked against.
Json default_run_config();

/// Defaults, then the optional config file, then dotted key=value overrides.
Json resolve_run_config(const std::filesystem::path& config_file, const std::vector<std::string>& overrides,
                        const Json* base = nullptr);

/// Dataset named by the "data" section of a resolved run document.
FrameDataset load_run_data(const Json& doc);

/// Creates `dir`, refusing to reuse a non-empty directory unless `force` is set.
void prepare_out_dir(const std::filesystem::path& dir, bool force);

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 2 configuration error, 3 data error, 4 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace enerv::cli
