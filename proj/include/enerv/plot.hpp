// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace enerv {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Renders line series with markers, axes, tick labels and a legend to a PNG.
/// Text uses a built-in 3x5 pixel font (upper case, digits, basic punctuation).
void write_line_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series, std::string_view title,
                     std::string_view x_label, std::string_view y_label, int width = 640, int height = 400);

}  // namespace enerv
