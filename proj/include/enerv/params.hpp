// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "enerv/model.hpp"
#include "enerv/nn.hpp"

namespace enerv {

/// Audit groups, in report order. Every parameter name starts with one of these.
inline const std::vector<std::string>& param_groups() {
  static const std::vector<std::string> g{"temporal_mlp", "spatial", "phi",    "fusion",
                                          "fuse_proj",    "in_branch", "blocks", "head"};
  return g;
}

struct ParamLedger {
  std::vector<std::pair<std::string, int64_t>> entries;  // one per audit group, zero when absent
  int64_t total = 0;

  int64_t count(const std::string& group) const;
};

/// Counts from the instantiated parameter arrays.
template <typename T>
ParamLedger count_params(const nn::ParamStore<T>& params);
template <typename T>
ParamLedger count_params(const VideoINR<T>& model) {
  return count_params(model.params());
}

/// Closed-form count for a config, without building it.
ParamLedger count_params(const ModelConfig& config);

/// Weight elements of one NeRV block; with_bias adds one bias per conv output channel.
/// original: 9*C1*C2*s^2, upgraded: 9*C0*(C1*s^2 + C2).
int64_t block_param_count(const BlockSpec& spec, bool with_bias);

/// Elements (weights + bias) of the last layer of the temporal MLP.
int64_t final_mlp_layer_count(const ModelConfig& config);

/// {c0, w, w/2, w/4, ...} for `blocks` blocks, each entry at least 1.
std::vector<int> halving_channels(int c0, int width, int blocks);

/// Integer in [lo, hi] whose config lands closest to `target` parameters.
/// The count must be non-decreasing in the searched integer.
int search_width(const std::function<ModelConfig(int)>& make, int64_t target, int lo, int hi);

struct LedgerStage {
  std::string name;
  ModelConfig config;
  std::optional<double> psnr;  // reference PSNR annotation, when one exists
};

/// The five stages from the 12.57M baseline to the 12.49M E-NeRV, with channel
/// widths found by search at 1280x720 (base 9x16, strides 5,2,2,2,2).
std::vector<LedgerStage> paper_ledger_stages();

struct LedgerRow {
  std::string stage;
  std::string group;
  int64_t count = 0;
  int64_t total = 0;
  std::optional<double> psnr;
};

std::vector<LedgerRow> ledger_report(const std::vector<LedgerStage>& stages);
std::string ledger_csv(const std::vector<LedgerRow>& rows);
std::string ledger_table(const std::vector<LedgerRow>& rows);

}  // namespace enerv
