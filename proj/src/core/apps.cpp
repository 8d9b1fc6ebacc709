// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/apps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "enerv/errors.hpp"

namespace enerv {

std::string_view prune_scope_name(PruneScope s) { return s == PruneScope::kGlobal ? "global" : "per_layer"; }

PruneScope parse_prune_scope(std::string_view name) {
  if (name == "global") return PruneScope::kGlobal;
  if (name == "per_layer") return PruneScope::kPerLayer;
  throw ConfigError("unknown prune scope '" + std::string(name) + "' (expected global or per_layer)");
}

void PruneSpec::validate() const {
  if (!(sparsity >= 0 && sparsity < 1)) {
    throw ConfigError("prune.sparsity must lie in [0,1), got " + std::to_string(sparsity));
  }
  if (finetune_epochs < 0) throw ConfigError("prune.finetune_epochs must be >= 0");
}

int default_finetune_epochs(const TrainPlan& plan) {
  return std::max(1, static_cast<int>(std::lround(0.2 * plan.epochs)));
}

bool prunable(const nn::Parameter<float>& p, const PruneSpec& spec) {
  if (p.is_bias && !spec.include_biases) return false;
  if (p.group() == "head" && !spec.include_head) return false;
  return true;
}

ParamMasks magnitude_masks(const nn::ParamStore<float>& params, const PruneSpec& spec) {
  spec.validate();
  ParamMasks masks(params.size());
  struct Entry {
    float mag;
    uint32_t param;
    int64_t index;
  };
  auto smallest_first = [](const Entry& a, const Entry& b) {
    if (a.mag != b.mag) return a.mag < b.mag;
    if (a.param != b.param) return a.param < b.param;
    return a.index < b.index;
  };
  auto zero_smallest = [&](std::vector<Entry>& pool, int64_t k) {
    if (k <= 0) return;
    std::nth_element(pool.begin(), pool.begin() + (k - 1), pool.end(), smallest_first);
    for (int64_t i = 0; i < k; ++i) masks[pool[i].param][pool[i].index] = 0;
  };

  std::vector<Entry> pool;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (!prunable(p, spec)) continue;
    masks[i] = Tensor<uint8_t>(p.value.shape(), uint8_t{1});
    if (spec.scope == PruneScope::kPerLayer) pool.clear();
    for (int64_t j = 0; j < p.value.size(); ++j) pool.push_back({std::fabs(p.value[j]), static_cast<uint32_t>(i), j});
    if (spec.scope == PruneScope::kPerLayer) {
      zero_smallest(pool, static_cast<int64_t>(std::floor(static_cast<double>(pool.size()) * spec.sparsity)));
    }
  }
  if (spec.scope == PruneScope::kGlobal) {
    zero_smallest(pool, static_cast<int64_t>(std::floor(static_cast<double>(pool.size()) * spec.sparsity)));
  }
  return masks;
}

double achieved_sparsity(const ParamMasks& masks) {
  int64_t zeros = 0, total = 0;
  for (const auto& m : masks) {
    total += m.size();
    for (const uint8_t v : m.span()) zeros += v == 0;
  }
  return total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
}

PruneResult prune(const VideoINR<float>& model, const PruneSpec& spec, const FrameDataset& ds, const TrainPlan& plan) {
  spec.validate();
  PruneResult r{model, {}, {}, 0};
  r.state.masks = magnitude_masks(r.model.params(), spec);
  apply_masks(r.model.params(), r.state.masks);
  if (spec.finetune_epochs > 0) {
    TrainPlan tune = plan;
    tune.epochs = spec.finetune_epochs;
    tune.max_lr = plan.max_lr * 0.1;
    tune.checkpoint_every = 0;
    FitOptions options;
    options.state = &r.state;
    fit(r.model, ds, tune, options);
  }
  r.sparsity = achieved_sparsity(r.state.masks);
  r.report = evaluate(r.model, ds);
  return r;
}

std::vector<SweepRow> compression_sweep(const VideoINR<float>& model, const FrameDataset& ds, const TrainPlan& plan,
                                        const std::vector<double>& grid, int finetune_epochs, PruneScope scope) {
  std::vector<SweepRow> rows;
  for (const double s : grid) {
    PruneSpec spec;
    spec.sparsity = s;
    spec.finetune_epochs = finetune_epochs;
    spec.scope = scope;
    const PruneResult r = prune(model, spec, ds, plan);
    rows.push_back({s, r.sparsity, r.report.overall});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "sparsity,achieved,psnr,ms_ssim\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.4f,%.6f\n", r.sparsity, r.achieved, r.score.psnr, r.score.ms_ssim);
    os << buf;
  }
  return os.str();
}

// ------------------------------------------------------------------ noise

std::string_view noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kSaltPepper: return "salt_pepper";
    case NoiseKind::kMixed: return "mixed";
  }
  return "?";
}

NoiseKind parse_noise_kind(std::string_view name) {
  for (NoiseKind k : {NoiseKind::kGaussian, NoiseKind::kSaltPepper, NoiseKind::kMixed}) {
    if (noise_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown noise kind '" + std::string(name) + "' (expected gaussian, salt_pepper or mixed)");
}

void NoiseSpec::validate() const {
  if (!(gaussian_sigma >= 0) || !std::isfinite(gaussian_sigma)) throw ConfigError("noise.gaussian_sigma must be >= 0");
  if (!(sp_fraction >= 0 && sp_fraction <= 1)) throw ConfigError("noise.sp_fraction must lie in [0,1]");
}

FrameDataset add_noise(const FrameDataset& ds, const NoiseSpec& spec) {
  spec.validate();
  FrameDataset out = ds;
  const bool gauss = spec.kind != NoiseKind::kSaltPepper && spec.gaussian_sigma > 0;
  const bool sp = spec.kind != NoiseKind::kGaussian && spec.sp_fraction > 0;
  if (!gauss && !sp) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.gaussian_sigma > 0 ? spec.gaussian_sigma : 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (auto& v : out.frames.span()) {
    double x = v;
    if (gauss) x += normal(rng);
    if (sp && uni(rng) < spec.sp_fraction) x = uni(rng) < 0.5 ? 0.0 : 1.0;
    v = static_cast<float>(std::clamp(x, 0.0, 1.0));
  }
  return out;
}

double mean_psnr(const FrameDataset& a, const FrameDataset& b) {
  if (a.frames.shape() != b.frames.shape()) throw DataError("mean_psnr: datasets differ in shape");
  const int64_t n = 3 * a.height() * a.width();
  double sum = 0;
  for (int64_t k = 0; k < a.num_frames(); ++k) sum += std::min(psnr(a.frame_data(k), b.frame_data(k), n), kPsnrCap);
  return sum / static_cast<double>(a.num_frames());
}

DenoiseResult denoise(const FrameDataset& clean, const NoiseSpec& spec, const ModelConfig& config,
                      const TrainPlan& plan) {
  const FrameDataset noisy = add_noise(clean, spec);
  DenoiseResult r{VideoINR<float>::build(config, plan.seed), {}, {}, mean_psnr(noisy, clean)};
  r.log = fit(r.model, noisy, plan);
  r.report = evaluate(r.model, clean);
  return r;
}

// ------------------------------------------------------------------ interpolation

Interpolation interpolate(const VideoINR<float>& model, const std::vector<double>& ts, const FrameDataset* reference) {
  for (const double t : ts) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("interpolation index " + std::to_string(t) + " outside [0,1]");
  }
  Interpolation out;
  out.frames = render(model, ts);
  if (!reference) return out;
  reference->validate();
  const int64_t h = model.config().out_h(), w = model.config().out_w(), n = 3 * h * w;
  if (reference->height() != h || reference->width() != w) {
    throw DataError("reference video resolution differs from the model");
  }
  const int scales = ms_ssim_scales(h, w);
  std::vector<FrameScore> rows;
  for (size_t i = 0; i < ts.size(); ++i) {
    for (int64_t k = 0; k < reference->num_frames(); ++k) {
      if (std::fabs(reference->indices[k] - ts[i]) > 1e-9) continue;
      FrameScore s;
      s.index = k;
      s.t = ts[i];
      if (reference->has_split()) s.split = reference->split[k];
      const float* pred = out.frames.data() + static_cast<int64_t>(i) * n;
      s.psnr = psnr(pred, reference->frame_data(k), n);
      if (scales > 0) {
        Tensor<float> p({3, h, w});
        std::copy_n(pred, n, p.data());
        s.ms_ssim = ms_ssim(p, reference->frame(k));
      }
      rows.push_back(s);
      break;
    }
  }
  out.report = make_report(std::move(rows), scales);
  return out;
}

std::string_view freq_target_name(FreqTarget f) {
  switch (f) {
    case FreqTarget::kTemporal: return "temporal";
    case FreqTarget::kSpatial: return "spatial";
    case FreqTarget::kInBranch: return "in_branch";
  }
  return "?";
}

FreqTarget parse_freq_target(std::string_view name) {
  for (FreqTarget f : {FreqTarget::kTemporal, FreqTarget::kSpatial, FreqTarget::kInBranch}) {
    if (freq_target_name(f) == name) return f;
  }
  throw ConfigError("unknown frequency target '" + std::string(name) + "' (expected temporal, spatial or in_branch)");
}

std::vector<FreqRow> frequency_sweep(const ModelConfig& config, const FrameDataset& ds, FreqTarget which,
                                     const std::vector<double>& values, const TrainPlan& plan) {
  for (const double v : values) {
    if (!(v > 1.0)) throw ConfigError("frequency base must be > 1, got " + std::to_string(v));
  }
  const FrameDataset split = ds.has_split() ? ds : split_seen_unseen(ds);
  std::vector<FreqRow> rows;
  for (const double v : values) {
    ModelConfig c = config;
    switch (which) {
      case FreqTarget::kTemporal: c.temporal_spec.base = v; break;
      case FreqTarget::kSpatial: c.spatial_spec.base = v; break;
      case FreqTarget::kInBranch: c.in_spec.base = v; break;
    }
    auto model = VideoINR<float>::build(c, plan.seed);
    fit(model, split, plan);
    const EvalReport r = evaluate(model, split);
    rows.push_back({v, *r.seen, *r.unseen});
  }
  return rows;
}

std::string freq_csv(const std::vector<FreqRow>& rows) {
  std::ostringstream os;
  os << "value,seen_psnr,unseen_psnr,seen_ms_ssim,unseen_ms_ssim\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%.4f,%.4f,%.6f,%.6f\n", r.value, r.seen.psnr, r.unseen.psnr, r.seen.ms_ssim,
                  r.unseen.ms_ssim);
    os << buf;
  }
  return os.str();
}

}  // namespace enerv
