// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "acceptance.hpp"
#include "enerv/checkpoint.hpp"
#include "enerv/kernels.hpp"
#include "enerv/metrics.hpp"
#include "enerv/params.hpp"
#include "param_oracle.hpp"

namespace enerv::acceptance {

namespace {

Verdict block_formulas() {
  const int widths[] = {4, 8, 16, 32, 64};
  int cases = 0, mismatches = 0, bound_checked = 0, bound_violations = 0;
  double tightest = 1e9;
  for (const int s : {2, 5}) {
    for (const int c1 : widths) {
      for (const int c2 : widths) {
        BlockSpec plain{c1, c2, s, false, 0};
        BlockSpec up{c1, c2, s, true, BlockSpec::mid_channels(c1, c2)};
        const int64_t orig = block_param_count(plain, false), upg = block_param_count(up, false);
        mismatches += orig != testing::enumerate_block(c1, c2, s, false);
        mismatches += upg != testing::enumerate_block(c1, c2, s, true);
        cases += 2;
        if (c1 <= c2 && std::min(c1, c2) % 4 == 0) {
          // upg / orig <= (c1 s^2 + c2) / (4 c2 s^2), compared in integers
          const int64_t s2 = static_cast<int64_t>(s) * s;
          const int64_t lhs = upg * 4 * c2 * s2, rhs = (c1 * s2 + c2) * orig;
          ++bound_checked;
          bound_violations += lhs > rhs;
          const double ratio = static_cast<double>(upg) / static_cast<double>(orig);
          tightest = std::min(tightest, static_cast<double>(c1) / (4.0 * c2) + 1.0 / (4.0 * s2) - ratio);
        }
      }
    }
  }
  return {mismatches == 0 && bound_violations == 0,
          fmt("%d block counts vs instantiation, %d mismatches; ratio bound on %d cases, %d violations, "
              "min slack %.3g",
              cases, mismatches, bound_checked, bound_violations, tightest)};
}

Verdict ledger_shape() {
  const auto stages = paper_ledger_stages();
  std::map<std::string, int64_t> total;
  for (const auto& s : stages) total[s.name] = count_params(s.config).total;
  struct Target {
    const char* stage;
    double value, tol;
  };
  const Target targets[] = {{"nerv_l", 12.57e6, 0.01},
                            {"disentangled", 5.5e6, 0.02},
                            {"upgraded_block", 7.92e6, 0.02},
                            {"enerv", 12.49e6, 0.01}};
  bool ok = true;
  std::string detail;
  for (const auto& t : targets) {
    const double rel = (static_cast<double>(total[t.stage]) - t.value) / t.value;
    ok &= std::fabs(rel) <= t.tol;
    detail += fmt("%s %.3fM (%+.2f%%), ", t.stage, total[t.stage] / 1e6, 100 * rel);
  }
  const double share = static_cast<double>(final_mlp_layer_count(stages.front().config)) / total["nerv_l"];
  ok &= share >= 0.65;
  write_result("ledger.csv", ledger_csv(ledger_report(stages)));
  return {ok, detail + fmt("baseline last-layer share %.1f%%", 100 * share)};
}

ModelConfig gradcheck_config() {
  ModelConfig c;
  c.variant = Variant::kEnerv;
  c.base_h = 2;
  c.base_w = 2;
  c.strides = {2};
  c.block_channels = {8, 8};
  c.fusion_dim = 8;
  c.spatial_dim = 8;
  c.in_dim = 8;
  c.heads_fusion = 2;
  c.mlp_dim_phi = 8;
  c.temporal_spec = {1.25, 4};
  c.spatial_spec = {1.25, 2};
  c.in_spec = {1.25, 4};
  c.temporal_hidden = {8};
  c.in_hidden = {8};
  return c;
}

Tensor<double> random_like(const Shape& shape, std::mt19937_64& rng, double lo, double hi) {
  Tensor<double> t(shape);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.span()) v = d(rng);
  return t;
}

Verdict gradient_check() {
  const ModelConfig c = gradcheck_config();
  auto m = VideoINR<double>::build(c, 3);
  std::mt19937_64 rng(17);
  // the IN maps start at zero, which would hide the gradient of the IN MLP
  for (auto& p : m.params().all()) {
    if (p.name.rfind("in_branch.m", 0) == 0) p.value = random_like(p.value.shape(), rng, -0.3, 0.3);
  }
  const std::vector<double> ts{0.15, 0.55, 0.9};
  std::vector<Tensor<double>> gt;
  for (size_t i = 0; i < ts.size(); ++i) gt.push_back(random_like({3, c.out_h(), c.out_w()}, rng, 0.0, 1.0));
  const double alpha = 0.7;
  auto loss = [&] {
    double s = 0;
    for (size_t i = 0; i < ts.size(); ++i) s += frame_loss(m.forward(ts[i]), gt[i], alpha);
    return s;
  };

  m.params().zero_grad();
  typename VideoINR<double>::SpatialTape sp;
  m.spatial_forward(sp);
  for (size_t i = 0; i < ts.size(); ++i) {
    typename VideoINR<double>::FrameTape tape;
    const Tensor<double> pred = m.frame_forward(sp, ts[i], tape);
    Tensor<double> d;
    frame_loss(pred, gt[i], alpha, &d);
    m.frame_backward(sp, tape, d);
  }
  m.spatial_backward(sp);

  const double step = 1e-4;
  struct Acc {
    double diff = 0, ana = 0, num = 0;
    int64_t n = 0;
  };
  std::map<std::string, Acc> groups;
  for (auto& p : m.params().all()) {
    Acc& a = groups[p.name.substr(0, p.name.find('.'))];
    for (int64_t i = 0; i < p.value.size(); ++i) {
      const double orig = p.value[i];
      p.value[i] = orig + step;
      const double up = loss();
      p.value[i] = orig - step;
      const double dn = loss();
      p.value[i] = orig;
      const double fd = (up - dn) / (2 * step);
      a.diff += (fd - p.grad[i]) * (fd - p.grad[i]);
      a.ana += p.grad[i] * p.grad[i];
      a.num += fd * fd;
      ++a.n;
    }
  }
  bool ok = true;
  std::string detail;
  for (const auto& g : param_groups()) {
    const auto it = groups.find(g);
    if (it == groups.end()) {
      ok = false;
      detail += g + " missing, ";
      continue;
    }
    const Acc& a = it->second;
    const double rel = std::sqrt(a.diff) / std::max({std::sqrt(a.ana), std::sqrt(a.num), 1e-300});
    ok &= rel <= 1e-3 && a.ana > 0;
    detail += fmt("%s %.1e, ", g.c_str(), rel);
  }
  detail.resize(detail.size() - 2);
  return {ok, fmt("%lld parameters, relative error per group: ", static_cast<long long>(m.params().numel())) + detail};
}

Verdict metric_oracles() {
  // exactly representable content keeps a + 0.1 within one rounding of the offset
  Tensor<float> a({3, 32, 48}), b(a.shape());
  for (int64_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<float>(i % 29) / 64.0f;
    b[i] = static_cast<float>(static_cast<double>(a[i]) + 0.1);
  }
  const double p_off = psnr(a, b);
  const double p_same = psnr(a, a);
  const Tensor<float> img = synth_clip(ClipKind::kComposite, 1, 96, 128, 5).frames;
  Tensor<float> frame({3, 96, 128});
  std::copy(img.span().begin(), img.span().end(), frame.span().begin());
  const double ms_same = ms_ssim(frame, frame);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Tensor<float> noise(frame.shape());
  for (auto& v : noise.span()) v = static_cast<float>(u(rng));
  double prev = kPsnrInf;
  bool monotone = true;
  std::string trail;
  for (const double amp : {0.01, 0.02, 0.05, 0.1}) {
    Tensor<float> noisy = frame;
    for (int64_t i = 0; i < noisy.size(); ++i) noisy[i] = frame[i] + static_cast<float>(amp) * noise[i];
    const double p = psnr(frame, noisy);
    monotone &= p < prev;
    prev = p;
    trail += fmt("%.2f ", p);
  }
  const bool ok = std::fabs(p_off - 20.0) <= 1e-6 && std::isinf(p_same) && p_same > 0 &&
                  std::fabs(ms_same - 1.0) <= 1e-9 && monotone;
  return {ok, fmt("psnr(offset 0.1) = %.9f, psnr(identical) = %g, ms_ssim(identical) = %.12f, psnr over "
                  "amplitudes 0.01..0.1: %s",
                  p_off, p_same, ms_same, trail.c_str())};
}

Verdict scheduler() {
  TrainPlan p;
  const int64_t total = 1000;
  const int64_t w = warmup_iters(total, p);
  const double at_peak = lr_at(w - 1, total, p), last = lr_at(total - 1, total, p);
  // cosine progress (k - w + 1) / (total - w) reaches one half here
  const int64_t mid = w - 1 + (total - w) / 2;
  const double at_mid = lr_at(mid, total, p);
  const bool ok = std::fabs(at_peak - 5e-4) <= 1e-15 && last <= 1e-9 * p.max_lr && std::fabs(at_mid - 2.5e-4) <= 1e-12;
  return {ok, fmt("%lld iterations, warmup %lld: lr(warmup end) = %.6g, lr(last) = %.3g, lr(midpoint %lld) = %.15g",
                  static_cast<long long>(total), static_cast<long long>(w), at_peak, last,
                  static_cast<long long>(mid), at_mid)};
}

Verdict reproducibility() {
  Fixture f = load_fixture("micro_enerv");
  f.plan.epochs = 12;
  auto m1 = VideoINR<float>::build(f.model, f.plan.seed), m2 = VideoINR<float>::build(f.model, f.plan.seed);
  const FitLog a = fit(m1, f.data, f.plan), b = fit(m2, f.data, f.plan);
  bool same_trace = a.step_losses == b.step_losses && a.lr_trace == b.lr_trace;
  for (size_t i = 0; same_trace && i < a.epochs.size(); ++i) same_trace = a.epochs[i].loss == b.epochs[i].loss;

  const auto path = std::filesystem::temp_directory_path() / "enerv_acceptance_ckpt.bin";
  save_checkpoint(path, m1, &f.plan);
  const LoadedCheckpoint back = load_checkpoint(path);
  std::filesystem::remove(path);
  bool exact = true;
  int renders = 0;
  for (const double t : {0.0, 0.25, 0.5, 0.8, 1.0}) {
    const Tensor<float> x = m1.forward(t), y = back.model.forward(t);
    exact &= std::equal(x.span().begin(), x.span().end(), y.span().begin());
    ++renders;
  }
  return {same_trace && exact,
          fmt("%zu step losses %s across two seeded fits, %d checkpoint renders %s (kernels: %s)",
              a.step_losses.size(), same_trace ? "identical" : "DIFFER", renders, exact ? "bit-exact" : "DIFFER",
              std::string(kernels::isa_name(kernels::active().isa)).c_str())};
}

}  // namespace

std::vector<Criterion> analytic_criteria() {
  return {{1, "block parameter formulas", block_formulas},
          {2, "parameter ledger shape", ledger_shape},
          {3, "gradient check", gradient_check},
          {4, "metric oracles", metric_oracles},
          {5, "learning-rate schedule", scheduler},
          {12, "reproducibility", reproducibility}};
}

}  // namespace enerv::acceptance
