// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "enerv/apps.hpp"
#include "enerv/checkpoint.hpp"
#include "enerv/errors.hpp"
#include "enerv/kernels.hpp"
#include "enerv/metrics.hpp"
#include "enerv/params.hpp"
#include "enerv/plot.hpp"

namespace enerv::cli {

namespace fs = std::filesystem;

Json default_run_config() {
  Json doc;
  ModelConfig model = paper_ledger_stages().back().config;
  model.target_h = model.target_w = 0;  // follows base_hw and strides
  doc["model"] = to_json(model);
  doc["plan"] = to_json(TrainPlan{});
  doc["data"] = {{"path", ""},          {"synthetic", ""}, {"frames", 16},    {"height", 64},
                 {"width", 128},        {"synth_seed", 0}, {"resize_hw", {0, 0}}, {"max_frames", 0},
                 {"split", false}};
  doc["prune"] = {{"sparsity", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}},
                  {"finetune_epochs", -1},
                  {"scope", "global"},
                  {"include_biases", false},
                  {"include_head", false}};
  doc["noise"] = {{"kind", "mixed"}, {"gaussian_sigma", 0.05}, {"sp_fraction", 0.02}, {"seed", 0}};
  doc["interpolate"] = {{"ts", Json::array()}};
  doc["freq"] = {{"which", "in_branch"}, {"values", {1.05, 1.25}}};
  return doc;
}

namespace {

Json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path.string() + "'");
  Json j = Json::parse(is, nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw ConfigError("config file '" + path.string() + "' is not valid JSON");
  if (!j.is_object()) throw ConfigError("config file '" + path.string() + "' must hold a JSON object");
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
  if (!os) throw DataError("cannot write '" + path.string() + "'");
}

template <typename T>
T field(const Json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + ": wrong type (" + j.dump() + ")");
  }
}

/// First dotted key at which two config documents differ.
std::string first_difference(const Json& a, const Json& b, const std::string& path) {
  if (a.is_object() && b.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      const std::string p = path + "." + it.key();
      if (!b.contains(it.key())) return p;
      if (auto d = first_difference(*it, b[it.key()], p); !d.empty()) return d;
    }
    return "";
  }
  return a == b ? "" : path;
}

struct Context {
  Json doc;
  fs::path out;
  std::ostream& log;
  std::ofstream file_log;

  Context(Json d, fs::path o, std::ostream& l) : doc(std::move(d)), out(std::move(o)), log(l) {
    if (!out.empty()) file_log.open(out / "log.txt", std::ios::app);
  }

  void say(const std::string& line) {
    log << line << "\n";
    if (file_log) file_log << line << "\n";
  }

  void snapshot(const Json& extra = Json::object()) {
    if (out.empty()) return;
    Json j = doc;
    Json meta = extra;
    meta["version"] = kLibraryVersion;
    meta["device"] = std::string(kernels::isa_name(kernels::active().isa));
    j["run"] = meta;
    write_text(out / "config.json", j.dump(2) + "\n");
  }
};

ModelConfig model_of(const Json& doc) {
  ModelConfig c = model_config_from_json(doc.at("model"));
  c.validate();
  return c;
}

TrainPlan plan_of(const Json& doc) {
  TrainPlan p = train_plan_from_json(doc.at("plan"));
  p.validate();
  return p;
}

void check_resolution(const ModelConfig& c, const FrameDataset& ds) {
  if (c.out_h() != ds.height() || c.out_w() != ds.width()) {
    throw DataError("model renders " + std::to_string(c.out_h()) + "x" + std::to_string(c.out_w()) +
                    " frames but the video is " + std::to_string(ds.height()) + "x" + std::to_string(ds.width()));
  }
}

std::string epoch_line(const EpochRecord& e, int total) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch %d/%d  loss %.6f  psnr %.2f dB  lr %.3g  (%.2f s)", e.epoch, total, e.loss,
                e.psnr_seen, e.lr, e.seconds);
  return buf;
}

void write_report(const fs::path& dir, const std::string& stem, const EvalReport& r) {
  write_text(dir / (stem + ".csv"), r.csv());
  write_text(dir / (stem + ".txt"), r.table());
}

void plot_fit_log(const fs::path& path, const FitLog& log) {
  PlotSeries s{"PSNR", {}, {}};
  for (const auto& e : log.epochs) {
    s.x.push_back(e.epoch);
    s.y.push_back(e.psnr_seen);
  }
  write_line_plot(path, {s}, "TRAINING PSNR", "EPOCH", "PSNR (DB)");
}

// ------------------------------------------------------------------ commands

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  bool force = false;
  std::optional<uint64_t> seed;
  std::string device;
  std::string checkpoint;
};

Json resolve(const Common& c, const Json* base = nullptr) {
  std::vector<std::string> ov = c.overrides;
  if (c.seed) ov.push_back("plan.seed=" + std::to_string(*c.seed));
  return resolve_run_config(c.config, ov, base);
}

// Base document for a command that starts from a checkpoint: the run snapshot beside it, if any, then the
// checkpoint's own model and plan.
Json checkpoint_base(const fs::path& path, const LoadedCheckpoint& ck) {
  Json base = default_run_config();
  for (const fs::path& dir : {path.parent_path(), path.parent_path().parent_path()}) {
    const fs::path snap = (dir.empty() ? fs::path(".") : dir) / "config.json";
    if (!fs::is_regular_file(snap)) continue;
    Json file = read_json_file(snap);
    file.erase("run");
    check_known_keys(file, base);
    merge_into(base, file);
    break;
  }
  base["model"] = to_json(ck.model.config());
  if (ck.plan) base["plan"] = to_json(*ck.plan);
  return base;
}

fs::path out_dir(const Common& c, const std::string& command) {
  const fs::path dir = c.out.empty() ? fs::path("runs") / command : fs::path(c.out);
  prepare_out_dir(dir, c.force);
  return dir;
}

int cmd_fit(const Common& c, std::ostream& out) {
  std::optional<LoadedCheckpoint> resumed;
  Json base = default_run_config();
  if (!c.checkpoint.empty()) {
    resumed = load_checkpoint(c.checkpoint);
    if (!resumed->state) throw ConfigError("checkpoint '" + c.checkpoint + "' holds no trainer state to resume");
    base = checkpoint_base(c.checkpoint, *resumed);
  }
  Json doc = resolve(c, &base);
  const ModelConfig config = model_of(doc);
  TrainPlan plan = plan_of(doc);
  const FrameDataset ds = load_run_data(doc);
  check_resolution(config, ds);

  Json extra = Json::object();
  std::optional<VideoINR<float>> model;
  TrainerState state;
  if (resumed) {
    const std::string diff = first_difference(to_json(config), to_json(resumed->model.config()), "model");
    if (!diff.empty()) throw ConfigError("config mismatch with checkpoint at '" + diff + "'");
    if (plan.epochs < resumed->state->epoch) {
      throw ConfigError("plan.epochs (" + std::to_string(plan.epochs) + ") is below the checkpoint's completed epochs (" +
                        std::to_string(resumed->state->epoch) + ")");
    }
    model.emplace(std::move(resumed->model));
    state = std::move(*resumed->state);
    extra["resume"] = {{"checkpoint", fs::absolute(c.checkpoint).string()},
                       {"from_epoch", state.epoch},
                       {"from_step", state.step},
                       {"previous_epochs", resumed->plan ? resumed->plan->epochs : 0}};
  } else {
    model.emplace(VideoINR<float>::build(config, plan.seed));
  }

  Context ctx(doc, out_dir(c, "fit"), out);
  ctx.snapshot(extra);
  ctx.say("fitting " + std::string(variant_name(config.variant)) + " (" + std::to_string(count_params(*model).total) +
          " parameters) to " + ds.source + ", " + std::to_string(ds.training_frames().size()) + " frames of " +
          std::to_string(ds.height()) + "x" + std::to_string(ds.width()));
  FitOptions options;
  options.checkpoint_dir = ctx.out;
  options.state = &state;
  options.on_epoch = [&](const EpochRecord& e) {
    if (plan.log_every > 0 && (e.epoch % plan.log_every == 0 || e.epoch == plan.epochs)) {
      ctx.say(epoch_line(e, plan.epochs));
    }
  };
  const FitLog log = fit(*model, ds, plan, options);
  write_text(ctx.out / "fit_log.csv", log.csv());
  plot_fit_log(ctx.out / "fit_psnr.png", log);
  const EvalReport report = evaluate(*model, ds);
  write_report(ctx.out, "eval", report);
  ctx.say(report.table());
  return 0;
}

int cmd_eval(const Common& c, bool frames, std::ostream& out) {
  if (c.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
  const LoadedCheckpoint ck = load_checkpoint(c.checkpoint);
  const Json base = checkpoint_base(c.checkpoint, ck);
  const Json doc = resolve(c, &base);
  const FrameDataset ds = load_run_data(doc);
  check_resolution(ck.model.config(), ds);
  Context ctx(doc, out_dir(c, "eval"), out);
  ctx.snapshot({{"checkpoint", fs::absolute(c.checkpoint).string()}});
  const Tensor<float> pred = render(ck.model, ds.indices);
  const EvalReport report = score_frames(pred, ds);
  write_report(ctx.out, "eval", report);
  if (frames) write_frames(ctx.out / "frames", pred, "frame");
  ctx.say(report.table());
  return 0;
}

int cmd_interpolate(const Common& c, std::ostream& out) {
  if (c.checkpoint.empty()) throw ConfigError("interpolate needs --checkpoint");
  const LoadedCheckpoint ck = load_checkpoint(c.checkpoint);
  const Json base = checkpoint_base(c.checkpoint, ck);
  const Json doc = resolve(c, &base);
  auto ts = field<std::vector<double>>(doc.at("interpolate").at("ts"), "interpolate.ts");
  std::optional<FrameDataset> ds;
  const Json& d = doc.at("data");
  if (!d.at("path").get<std::string>().empty() || !d.at("synthetic").get<std::string>().empty()) {
    ds = load_run_data(doc);
    check_resolution(ck.model.config(), *ds);
    if (ts.empty()) {
      if (!ds->has_split()) ds = split_seen_unseen(*ds);
      for (const int64_t k : ds->frames_in(Split::kUnseen)) ts.push_back(ds->indices[k]);
    }
  }
  if (ts.empty()) throw ConfigError("interpolate.ts is empty and no video was given to pick unseen indices from");
  Context ctx(doc, out_dir(c, "interpolate"), out);
  ctx.snapshot({{"checkpoint", fs::absolute(c.checkpoint).string()}});
  const Interpolation r = interpolate(ck.model, ts, ds ? &*ds : nullptr);
  write_frames(ctx.out / "frames", r.frames, "interp");
  std::ostringstream idx;
  idx << "frame,t\n" << std::setprecision(9);
  for (size_t i = 0; i < ts.size(); ++i) idx << i << "," << ts[i] << "\n";
  write_text(ctx.out / "indices.csv", idx.str());
  if (!r.report.rows.empty()) {
    write_report(ctx.out, "interpolate", r.report);
    ctx.say(r.report.table());
  }
  ctx.say("rendered " + std::to_string(ts.size()) + " frames to " + (ctx.out / "frames").string());
  return 0;
}

int cmd_prune(const Common& c, std::ostream& out) {
  if (c.checkpoint.empty()) throw ConfigError("prune needs --checkpoint");
  const LoadedCheckpoint ck = load_checkpoint(c.checkpoint);
  const Json base = checkpoint_base(c.checkpoint, ck);
  const Json doc = resolve(c, &base);
  const TrainPlan plan = plan_of(doc);
  const FrameDataset ds = load_run_data(doc);
  check_resolution(ck.model.config(), ds);
  const Json& p = doc.at("prune");
  const auto grid = field<std::vector<double>>(p.at("sparsity"), "prune.sparsity");
  PruneSpec spec;
  spec.finetune_epochs = field<int>(p.at("finetune_epochs"), "prune.finetune_epochs");
  if (spec.finetune_epochs < 0) spec.finetune_epochs = default_finetune_epochs(plan);
  spec.scope = parse_prune_scope(field<std::string>(p.at("scope"), "prune.scope"));
  spec.include_biases = field<bool>(p.at("include_biases"), "prune.include_biases");
  spec.include_head = field<bool>(p.at("include_head"), "prune.include_head");
  for (const double s : grid) {
    spec.sparsity = s;
    spec.validate();
  }

  Context ctx(doc, out_dir(c, "prune"), out);
  ctx.snapshot({{"checkpoint", fs::absolute(c.checkpoint).string()}});
  const EvalReport dense = evaluate(ck.model, ds);
  ctx.say("dense model: " + std::to_string(dense.overall.psnr) + " dB");
  std::vector<SweepRow> rows;
  for (const double s : grid) {
    spec.sparsity = s;
    PruneResult r = prune(ck.model, spec, ds, plan);
    char name[32];
    std::snprintf(name, sizeof name, "sparsity_%.2f", s);
    const fs::path dir = ctx.out / name;
    fs::create_directories(dir);
    save_checkpoint(dir / "checkpoint.bin", r.model, &plan, &r.state);
    write_report(dir, "eval", r.report);
    rows.push_back({s, r.sparsity, r.report.overall});
    char line[160];
    std::snprintf(line, sizeof line, "sparsity %.2f (achieved %.4f): psnr %.2f dB  ms-ssim %.4f", s, r.sparsity,
                  r.report.overall.psnr, r.report.overall.ms_ssim);
    ctx.say(line);
  }
  write_text(ctx.out / "sweep.csv", sweep_csv(rows));
  PlotSeries series{std::string(variant_name(ck.model.config().variant)), {}, {}};
  for (const auto& r : rows) {
    series.x.push_back(r.sparsity);
    series.y.push_back(r.score.psnr);
  }
  write_line_plot(ctx.out / "sweep.png", {series}, "COMPRESSION", "SPARSITY", "PSNR (DB)");
  return 0;
}

NoiseSpec noise_of(const Json& doc) {
  const Json& n = doc.at("noise");
  NoiseSpec s;
  s.kind = parse_noise_kind(field<std::string>(n.at("kind"), "noise.kind"));
  s.gaussian_sigma = field<double>(n.at("gaussian_sigma"), "noise.gaussian_sigma");
  s.sp_fraction = field<double>(n.at("sp_fraction"), "noise.sp_fraction");
  s.seed = field<uint64_t>(n.at("seed"), "noise.seed");
  s.validate();
  return s;
}

int cmd_denoise(const Common& c, std::ostream& out) {
  const Json doc = resolve(c);
  const ModelConfig config = model_of(doc);
  const TrainPlan plan = plan_of(doc);
  const NoiseSpec noise = noise_of(doc);
  const FrameDataset clean = load_run_data(doc);
  check_resolution(config, clean);
  Context ctx(doc, out_dir(c, "denoise"), out);
  ctx.snapshot();
  const DenoiseResult r = denoise(clean, noise, config, plan);
  save_checkpoint(ctx.out / "checkpoint.bin", r.model, &plan);
  write_text(ctx.out / "fit_log.csv", r.log.csv());
  write_report(ctx.out, "eval", r.report);
  char buf[200];
  std::snprintf(buf, sizeof buf, "noisy_psnr,denoised_psnr,gain\n%.4f,%.4f,%.4f\n", r.noisy_psnr,
                r.report.overall.psnr, r.report.overall.psnr - r.noisy_psnr);
  write_text(ctx.out / "summary.csv", buf);
  const FrameDataset noisy = add_noise(clean, noise);
  write_png(ctx.out / "noisy_00000.png", noisy.frame(0));
  write_png(ctx.out / "denoised_00000.png", r.model.forward(clean.indices[0]));
  std::snprintf(buf, sizeof buf, "noisy vs clean %.2f dB, model vs clean %.2f dB", r.noisy_psnr,
                r.report.overall.psnr);
  ctx.say(buf);
  return 0;
}

int cmd_params(const Common& c, bool ledger, std::ostream& out) {
  const Json doc = resolve(c);
  std::optional<fs::path> dir;
  if (!c.out.empty()) dir = out_dir(c, "params");
  Context ctx(doc, dir.value_or(fs::path()), out);
  if (ledger) {
    const auto rows = ledger_report(paper_ledger_stages());
    ctx.say(ledger_table(rows));
    if (dir) write_text(*dir / "ledger.csv", ledger_csv(rows));
    else out << ledger_csv(rows);
    return 0;
  }
  const ModelConfig config = model_of(doc);
  const ParamLedger l = count_params(config);
  std::ostringstream csv;
  csv << "group,count\n";
  for (const auto& [g, n] : l.entries) csv << g << "," << n << "\n";
  csv << "total," << l.total << "\n";
  if (dir) {
    ctx.snapshot();
    write_text(*dir / "params.csv", csv.str());
  }
  out << csv.str();
  return 0;
}

int cmd_freq(const Common& c, std::ostream& out) {
  const Json doc = resolve(c);
  const ModelConfig config = model_of(doc);
  const TrainPlan plan = plan_of(doc);
  const FrameDataset ds = load_run_data(doc);
  check_resolution(config, ds);
  const FreqTarget which = parse_freq_target(field<std::string>(doc.at("freq").at("which"), "freq.which"));
  const auto values = field<std::vector<double>>(doc.at("freq").at("values"), "freq.values");
  Context ctx(doc, out_dir(c, "freq-sweep"), out);
  ctx.snapshot();
  const auto rows = frequency_sweep(config, ds, which, values, plan);
  write_text(ctx.out / "freq.csv", freq_csv(rows));
  PlotSeries seen{"SEEN", {}, {}}, unseen{"UNSEEN", {}, {}};
  for (const auto& r : rows) {
    seen.x.push_back(r.value);
    seen.y.push_back(r.seen.psnr);
    unseen.x.push_back(r.value);
    unseen.y.push_back(r.unseen.psnr);
    char line[160];
    std::snprintf(line, sizeof line, "%s b=%.4g: seen %.2f dB, unseen %.2f dB",
                  std::string(freq_target_name(which)).c_str(), r.value, r.seen.psnr, r.unseen.psnr);
    ctx.say(line);
  }
  write_line_plot(ctx.out / "freq.png", {seen, unseen}, "FREQUENCY", "BASE B", "PSNR (DB)");
  return 0;
}

void select_device(const std::string& requested) {
  std::string name = requested;
  if (name.empty()) {
    const char* env = std::getenv("ENERV_DEVICE");
    name = env ? env : "auto";
  }
  if (name == "auto") {
    kernels::set_isa(kernels::detected_isa());
    return;
  }
  kernels::Isa isa;
  try {
    isa = kernels::parse_isa(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError("unknown device '" + name + "' (expected auto, scalar or avx2)");
  }
  if (!kernels::host_supports(isa)) throw ConfigError("device '" + name + "' is not supported on this host");
  kernels::set_isa(isa);
}

}  // namespace

FrameDataset load_run_data(const Json& doc) {
  const Json& d = doc.at("data");
  const auto path = field<std::string>(d.at("path"), "data.path");
  const auto synth = field<std::string>(d.at("synthetic"), "data.synthetic");
  FrameDataset ds;
  if (!path.empty() && !synth.empty()) throw ConfigError("data.path and data.synthetic are mutually exclusive");
  if (!path.empty()) {
    LoadOptions o;
    const auto hw = field<std::vector<int>>(d.at("resize_hw"), "data.resize_hw");
    if (hw.size() != 2) throw ConfigError("data.resize_hw: expected [height, width]");
    o.resize_h = hw[0];
    o.resize_w = hw[1];
    o.max_frames = field<int>(d.at("max_frames"), "data.max_frames");
    ds = load_video(path, o);
  } else if (!synth.empty()) {
    ds = synth_clip(parse_clip_kind(synth), field<int>(d.at("frames"), "data.frames"),
                    field<int>(d.at("height"), "data.height"), field<int>(d.at("width"), "data.width"),
                    field<uint64_t>(d.at("synth_seed"), "data.synth_seed"));
  } else {
    throw DataError("no input video: set data.path or data.synthetic");
  }
  if (field<bool>(d.at("split"), "data.split")) ds = split_seen_unseen(ds);
  return ds;
}

Json resolve_run_config(const fs::path& config_file, const std::vector<std::string>& overrides, const Json* base) {
  const Json schema = default_run_config();
  Json doc = base ? *base : schema;
  if (!config_file.empty()) {
    Json file = read_json_file(config_file);
    file.erase("run");  // snapshot metadata
    check_known_keys(file, schema);
    merge_into(doc, file);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  model_config_from_json(doc.at("model"));
  train_plan_from_json(doc.at("plan"));
  check_known_keys(doc, schema);
  return doc;
}

void prepare_out_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ConfigError("output path '" + dir.string() + "' exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) throw ConfigError("output directory '" + dir.string() + "' is not empty (use --force to overwrite)");
      fs::remove_all(dir);
    }
  }
  fs::create_directories(dir);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video implicit neural representations (NeRV / E-NeRV)", "enerv"};
  app.require_subcommand(1);
  Common c;
  bool ledger = false, frames = false;
  std::string seed_text;
  auto global = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON run config");
    sub->add_option("--out", c.out, "output directory");
    sub->add_flag("--force", c.force, "replace a non-empty output directory");
    sub->add_option("--seed", seed_text, "overrides plan.seed");
    sub->add_option("--device", c.device, "auto, scalar or avx2 (default: $ENERV_DEVICE or auto)");
    sub->add_option("overrides", c.overrides, "dotted key=value overrides, e.g. plan.epochs=50");
  };
  auto* fit = app.add_subcommand("fit", "fit a model to a video");
  global(fit);
  fit->add_option("--resume", c.checkpoint, "continue from a checkpoint");
  auto* eval = app.add_subcommand("eval", "score a checkpoint against a video");
  global(eval);
  eval->add_option("--checkpoint", c.checkpoint, "checkpoint to evaluate")->required();
  eval->add_flag("--frames", frames, "also write the rendered frames as PNG");
  auto* interp = app.add_subcommand("interpolate", "render frames at arbitrary normalized indices");
  global(interp);
  interp->add_option("--checkpoint", c.checkpoint, "trained checkpoint")->required();
  auto* prune_cmd = app.add_subcommand("prune", "magnitude-prune and fine-tune a checkpoint over a sparsity grid");
  global(prune_cmd);
  prune_cmd->add_option("--checkpoint", c.checkpoint, "trained checkpoint")->required();
  auto* denoise_cmd = app.add_subcommand("denoise", "fit to corrupted frames and score against the clean ones");
  global(denoise_cmd);
  auto* params = app.add_subcommand("params", "parameter counts per group");
  global(params);
  params->add_flag("--ledger", ledger, "counts for the five reference stages");
  auto* freq = app.add_subcommand("freq-sweep", "train one model per encoding base on a 3:1 split");
  global(freq);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!seed_text.empty()) {
      try {
        size_t used = 0;
        c.seed = std::stoull(seed_text, &used);
        if (used != seed_text.size()) throw std::invalid_argument(seed_text);
      } catch (const std::exception&) {
        throw ConfigError("--seed expects a non-negative integer, got '" + seed_text + "'");
      }
    }
    select_device(c.device);
    if (*fit) return cmd_fit(c, out);
    if (*eval) return cmd_eval(c, frames, out);
    if (*interp) return cmd_interpolate(c, out);
    if (*prune_cmd) return cmd_prune(c, out);
    if (*denoise_cmd) return cmd_denoise(c, out);
    if (*params) return cmd_params(c, ledger, out);
    if (*freq) return cmd_freq(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace enerv::cli
