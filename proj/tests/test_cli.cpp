// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "enerv/checkpoint.hpp"
#include "enerv/cli.hpp"
#include "enerv/errors.hpp"

using namespace enerv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("enerv_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path micro_config(const fs::path& dir) {
  Json doc;
  doc["model"] = {{"variant", "enerv"},
                  {"base_hw", {2, 4}},
                  {"strides", {2, 2}},
                  {"block_channels", {16, 8, 8}},
                  {"fusion_dim", 16},
                  {"spatial_dim", 16},
                  {"in_dim", 8},
                  {"heads_fusion", 2},
                  {"mlp_dim_phi", 16},
                  {"temporal_spec", {{"base", 1.25}, {"levels", 8}}},
                  {"spatial_spec", {{"base", 1.25}, {"levels", 4}}},
                  {"in_spec", {{"base", 1.25}, {"levels", 8}}},
                  {"temporal_hidden", {32}},
                  {"in_hidden", {16}}};
  doc["plan"] = {{"epochs", 4}, {"log_every", 0}};
  doc["data"] = {{"synthetic", "moving_square"}, {"frames", 8}, {"height", 8}, {"width", 16}};
  const fs::path p = dir / "micro.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config resolution") {
  const fs::path dir = scratch("resolve");
  const Json doc = cli::resolve_run_config(micro_config(dir), {"plan.epochs=7", "model.temporal_spec.base=1.05",
                                                               "data.synthetic=composite"});
  CHECK(doc["plan"]["epochs"] == 7);
  CHECK(doc["model"]["temporal_spec"]["base"] == 1.05);
  CHECK(doc["data"]["synthetic"] == "composite");
  CHECK(doc["plan"]["max_lr"] == 5e-4);
  try {
    cli::resolve_run_config(micro_config(dir), {"plan.epoch=7"});
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("plan.epoch") != std::string::npos);
  }
  std::ofstream(dir / "bad.json") << R"({"model": {"variant": "enerv", "heads": 3}})";
  try {
    cli::resolve_run_config(dir / "bad.json", {});
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model.heads") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::resolve_run_config(micro_config(dir), {"plan.epochs=\"many\""}), ConfigError);
  CHECK_THROWS_AS(cli::resolve_run_config(micro_config(dir), {"noequals"}), ConfigError);
}

TEST_CASE("json round trips") {
  const Json doc = cli::default_run_config();
  const ModelConfig c = model_config_from_json(doc["model"]);
  CHECK(model_config_from_json(to_json(c)) == c);
  TrainPlan p;
  p.epochs = 17;
  p.seed = 99;
  CHECK(train_plan_from_json(to_json(p)) == p);
}

TEST_CASE("fit, eval, interpolate, resume") {
  const fs::path dir = scratch("fit");
  const fs::path cfg = micro_config(dir);
  const std::string out = (dir / "run").string();

  Run r = run({"fit", "--config", cfg.string(), "--out", out, "--seed", "3"});
  REQUIRE(r.code == 0);
  for (const char* f : {"config.json", "checkpoint.bin", "fit_log.csv", "eval.csv", "fit_psnr.png", "log.txt"}) {
    CHECK(fs::exists(fs::path(out) / f));
  }
  CHECK(slurp(fs::path(out) / "fit_log.csv").rfind("epoch,loss,psnr_seen,seconds,lr\n", 0) == 0);
  const Json snap = Json::parse(slurp(fs::path(out) / "config.json"));
  CHECK(snap["plan"]["seed"] == 3);

  // an existing run directory is never silently reused
  r = run({"fit", "--config", cfg.string(), "--out", out});
  CHECK(r.code == 2);
  CHECK(r.err.find("--force") != std::string::npos);

  // the snapshot reproduces the run
  const std::string again = (dir / "again").string();
  REQUIRE(run({"fit", "--config", (fs::path(out) / "config.json").string(), "--out", again}).code == 0);
  CHECK(slurp(fs::path(out) / "eval.csv") == slurp(fs::path(again) / "eval.csv"));

  r = run({"eval", "--checkpoint", out + "/checkpoint.bin", "--config", cfg.string(), "--out", (dir / "ev").string(),
           "--frames"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "ev" / "frames" / "frame_00007.png"));
  CHECK(slurp(dir / "ev" / "eval.csv") == slurp(fs::path(out) / "eval.csv"));
  // without --config the snapshot beside the checkpoint supplies the data section
  REQUIRE(run({"eval", "--checkpoint", out + "/checkpoint.bin", "--out", (dir / "ev2").string()}).code == 0);
  CHECK(slurp(dir / "ev2" / "eval.csv") == slurp(fs::path(out) / "eval.csv"));

  r = run({"interpolate", "--checkpoint", out + "/checkpoint.bin", "--config", cfg.string(), "--out",
           (dir / "in").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "in" / "frames" / "interp_00001.png"));
  CHECK(slurp(dir / "in" / "interpolate.csv").find("unseen") != std::string::npos);
  r = run({"interpolate", "--checkpoint", out + "/checkpoint.bin", "--out", (dir / "in2").string(),
           "interpolate.ts=[0.5,1.5]"});
  CHECK(r.code == 2);

  // resume with more epochs
  r = run({"fit", "--config", cfg.string(), "--resume", out + "/checkpoint.bin", "--out", (dir / "more").string(),
           "--seed", "3", "plan.epochs=6"});
  REQUIRE(r.code == 0);
  const Json more = Json::parse(slurp(dir / "more" / "config.json"));
  CHECK(more["plan"]["epochs"] == 6);
  CHECK(more["run"]["resume"]["from_epoch"] == 4);
  CHECK(load_checkpoint(dir / "more" / "checkpoint.bin").state->epoch == 6);
  r = run({"fit", "--resume", out + "/checkpoint.bin", "--out", (dir / "more2").string(), "plan.epochs=6"});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "more2" / "eval.csv") == slurp(dir / "more" / "eval.csv"));

  // a different model or resolution is rejected
  r = run({"fit", "--config", cfg.string(), "--resume", out + "/checkpoint.bin", "--out", (dir / "bad").string(),
           "model.fusion_dim=8"});
  CHECK(r.code == 2);
  CHECK(r.err.find("model.fusion_dim") != std::string::npos);
  r = run({"fit", "--config", cfg.string(), "--resume", out + "/checkpoint.bin", "--out", (dir / "bad2").string(),
           "data.width=32"});
  CHECK(r.code == 3);
}

TEST_CASE("exit codes and other commands") {
  const fs::path dir = scratch("codes");
  const fs::path cfg = micro_config(dir);
  CHECK(run({"fit", "--config", (dir / "absent.json").string(), "--out", (dir / "a").string()}).code == 2);
  CHECK(run({"fit", "--config", cfg.string(), "--out", (dir / "b").string(), "data.synthetic=\"\""}).code == 3);
  CHECK(run({"fit", "--config", cfg.string(), "--out", (dir / "c").string(), "data.width=20"}).code == 3);
  CHECK(run({"fit", "--config", cfg.string(), "--out", (dir / "d").string(), "--device", "quantum"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"fit", "--config", cfg.string(), "--out", (dir / "e").string(), "plan.max_lr=1e30"}).code == 4);

  Run r = run({"params", "--ledger", "--out", (dir / "ledger").string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "ledger" / "ledger.csv");
  CHECK(csv.rfind("stage,group,count,total,psnr_if_known\n", 0) == 0);
  CHECK(csv.find("nerv_l,total,") != std::string::npos);
  r = run({"params", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("total,") != std::string::npos);

  REQUIRE(run({"fit", "--config", cfg.string(), "--out", (dir / "base").string()}).code == 0);
  r = run({"prune", "--checkpoint", (dir / "base" / "checkpoint.bin").string(), "--config", cfg.string(), "--out",
           (dir / "prune").string(), "prune.sparsity=[0.2,0.5]", "prune.finetune_epochs=1"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "prune" / "sweep.png"));
  CHECK(fs::exists(dir / "prune" / "sparsity_0.50" / "checkpoint.bin"));
  CHECK(slurp(dir / "prune" / "sweep.csv").rfind("sparsity,achieved,psnr,ms_ssim\n0.2000,", 0) == 0);

  r = run({"denoise", "--config", cfg.string(), "--out", (dir / "dn").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "dn" / "summary.csv").rfind("noisy_psnr,denoised_psnr,gain\n", 0) == 0);

  r = run({"freq-sweep", "--config", cfg.string(), "--out", (dir / "fq").string(), "freq.values=[1.05]",
           "freq.which=temporal"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "fq" / "freq.png"));
}
