// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/config.hpp"

#include <set>

#include "enerv/errors.hpp"

namespace enerv {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(join(path_, key) + ": wrong type (" + it->dump() + ")");
    }
  }

  void get(const char* key, FreqEncodingSpec& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader r(*it, join(path_, key));
    r.get("base", out.base);
    r.get("levels", out.levels);
    r.finish();
  }

  void get_pair(const char* key, int& a, int& b) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
      throw ConfigError(join(path_, key) + ": expected [height, width]");
    }
    a = (*it)[0].get<int>();
    b = (*it)[1].get<int>();
  }

  void get_optional(const char* key, std::optional<int>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    if (!it->is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer or null");
    out = it->get<int>();
  }

  const Json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + join(path_, it.key()) + "'");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

Json to_json(const FreqEncodingSpec& spec) { return Json{{"base", spec.base}, {"levels", spec.levels}}; }

Json to_json(const ModelConfig& c) {
  Json j;
  j["variant"] = std::string(variant_name(c.variant));
  j["base_hw"] = {c.base_h, c.base_w};
  j["strides"] = c.strides;
  j["block_channels"] = c.block_channels;
  j["fusion_dim"] = c.fusion_dim;
  j["spatial_dim"] = c.spatial_dim;
  j["in_dim"] = c.in_dim;
  j["heads_fusion"] = c.heads_fusion;
  j["mlp_dim_phi"] = c.mlp_dim_phi;
  j["temporal_spec"] = to_json(c.temporal_spec);
  j["spatial_spec"] = to_json(c.spatial_spec);
  j["in_spec"] = to_json(c.in_spec);
  j["use_phi"] = c.use_phi;
  j["use_fusion"] = c.use_fusion;
  j["use_temporal_in"] = c.use_temporal_in;
  j["upgraded_first_block"] = c.upgraded_first_block;
  j["upgraded_all_blocks"] = c.upgraded_all_blocks;
  j["cs_dim"] = c.cs_dim ? Json(*c.cs_dim) : Json(nullptr);
  j["temporal_hidden"] = c.temporal_hidden;
  j["in_hidden"] = c.in_hidden;
  j["target_hw"] = {c.target_h, c.target_w};
  return j;
}

Json to_json(const TrainPlan& p) {
  return Json{{"epochs", p.epochs},
              {"batch_size", p.batch_size},
              {"max_lr", p.max_lr},
              {"warmup_frac", p.warmup_frac},
              {"alpha", p.alpha},
              {"seed", p.seed},
              {"log_every", p.log_every},
              {"checkpoint_every", p.checkpoint_every},
              {"beta1", p.beta1},
              {"beta2", p.beta2},
              {"adam_eps", p.adam_eps}};
}

ModelConfig model_config_from_json(const Json& j, const std::string& path) {
  ModelConfig c;
  Reader r(j, path);
  std::string variant = std::string(variant_name(c.variant));
  r.get("variant", variant);
  c.variant = parse_variant(variant);
  r.get_pair("base_hw", c.base_h, c.base_w);
  r.get("strides", c.strides);
  r.get("block_channels", c.block_channels);
  r.get("fusion_dim", c.fusion_dim);
  r.get("spatial_dim", c.spatial_dim);
  r.get("in_dim", c.in_dim);
  r.get("heads_fusion", c.heads_fusion);
  r.get("mlp_dim_phi", c.mlp_dim_phi);
  r.get("temporal_spec", c.temporal_spec);
  r.get("spatial_spec", c.spatial_spec);
  r.get("in_spec", c.in_spec);
  r.get("use_phi", c.use_phi);
  r.get("use_fusion", c.use_fusion);
  r.get("use_temporal_in", c.use_temporal_in);
  r.get("upgraded_first_block", c.upgraded_first_block);
  r.get("upgraded_all_blocks", c.upgraded_all_blocks);
  r.get_optional("cs_dim", c.cs_dim);
  r.get("temporal_hidden", c.temporal_hidden);
  r.get("in_hidden", c.in_hidden);
  r.get_pair("target_hw", c.target_h, c.target_w);
  r.finish();
  return c;
}

TrainPlan train_plan_from_json(const Json& j, const std::string& path) {
  TrainPlan p;
  Reader r(j, path);
  r.get("epochs", p.epochs);
  r.get("batch_size", p.batch_size);
  r.get("max_lr", p.max_lr);
  r.get("warmup_frac", p.warmup_frac);
  r.get("alpha", p.alpha);
  r.get("seed", p.seed);
  r.get("log_every", p.log_every);
  r.get("checkpoint_every", p.checkpoint_every);
  r.get("beta1", p.beta1);
  r.get("beta2", p.beta2);
  r.get("adam_eps", p.adam_eps);
  r.finish();
  return p;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json* node = &doc;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  Json value = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  *node = std::move(value);
}

void check_known_keys(const Json& doc, const Json& schema, const std::string& path) {
  if (!doc.is_object() || !schema.is_object()) return;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string p = join(path, it.key());
    auto s = schema.find(it.key());
    if (s == schema.end()) throw ConfigError("unknown config key '" + p + "'");
    if (it->is_object() && s->is_object()) check_known_keys(*it, *s, p);
  }
}

void merge_into(Json& base, const Json& patch) {
  if (!patch.is_object() || !base.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it->is_object()) {
      merge_into(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

}  // namespace enerv
