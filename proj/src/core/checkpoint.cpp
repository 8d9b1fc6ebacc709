// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "enerv/config.hpp"
#include "enerv/errors.hpp"

namespace enerv {

namespace {

constexpr char kMagic[8] = {'E', 'N', 'E', 'R', 'V', 'C', 'K', '1'};

void write_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

template <typename T>
void write_blob(std::ostream& os, const Tensor<T>& t) {
  os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(T)));
}

template <typename T>
void read_blob(std::istream& is, Tensor<T>& t, const std::filesystem::path& path) {
  is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(T)));
  if (!is) throw DataError("checkpoint '" + path.string() + "' is truncated");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const VideoINR<float>& model, const TrainPlan* plan,
                     const TrainerState* state) {
  const auto& params = model.params();
  Json header;
  header["version"] = kLibraryVersion;
  header["seed"] = model.seed();
  header["config"] = to_json(model.config());
  if (plan) header["plan"] = to_json(*plan);
  Json index = Json::array();
  for (const auto& p : params.all()) index.push_back({{"name", p.name}, {"shape", p.value.shape()}});
  header["params"] = index;
  if (state) {
    Json s;
    s["step"] = state->step;
    s["epoch"] = state->epoch;
    s["adam"] = {{"beta1", state->optimizer.beta1()},
                 {"beta2", state->optimizer.beta2()},
                 {"eps", state->optimizer.eps()},
                 {"steps", state->optimizer.steps()},
                 {"has_moments", !state->optimizer.first_moment().empty()}};
    Json masked = Json::array();
    for (const auto& m : state->masks) masked.push_back(!m.empty());
    s["masked"] = masked;
    Json epochs = Json::array();
    for (const auto& e : state->log.epochs) epochs.push_back({e.epoch, e.loss, e.psnr_seen, e.seconds, e.lr});
    s["log"] = {{"epochs", epochs}, {"lr_trace", state->log.lr_trace}, {"step_losses", state->log.step_losses}};
    header["state"] = s;
  }
  const std::string text = header.dump();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write checkpoint '" + path.string() + "'");
    os.write(kMagic, sizeof kMagic);
    write_u64(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& p : params.all()) write_blob(os, p.value);
    if (state) {
      if (!state->optimizer.first_moment().empty()) {
        for (const auto& m : state->optimizer.first_moment()) write_blob(os, m);
        for (const auto& v : state->optimizer.second_moment()) write_blob(os, v);
      }
      for (const auto& m : state->masks) {
        if (!m.empty()) write_blob(os, m);
      }
    }
    if (!os) throw DataError("failed writing checkpoint '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint '" + path.string() + "'");
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw DataError("'" + path.string() + "' is not an enerv checkpoint");
  const uint64_t len = read_u64(is);
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));
  if (!is) throw DataError("checkpoint '" + path.string() + "' is truncated");
  const Json header = Json::parse(text, nullptr, false);
  if (header.is_discarded()) throw DataError("checkpoint '" + path.string() + "' has a corrupt header");

  const ModelConfig config = model_config_from_json(header.at("config"));
  LoadedCheckpoint out{VideoINR<float>::build(config, header.at("seed").get<uint64_t>()), std::nullopt, std::nullopt,
                       header.at("version").get<std::string>()};
  auto& params = out.model.params();
  const Json& index = header.at("params");
  if (index.size() != params.size()) throw DataError("checkpoint parameter count does not match its config");
  for (size_t i = 0; i < params.size(); ++i) {
    if (index[i].at("name").get<std::string>() != params[i].name ||
        index[i].at("shape").get<Shape>() != params[i].value.shape()) {
      throw DataError("checkpoint parameter '" + index[i].at("name").get<std::string>() + "' does not match the model");
    }
    read_blob(is, params[i].value, path);
  }
  if (header.contains("plan")) out.plan = train_plan_from_json(header["plan"]);
  if (header.contains("state")) {
    const Json& s = header["state"];
    TrainerState st;
    const Json& a = s.at("adam");
    if (a.at("has_moments").get<bool>()) {
      st.optimizer = Adam(params, a.at("beta1").get<double>(), a.at("beta2").get<double>(), a.at("eps").get<double>());
      for (auto& m : st.optimizer.first_moment()) read_blob(is, m, path);
      for (auto& v : st.optimizer.second_moment()) read_blob(is, v, path);
      st.optimizer.set_steps(a.at("steps").get<int64_t>());
    }
    st.step = s.at("step").get<int64_t>();
    st.epoch = s.at("epoch").get<int>();
    const Json& masked = s.at("masked");
    if (!masked.empty()) {
      st.masks.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i) {
        if (masked.at(i).get<bool>()) {
          st.masks[i] = Tensor<uint8_t>(params[i].value.shape());
          read_blob(is, st.masks[i], path);
        }
      }
    }
    for (const auto& e : s.at("log").at("epochs")) {
      st.log.epochs.push_back({e[0].get<int>(), e[1].get<double>(), e[2].get<double>(), e[3].get<double>(),
                               e[4].get<double>()});
    }
    st.log.lr_trace = s.at("log").at("lr_trace").get<std::vector<double>>();
    st.log.step_losses = s.at("log").at("step_losses").get<std::vector<double>>();
    out.state = std::move(st);
  }
  return out;
}

}  // namespace enerv
