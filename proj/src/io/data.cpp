// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "enerv/data.hpp"
#include "enerv/errors.hpp"

namespace enerv {

namespace fs = std::filesystem;

std::string_view split_name(Split s) { return s == Split::kSeen ? "seen" : "unseen"; }

Tensor<float> FrameDataset::frame(int64_t k) const {
  if (k < 0 || k >= num_frames()) throw std::out_of_range("frame index " + std::to_string(k));
  Tensor<float> f({3, height(), width()});
  std::copy_n(frame_data(k), f.size(), f.data());
  return f;
}

std::vector<int64_t> FrameDataset::training_frames() const {
  if (!has_split()) {
    std::vector<int64_t> all(static_cast<size_t>(num_frames()));
    for (int64_t k = 0; k < num_frames(); ++k) all[k] = k;
    return all;
  }
  return frames_in(Split::kSeen);
}

std::vector<int64_t> FrameDataset::frames_in(Split s) const {
  std::vector<int64_t> out;
  for (int64_t k = 0; k < num_frames(); ++k) {
    if (!has_split() ? s == Split::kSeen : split[k] == s) out.push_back(k);
  }
  return out;
}

void FrameDataset::validate() const {
  if (frames.rank() != 4 || frames.dim(1) != 3) {
    throw DataError("dataset frames must be T x 3 x H x W, got " + shape_to_string(frames.shape()));
  }
  if (num_frames() < 1) throw DataError("dataset has no frames");
  if (static_cast<int64_t>(indices.size()) != num_frames()) throw DataError("dataset index count mismatch");
  if (has_split() && static_cast<int64_t>(split.size()) != num_frames()) throw DataError("split mask length mismatch");
}

std::vector<double> normalized_indices(int64_t num_frames) {
  if (num_frames < 1) throw DataError("a video needs at least one frame");
  std::vector<double> t(static_cast<size_t>(num_frames));
  if (num_frames == 1) return t;  // a single frame sits at t = 0
  for (int64_t k = 0; k < num_frames; ++k) t[k] = static_cast<double>(k) / static_cast<double>(num_frames - 1);
  t.back() = 1.0;
  return t;
}

FrameDataset make_dataset(Tensor<float> frames, std::string source) {
  FrameDataset ds;
  ds.frames = std::move(frames);
  ds.source = std::move(source);
  if (ds.frames.rank() != 4) throw DataError("frames must be T x 3 x H x W");
  ds.indices = normalized_indices(ds.frames.dim(0));
  ds.validate();
  return ds;
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Tensor<float> stack(const std::vector<Tensor<float>>& frames) {
  const int64_t h = frames.front().dim(1), w = frames.front().dim(2);
  Tensor<float> out({static_cast<int64_t>(frames.size()), 3, h, w});
  for (size_t k = 0; k < frames.size(); ++k) {
    std::copy_n(frames[k].data(), frames[k].size(), out.data() + k * 3 * h * w);
  }
  return out;
}

float to_unit(double v) { return static_cast<float>(std::clamp(v, 0.0, 255.0) / 255.0); }

// YUV4MPEG2 with 8-bit 4:2:0, 4:2:2, 4:4:4 or mono planes, BT.601 studio range.
std::vector<Tensor<float>> read_y4m(const fs::path& path, int max_frames) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string tok;
  hs >> tok;
  if (tok != "YUV4MPEG2") throw DataError("'" + path.string() + "' is not a YUV4MPEG2 stream");
  int w = 0, h = 0;
  std::string chroma = "420jpeg";
  while (hs >> tok) {
    if (tok[0] == 'W') w = std::stoi(tok.substr(1));
    if (tok[0] == 'H') h = std::stoi(tok.substr(1));
    if (tok[0] == 'C') chroma = tok.substr(1);
  }
  if (w < 1 || h < 1) throw DataError("'" + path.string() + "': missing frame size in header");
  int cw = 0, ch = 0;
  if (chroma.rfind("420", 0) == 0) {
    cw = (w + 1) / 2;
    ch = (h + 1) / 2;
  } else if (chroma == "422") {
    cw = (w + 1) / 2;
    ch = h;
  } else if (chroma == "444") {
    cw = w;
    ch = h;
  } else if (chroma != "mono") {
    throw DataError("'" + path.string() + "': unsupported chroma format C" + chroma);
  }
  std::vector<Tensor<float>> frames;
  std::vector<uint8_t> y(static_cast<size_t>(w) * h), u(static_cast<size_t>(cw) * ch), v(u.size());
  std::string marker;
  while (std::getline(in, marker)) {
    if (marker.rfind("FRAME", 0) != 0) throw DataError("'" + path.string() + "': corrupt frame marker");
    in.read(reinterpret_cast<char*>(y.data()), static_cast<std::streamsize>(y.size()));
    if (cw > 0) {
      in.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(u.size()));
      in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size()));
    }
    if (!in) throw DataError("'" + path.string() + "': truncated frame " + std::to_string(frames.size()));
    // BT.601 limited range
    constexpr double ky = 255.0 / 219.0, kc = 255.0 / 224.0;
    Tensor<float> f({3, h, w});
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double yy = ky * (y[static_cast<size_t>(r) * w + c] - 16.0);
        double cb = 0, cr = 0;
        if (cw > 0) {
          const size_t ci = static_cast<size_t>(r * ch / h) * cw + static_cast<size_t>(c * cw / w);
          cb = u[ci] - 128.0;
          cr = v[ci] - 128.0;
        }
        f.at(0, r, c) = to_unit(yy + kc * 1.402 * cr);
        f.at(1, r, c) = to_unit(yy - kc * (0.344136 * cb + 0.714136 * cr));
        f.at(2, r, c) = to_unit(yy + kc * 1.772 * cb);
      }
    }
    frames.push_back(std::move(f));
    if (max_frames > 0 && static_cast<int>(frames.size()) >= max_frames) break;
  }
  if (frames.empty()) throw DataError("'" + path.string() + "' contains no frames");
  return frames;
}

}  // namespace

FrameDataset load_video(const fs::path& path, const LoadOptions& options) {
  if (!fs::exists(path)) throw DataError("video path '" + path.string() + "' does not exist");
  if ((options.resize_h > 0) != (options.resize_w > 0)) throw ConfigError("resize needs both height and width");
  std::vector<Tensor<float>> frames;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      const std::string ext = lower(e.path().extension().string());
      if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no PNG/JPEG frames in '" + path.string() + "'");
    if (options.max_frames > 0 && static_cast<int>(files.size()) > options.max_frames) files.resize(options.max_frames);
    for (const auto& f : files) {
      Tensor<float> img = read_image(f);
      if (!frames.empty() && img.shape() != frames.front().shape()) {
        throw DataError("frame '" + f.string() + "' is " + shape_to_string(img.shape()) + " but earlier frames are " +
                        shape_to_string(frames.front().shape()));
      }
      frames.push_back(std::move(img));
    }
  } else if (lower(path.extension().string()) == ".y4m") {
    frames = read_y4m(path, options.max_frames);
  } else {
    throw DataError("'" + path.string() + "' is neither a frame directory nor a .y4m file");
  }
  if (options.resize_h > 0) {
    for (auto& f : frames) f = resize_bilinear(f, options.resize_h, options.resize_w);
  }
  return make_dataset(stack(frames), path.string());
}

FrameDataset split_seen_unseen(const FrameDataset& ds) {
  ds.validate();
  if (ds.num_frames() < 4) {
    throw DataError("seen/unseen split needs at least 4 frames, got " + std::to_string(ds.num_frames()));
  }
  FrameDataset out = ds;
  out.split.assign(static_cast<size_t>(ds.num_frames()), Split::kSeen);
  for (int64_t k = 3; k < ds.num_frames(); k += 4) out.split[k] = Split::kUnseen;
  return out;
}

// ---------------------------------------------------------- synthetic clips

std::string_view clip_kind_name(ClipKind k) {
  switch (k) {
    case ClipKind::kMovingSquare: return "moving_square";
    case ClipKind::kGradientPan: return "gradient_pan";
    case ClipKind::kComposite: return "composite";
  }
  return "unknown";
}

ClipKind parse_clip_kind(std::string_view name) {
  for (ClipKind k : {ClipKind::kMovingSquare, ClipKind::kGradientPan, ClipKind::kComposite}) {
    if (clip_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown synthetic clip kind '" + std::string(name) + "'");
}

namespace {

struct Rgb {
  float r, g, b;
};

Rgb random_colour(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {static_cast<float>(d(rng)), static_cast<float>(d(rng)), static_cast<float>(d(rng))};
}

void put(Tensor<float>& clip, int64_t k, int64_t y, int64_t x, const Rgb& c) {
  const int64_t h = clip.dim(2), w = clip.dim(3);
  float* base = clip.data() + k * 3 * h * w + y * w + x;
  base[0] = c.r;
  base[h * w] = c.g;
  base[2 * h * w] = c.b;
}

void pan_background(Tensor<float>& clip, int64_t k, double shift, const double phase[3], double fx, double fy) {
  const int64_t h = clip.dim(2), w = clip.dim(3);
  for (int c = 0; c < 3; ++c) {
    for (int64_t y = 0; y < h; ++y) {
      for (int64_t x = 0; x < w; ++x) {
        const double u = (static_cast<double>(x) + shift) / static_cast<double>(w);
        const double v = static_cast<double>(y) / static_cast<double>(h);
        const double a = 2 * std::numbers::pi * (fx * u + fy * v) + phase[c];
        clip[((k * 3 + c) * h + y) * w + x] = static_cast<float>(0.5 + 0.3 * std::sin(a) + 0.1 * std::cos(2.3 * a));
      }
    }
  }
}

}  // namespace

FrameDataset synth_clip(ClipKind kind, int num_frames, int height, int width, uint64_t seed) {
  if (num_frames < 1 || height < 1 || width < 1) throw ConfigError("synthetic clip dimensions must be positive");
  std::mt19937_64 rng(seed);
  Tensor<float> clip({num_frames, 3, height, width});
  switch (kind) {
    case ClipKind::kMovingSquare: {
      const Rgb bg = random_colour(rng, 0.1, 0.4), fg = random_colour(rng, 0.6, 0.9);
      const int side = std::max(2, std::min(height, width) / 4);
      const int span = std::max(1, width - side);
      const int x0 = static_cast<int>(rng() % static_cast<uint64_t>(std::max(1, span - num_frames + 1)));
      const int y0 = (height - side) / 2;
      for (int k = 0; k < num_frames; ++k) {
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) put(clip, k, y, x, bg);
        }
        const int xs = x0 + k;  // one pixel per frame
        for (int y = std::max(0, y0); y < std::min(height, y0 + side); ++y) {
          for (int x = xs; x < xs + side; ++x) put(clip, k, y, x % width, fg);
        }
      }
      break;
    }
    case ClipKind::kGradientPan: {
      std::uniform_real_distribution<double> ph(0, 2 * std::numbers::pi);
      const double phase[3] = {ph(rng), ph(rng), ph(rng)};
      const double speed = 0.5 * width / std::max(1, num_frames);  // pixels per frame
      for (int k = 0; k < num_frames; ++k) pan_background(clip, k, speed * k, phase, 1.5, 0.5);
      break;
    }
    case ClipKind::kComposite: {
      std::uniform_real_distribution<double> ph(0, 2 * std::numbers::pi);
      const double phase[3] = {ph(rng), ph(rng), ph(rng)};
      struct Square {
        double x, y, vx, vy;
        int side;
        Rgb colour;
      };
      std::vector<Square> squares;
      std::uniform_real_distribution<double> ux(0, width), uy(0, height), uv(-2.5, 2.5);
      for (int i = 0; i < 3; ++i) {
        Square s{ux(rng), uy(rng), uv(rng), uv(rng) * 0.5, std::max(2, std::min(height, width) / (5 + 2 * i)),
                 random_colour(rng, 0.05, 0.95)};
        if (std::fabs(s.vx) < 0.75) s.vx = s.vx < 0 ? -0.75 : 0.75;
        squares.push_back(s);
      }
      for (int k = 0; k < num_frames; ++k) {
        pan_background(clip, k, 0.75 * k, phase, 2.0, 1.0);
        for (const auto& s : squares) {
          const double cx = s.x + s.vx * k, cy = s.y + s.vy * k;
          const int x0 = static_cast<int>(std::floor(cx)), y0 = static_cast<int>(std::floor(cy));
          for (int dy = 0; dy < s.side; ++dy) {
            for (int dx = 0; dx < s.side; ++dx) {
              const int y = ((y0 + dy) % height + height) % height, x = ((x0 + dx) % width + width) % width;
              put(clip, k, y, x, s.colour);
            }
          }
        }
      }
      break;
    }
  }
  return make_dataset(std::move(clip), "synthetic:" + std::string(clip_kind_name(kind)));
}

}  // namespace enerv
