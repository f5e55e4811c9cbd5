// Copyright 2026 The roivos Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roivos/synthseq.hpp"

#include "roivos/grid_io.hpp"
#include "roivos/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace roivos {

namespace {

struct Mover {
  Ellipse shape;
  double v_row = 0.0;
  double v_col = 0.0;
};

Mover spawn(Rng& rng, const SequenceConfig& cfg) {
  Mover m;
  m.shape.semi_rows = rng.uniform(cfg.axis_min, cfg.axis_max);
  m.shape.semi_cols = rng.uniform(cfg.axis_min, cfg.axis_max);
  m.shape.center_row = rng.uniform(m.shape.semi_rows, cfg.height - m.shape.semi_rows);
  m.shape.center_col = rng.uniform(m.shape.semi_cols, cfg.width - m.shape.semi_cols);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  m.v_row = cfg.motion_step * std::sin(angle);
  m.v_col = cfg.motion_step * std::cos(angle);
  return m;
}

// Reflect at the borders so the whole ellipse stays inside the grid.
void bounce(double& center, double& velocity, double semi, double extent) {
  if (center < semi) {
    center = 2.0 * semi - center;
    velocity = std::abs(velocity);
  } else if (center > extent - semi) {
    center = 2.0 * (extent - semi) - center;
    velocity = -std::abs(velocity);
  }
  center = std::clamp(center, semi, extent - semi);
}

void advance(Mover& m, Rng& rng, const SequenceConfig& cfg) {
  m.shape.center_row += m.v_row + cfg.jitter * rng.uniform(-1.0, 1.0);
  m.shape.center_col += m.v_col + cfg.jitter * rng.uniform(-1.0, 1.0);
  bounce(m.shape.center_row, m.v_row, m.shape.semi_rows, cfg.height);
  bounce(m.shape.center_col, m.v_col, m.shape.semi_cols, cfg.width);
}

double quantize(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

}  // namespace

bool Ellipse::covers(int r, int c) const {
  const double dr = (r + 0.5 - center_row) / semi_rows;
  const double dc = (c + 0.5 - center_col) / semi_cols;
  return dr * dr + dc * dc <= 1.0;
}

BinaryMask rasterize(const Ellipse& e, int height, int width) {
  BinaryMask mask(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (e.covers(r, c)) mask.set(r, c, true);
    }
  }
  return mask;
}

void SequenceConfig::validate() const {
  if (length < 2) throw std::invalid_argument("sequence length must be >= 2");
  if (height < 1 || width < 1 || channels < 1) {
    throw std::invalid_argument("grid and channel counts must be positive");
  }
  if (!(axis_min >= 1.0 && axis_min <= axis_max)) {
    throw std::invalid_argument("ellipse axis range must satisfy 1 <= axis_min <= axis_max");
  }
  if (2.0 * axis_max > std::min(height, width)) {
    throw std::invalid_argument("ellipse axis_max too large to keep the target inside the frame");
  }
  if (!(motion_step >= 0.0 && jitter >= 0.0)) throw std::invalid_argument("negative motion");
  if (!(drift_rate >= 0.0)) throw std::invalid_argument("drift_rate must be >= 0");
  if (distractors < 0) throw std::invalid_argument("distractors must be >= 0");
  if (!(distractor_gap >= 0.0 && distractor_gap <= 1.0)) {
    throw std::invalid_argument("distractor_gap must lie in [0,1]");
  }
  if (!(noise >= 0.0 && texture >= 0.0 && target_texture >= 0.0)) {
    throw std::invalid_argument("negative noise amplitude");
  }
  if (!(separation >= 0.0 && separation <= 0.5)) {
    throw std::invalid_argument("separation must lie in [0,0.5]");
  }
}

std::vector<std::string> SequenceConfig::keys() {
  return {"length",     "height",      "width",    "channels",   "axis_min",
          "axis_max",   "motion_step", "jitter",   "drift_rate", "distractors",
          "distractor_gap", "noise",       "texture",  "separation", "target_texture"};
}

KeyValues SequenceConfig::to_key_values() const {
  KeyValues kv;
  kv.set("length", length);
  kv.set("height", height);
  kv.set("width", width);
  kv.set("channels", channels);
  kv.set("axis_min", axis_min);
  kv.set("axis_max", axis_max);
  kv.set("motion_step", motion_step);
  kv.set("jitter", jitter);
  kv.set("drift_rate", drift_rate);
  kv.set("distractors", distractors);
  kv.set("distractor_gap", distractor_gap);
  kv.set("noise", noise);
  kv.set("texture", texture);
  kv.set("separation", separation);
  kv.set("target_texture", target_texture);
  return kv;
}

SequenceConfig SequenceConfig::from_key_values(const KeyValues& kv) {
  SequenceConfig c;
  c.length = static_cast<int>(kv.get_int("length", c.length));
  c.height = static_cast<int>(kv.get_int("height", c.height));
  c.width = static_cast<int>(kv.get_int("width", c.width));
  c.channels = static_cast<int>(kv.get_int("channels", c.channels));
  c.axis_min = kv.get_double("axis_min", c.axis_min);
  c.axis_max = kv.get_double("axis_max", c.axis_max);
  c.motion_step = kv.get_double("motion_step", c.motion_step);
  c.jitter = kv.get_double("jitter", c.jitter);
  c.drift_rate = kv.get_double("drift_rate", c.drift_rate);
  c.distractors = static_cast<int>(kv.get_int("distractors", c.distractors));
  c.distractor_gap = kv.get_double("distractor_gap", c.distractor_gap);
  c.noise = kv.get_double("noise", c.noise);
  c.texture = kv.get_double("texture", c.texture);
  c.separation = kv.get_double("separation", c.separation);
  c.target_texture = kv.get_double("target_texture", c.target_texture);
  return c;
}

SyntheticSequence generate_sequence(const SequenceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const int h = cfg.height;
  const int w = cfg.width;
  const int nch = cfg.channels;

  // Background: base colour at a fixed distance from the target colour in a
  // random direction, plus a static two-wave texture per channel.
  std::vector<double> target0(nch);
  for (int ch = 0; ch < nch; ++ch) target0[ch] = rng.uniform(0.3, 0.7);
  std::vector<double> base(nch);
  double norm = 0.0;
  for (int ch = 0; ch < nch; ++ch) {
    base[ch] = rng.normal();
    norm += base[ch] * base[ch];
  }
  norm = std::sqrt(norm);
  for (int ch = 0; ch < nch; ++ch) {
    base[ch] = std::clamp(target0[ch] + cfg.separation * base[ch] / norm, 0.0, 1.0);
  }
  std::vector<Grid<double>> background(nch, Grid<double>(h, w));
  for (int ch = 0; ch < nch; ++ch) {
    const double f1 = rng.uniform(0.02, 0.12), g1 = rng.uniform(0.02, 0.12);
    const double f2 = rng.uniform(0.02, 0.12), g2 = rng.uniform(0.02, 0.12);
    const double p1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double p2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const double t = std::sin(2.0 * std::numbers::pi * (f1 * r + g1 * c) + p1) +
                         std::sin(2.0 * std::numbers::pi * (f2 * r - g2 * c) + p2);
        background[ch](r, c) = base[ch] + 0.5 * cfg.texture * t;
      }
    }
  }

  // Target pattern, indexed by offset from the ellipse centre so it moves
  // with the object.
  const int span = 2 * static_cast<int>(std::ceil(cfg.axis_max)) + 3;
  std::vector<Grid<double>> pattern(nch, Grid<double>(span, span));
  for (auto& plane : pattern) {
    for (Eigen::Index i = 0; i < plane.size(); ++i) {
      plane.data()[i] = cfg.target_texture * rng.uniform(-1.0, 1.0);
    }
  }

  std::vector<double> drift_sign(nch);
  for (int ch = 0; ch < nch; ++ch) drift_sign[ch] = rng.uniform() < 0.5 ? -1.0 : 1.0;

  Mover target = spawn(rng, cfg);
  std::vector<Mover> distractors;
  std::vector<std::vector<double>> distractor_offset;
  for (int k = 0; k < cfg.distractors; ++k) {
    distractors.push_back(spawn(rng, cfg));
    std::vector<double> offset(nch);
    for (int ch = 0; ch < nch; ++ch) {
      offset[ch] = rng.uniform() < 0.5 ? -cfg.distractor_gap : cfg.distractor_gap;
    }
    distractor_offset.push_back(std::move(offset));
  }

  SyntheticSequence seq;
  seq.name = "seq_" + std::to_string(seed);
  seq.seed = seed;
  seq.config = cfg;
  for (int t = 0; t < cfg.length; ++t) {
    if (t > 0) {
      advance(target, rng, cfg);
      for (auto& d : distractors) advance(d, rng, cfg);
    }
    std::vector<double> color(nch);
    for (int ch = 0; ch < nch; ++ch) {
      color[ch] = std::clamp(target0[ch] + t * cfg.drift_rate * drift_sign[ch], 0.0, 1.0);
    }

    std::vector<Grid<double>> planes = background;
    for (std::size_t k = 0; k < distractors.size(); ++k) {
      const BinaryMask support = rasterize(distractors[k].shape, h, w);
      for (int ch = 0; ch < nch; ++ch) {
        const double v = color[ch] + distractor_offset[k][ch];
        planes[ch] = (support.cells() != 0).select(v, planes[ch]);
      }
    }
    BinaryMask truth = rasterize(target.shape, h, w);
    const int r0 = static_cast<int>(std::floor(target.shape.center_row)) - span / 2;
    const int c0 = static_cast<int>(std::floor(target.shape.center_col)) - span / 2;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (!truth(r, c)) continue;
        const int pr = std::clamp(r - r0, 0, span - 1);
        const int pc = std::clamp(c - c0, 0, span - 1);
        for (int ch = 0; ch < nch; ++ch) planes[ch](r, c) = color[ch] + pattern[ch](pr, pc);
      }
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        for (int ch = 0; ch < nch; ++ch) {
          planes[ch](r, c) = quantize(planes[ch](r, c) + cfg.noise * rng.uniform(-1.0, 1.0));
        }
      }
    }

    seq.frames.emplace_back(std::move(planes));
    seq.truths.push_back(std::move(truth));
    seq.target_track.push_back(target.shape);
  }
  return seq;
}

std::string Clip::id() const { return sequence_name + "_f" + std::to_string(start); }

std::vector<Clip> extract_clips(std::span<const SyntheticSequence> sequences, int clip_len,
                                int stride) {
  if (clip_len < 2) throw std::invalid_argument("clip length must be >= 2");
  if (stride < 1) throw std::invalid_argument("clip stride must be >= 1");
  std::vector<Clip> clips;
  for (const auto& seq : sequences) {
    for (int start = 0; start + clip_len <= seq.length(); start += stride) {
      Clip clip;
      clip.sequence_name = seq.name;
      clip.start = start;
      clip.frames.assign(seq.frames.begin() + start, seq.frames.begin() + start + clip_len);
      clip.truths.assign(seq.truths.begin() + start, seq.truths.begin() + start + clip_len);
      clips.push_back(std::move(clip));
    }
  }
  return clips;
}

namespace {

std::string numbered(const char* prefix, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.%s", prefix, index, ext);
  return buf;
}

}  // namespace

void save_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq) {
  std::filesystem::create_directories(dir);
  for (int t = 0; t < seq.length(); ++t) {
    write_ppm(dir / numbered("frame", t + 1, "ppm"), seq.frames[t]);
    write_mask(dir / numbered("truth", t + 1, "msk"), seq.truths[t]);
  }
  KeyValues manifest = seq.config.to_key_values();
  manifest.set("name", seq.name);
  manifest.set("seed", static_cast<unsigned long long>(seq.seed));
  manifest.set("grid", std::to_string(seq.config.height) + "x" + std::to_string(seq.config.width));
  write_file(dir / "manifest.txt", manifest.format());
}

SyntheticSequence load_sequence(const std::filesystem::path& dir) {
  const KeyValues manifest = KeyValues::load((dir / "manifest.txt").string());
  SyntheticSequence seq;
  seq.config = SequenceConfig::from_key_values(manifest);
  seq.name = manifest.get("name");
  seq.seed = manifest.get_uint("seed");
  for (int t = 0; t < seq.config.length; ++t) {
    seq.frames.push_back(read_ppm(dir / numbered("frame", t + 1, "ppm")));
    seq.truths.push_back(read_mask(dir / numbered("truth", t + 1, "msk")));
  }
  return seq;
}

void save_clip(const std::filesystem::path& dir, const Clip& clip) {
  std::filesystem::create_directories(dir);
  for (int t = 0; t < clip.length(); ++t) {
    write_ppm(dir / numbered("frame", t + 1, "ppm"), clip.frames[t]);
    write_mask(dir / numbered("truth", t + 1, "msk"), clip.truths[t]);
  }
  KeyValues manifest;
  manifest.set("sequence", clip.sequence_name);
  manifest.set("start", clip.start);
  manifest.set("length", clip.length());
  write_file(dir / "manifest.txt", manifest.format());
}

Clip load_clip(const std::filesystem::path& dir) {
  const KeyValues manifest = KeyValues::load((dir / "manifest.txt").string());
  Clip clip;
  clip.sequence_name = manifest.get("sequence");
  clip.start = static_cast<int>(manifest.get_int("start"));
  const auto length = manifest.get_int("length");
  for (int t = 0; t < length; ++t) {
    clip.frames.push_back(read_ppm(dir / numbered("frame", t + 1, "ppm")));
    clip.truths.push_back(read_mask(dir / numbered("truth", t + 1, "msk")));
  }
  return clip;
}

}  // namespace roivos
