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

// Deterministic synthetic video: a drifting-colour elliptical target moving
// over a textured background, optionally accompanied by look-alike
// distractor ellipses rendered underneath it.

#pragma once

#include "roivos/frame.hpp"
#include "roivos/grid.hpp"
#include "roivos/key_values.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace roivos {

/// Axis-aligned ellipse in pixel coordinates; pixel (r, c) is covered when
/// its centre (r + 0.5, c + 0.5) lies inside or on the ellipse.
struct Ellipse {
  double center_row = 0.0;
  double center_col = 0.0;
  double semi_rows = 1.0;
  double semi_cols = 1.0;

  [[nodiscard]] bool covers(int r, int c) const;
};

BinaryMask rasterize(const Ellipse& e, int height, int width);

struct SequenceConfig {
  int length = 30;
  int height = 64;
  int width = 64;
  int channels = 3;
  double axis_min = 7.0;   // semi-axis range, pixels
  double axis_max = 11.0;
  double motion_step = 3.0;  // pixels / frame
  double jitter = 0.3;       // per-frame centre jitter amplitude, pixels
  double drift_rate = 0.006;  // mean colour change per channel, per frame
  int distractors = 2;
  double distractor_gap = 0.35;  // per-channel |distractor - target| colour gap
  double noise = 0.03;       // per-pixel, per-frame uniform noise amplitude
  double texture = 0.12;     // static background texture amplitude
  double separation = 0.32;  // target/background mean colour distance (Euclidean)
  double target_texture = 0.12;  // static per-pixel target pattern amplitude

  /// Throws std::invalid_argument for configs that cannot be rendered.
  void validate() const;

  [[nodiscard]] KeyValues to_key_values() const;
  /// Missing keys keep their defaults.
  static SequenceConfig from_key_values(const KeyValues& kv);
  static std::vector<std::string> keys();
};

struct SyntheticSequence {
  std::string name;
  std::uint64_t seed = 0;
  SequenceConfig config;
  std::vector<Frame> frames;
  std::vector<BinaryMask> truths;
  /// Per-frame target geometry; empty for sequences loaded from disk.
  std::vector<Ellipse> target_track;

  [[nodiscard]] int length() const { return static_cast<int>(frames.size()); }
};

SyntheticSequence generate_sequence(const SequenceConfig& config, std::uint64_t seed);

/// Contiguous window of a sequence used as one training episode.
struct Clip {
  std::string sequence_name;
  int start = 0;  // 0-based index of the first frame within the sequence
  std::vector<Frame> frames;
  std::vector<BinaryMask> truths;

  [[nodiscard]] int length() const { return static_cast<int>(frames.size()); }
  [[nodiscard]] std::string id() const;
};

std::vector<Clip> extract_clips(std::span<const SyntheticSequence> sequences, int clip_len,
                                int stride);

/// Writes frame_%04d.ppm, truth_%04d.msk (1-based) and manifest.txt.
void save_sequence(const std::filesystem::path& dir, const SyntheticSequence& seq);
SyntheticSequence load_sequence(const std::filesystem::path& dir);

/// Same file names as a sequence; the manifest records the source sequence
/// name, start offset and length.
void save_clip(const std::filesystem::path& dir, const Clip& clip);
Clip load_clip(const std::filesystem::path& dir);

}  // namespace roivos
