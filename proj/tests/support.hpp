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

// Random instance generators and brute-force reference implementations
// shared by the unit and acceptance tests. The references are written
// directly from the definitions and deliberately share no code with the
// library.

#pragma once

#include "roivos/frame.hpp"
#include "roivos/grid.hpp"
#include "roivos/rng.hpp"
#include "roivos/synthseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace roivos::testing {

inline BinaryMask random_mask(Rng& rng, int h, int w, double density) {
  BinaryMask m(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) m.set(r, c, rng.uniform() < density);
  }
  return m;
}

inline ProbabilityMap random_map(Rng& rng, int h, int w) {
  Grid<float> cells(h, w);
  for (Eigen::Index i = 0; i < cells.size(); ++i) {
    cells.data()[i] = static_cast<float>(rng.uniform());
  }
  return ProbabilityMap(std::move(cells));
}

inline Frame random_frame(Rng& rng, int h, int w, int channels) {
  std::vector<Grid<double>> planes(channels, Grid<double>(h, w));
  for (auto& p : planes) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
  }
  return Frame(std::move(planes));
}

inline std::vector<Pixel> mask_pixels(const BinaryMask& m) {
  std::vector<Pixel> out;
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (m(r, c)) out.push_back({r, c});
    }
  }
  return out;
}

inline double brute_iou(const BinaryMask& a, const BinaryMask& b) {
  long inter = 0;
  long uni = 0;
  for (int r = 0; r < a.height(); ++r) {
    for (int c = 0; c < a.width(); ++c) {
      inter += (a(r, c) && b(r, c)) ? 1 : 0;
      uni += (a(r, c) || b(r, c)) ? 1 : 0;
    }
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Minimum squared distance to any source pixel, -1 without sources.
inline long brute_squared_distance(const std::vector<Pixel>& sources, int r, int c) {
  long best = -1;
  for (const Pixel& p : sources) {
    const long dr = p.row - r;
    const long dc = p.col - c;
    const long d = dr * dr + dc * dc;
    if (best < 0 || d < best) best = d;
  }
  return best;
}

inline float brute_distance(const std::vector<Pixel>& sources, int r, int c) {
  const long d2 = brute_squared_distance(sources, r, c);
  if (d2 < 0) return std::numeric_limits<float>::infinity();
  return static_cast<float>(std::sqrt(static_cast<double>(d2)));
}

inline std::vector<Pixel> brute_boundary(const BinaryMask& m) {
  std::vector<Pixel> out;
  const int h = m.height();
  const int w = m.width();
  auto on = [&](int r, int c) { return r >= 0 && c >= 0 && r < h && c < w && m(r, c); };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (on(r, c) && (!on(r - 1, c) || !on(r + 1, c) || !on(r, c - 1) || !on(r, c + 1))) {
        out.push_back({r, c});
      }
    }
  }
  return out;
}

inline double brute_f_measure(const BinaryMask& m, const BinaryMask& gt, double tol) {
  const auto bm = brute_boundary(m);
  const auto bg = brute_boundary(gt);
  if (bm.empty() && bg.empty()) return 1.0;
  if (bm.empty() || bg.empty()) return 0.0;
  auto matched = [tol](const std::vector<Pixel>& from, const std::vector<Pixel>& to) {
    long hits = 0;
    for (const Pixel& p : from) {
      const long d2 = brute_squared_distance(to, p.row, p.col);
      if (std::sqrt(static_cast<double>(d2)) <= tol) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(from.size());
  };
  const double p = matched(bm, bg);
  const double rc = matched(bg, bm);
  return p + rc == 0.0 ? 0.0 : 2.0 * p * rc / (p + rc);
}

/// Static scene: no drift, no noise of any kind, no distractors.
inline SequenceConfig clean_config() {
  SequenceConfig c;
  c.drift_rate = 0.0;
  c.noise = 0.0;
  c.target_texture = 0.0;
  c.distractors = 0;
  return c;
}

/// Small, fast configuration for tree and training tests.
inline SequenceConfig small_config(int length) {
  SequenceConfig c;
  c.length = length;
  c.height = 32;
  c.width = 32;
  c.axis_min = 4.0;
  c.axis_max = 6.0;
  c.motion_step = 1.5;
  return c;
}

/// Config file text for a complete but quick command-line pipeline.
inline std::string tiny_pipeline_config() {
  return "seq.length = 8\n"
         "seq.height = 32\n"
         "seq.width = 32\n"
         "seq.axis_min = 4\n"
         "seq.axis_max = 6\n"
         "seq.motion_step = 1.5\n"
         "data.train_sequences = 3\n"
         "data.test_sequences = 2\n"
         "data.positive_clip_length = 5\n"
         "data.negative_clip_length = 4\n"
         "data.positive_clips = 2\n"
         "data.negative_clips = 3\n"
         "train.iterations = 10\n"
         "train.batch = 4\n";
}

}  // namespace roivos::testing
