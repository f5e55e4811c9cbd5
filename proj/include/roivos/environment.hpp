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

// One online-adaptation step on one frame, shared by inference, tree
// building and live rollouts:
//
//   M_f   = forward(model, F_t, last_mask)          temporary map
//   S_p   = {M_f > t_p}
//   S_n   = {dist(S_p) > T_n} [∪ {M_f < t_n}]
//   model = adapt(model, F_t, S_p, S_n)             skipped when S_p is empty
//   O_t   = forward(model, F_t, last_mask) > 0.5
//   last_mask = O_t

#pragma once

#include "roivos/frame.hpp"
#include "roivos/grid.hpp"
#include "roivos/key_values.hpp"
#include "roivos/roi.hpp"
#include "roivos/segmenter.hpp"

#include <optional>

namespace roivos {

struct EnvironmentConfig {
  SpatialPrior prior;
  UpdateConfig update;
  RoiConfig roi;
  int feature_grid = 8;

  void validate() const;
  [[nodiscard]] KeyValues to_key_values() const;
  /// Missing keys keep their defaults. Keys are prefixed "env.".
  static EnvironmentConfig from_key_values(const KeyValues& kv);
  static std::vector<std::string> keys();
};

/// Thresholds applied on one frame.
struct ThresholdChoice {
  bool adapt = true;
  double t_p = kConservativePositiveThreshold;
  std::optional<double> t_n;  // nullopt: distance rule only

  friend bool operator==(const ThresholdChoice&, const ThresholdChoice&) = default;
};

/// Everything that persists between frames.
struct SegmentationState {
  AppearanceModel model;
  BinaryMask last_mask;
};

SegmentationState initial_state(const EnvironmentConfig& cfg, const Frame& first_frame,
                                const BinaryMask& first_truth);

ProbabilityMap temporary_map(const SegmentationState& state, const Frame& frame);

struct StepResult {
  SegmentationState next;
  AdaptationRegions regions;
  bool adapted = false;
  bool skipped = false;  // adaptation requested but S_p was empty
  ProbabilityMap final_map;
  BinaryMask output;
};

StepResult apply_choice(const SegmentationState& state, const Frame& frame,
                        const ProbabilityMap& temporary, const ThresholdChoice& choice,
                        const EnvironmentConfig& cfg);

}  // namespace roivos
