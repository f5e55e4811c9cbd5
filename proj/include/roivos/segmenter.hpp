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

// Adaptable per-pixel segmenter: a two-class Gaussian colour model combined
// with a spatial prior derived from the previous frame's mask. It plays the
// role of the fine-tunable segmentation network: it is fitted on the first
// annotated frame and nudged online from selected foreground/background
// pixels.

#pragma once

#include "roivos/frame.hpp"
#include "roivos/grid.hpp"
#include "roivos/key_values.hpp"

#include <Eigen/Core>

#include <filesystem>

namespace roivos {

inline constexpr double kDefaultVarianceFloor = 1e-4;

struct ClassStats {
  Eigen::VectorXd mean;      // per channel
  Eigen::VectorXd variance;  // per channel, floored

  friend bool operator==(const ClassStats& a, const ClassStats& b) {
    return a.mean.size() == b.mean.size() && a.mean == b.mean && a.variance == b.variance;
  }
};

struct SpatialPrior {
  int dilation_radius = 3;  // pixels, Euclidean disk
  int blur_radius = 2;      // box blur half-width, pixels
  double epsilon = 0.05;    // prior clamped to [eps, 1 - eps]

  friend bool operator==(const SpatialPrior&, const SpatialPrior&) = default;
};

struct AppearanceModel {
  ClassStats foreground;
  ClassStats background;
  double prior_log_odds = 0.0;
  SpatialPrior prior;

  friend bool operator==(const AppearanceModel&, const AppearanceModel&) = default;
};

struct UpdateConfig {
  double rate = 0.2;  // EMA weight of the new batch statistics
  double variance_floor = kDefaultVarianceFloor;

  void validate() const;
};

/// Population mean and variance of `frame` over `pixels`, variance floored.
/// Throws on an empty pixel set.
ClassStats pixel_statistics(const Frame& frame, const PixelSet& pixels, double variance_floor);

/// Exact class statistics of the annotated frame. Throws when gt is empty or
/// covers the whole frame.
AppearanceModel fit_first_frame(const Frame& frame, const BinaryMask& gt,
                                const SpatialPrior& prior = {},
                                double variance_floor = kDefaultVarianceFloor);

/// clamp(blur(dilate(last_mask)), eps, 1 - eps).
Grid<double> spatial_prior(const BinaryMask& last_mask, const SpatialPrior& prior);

/// Posterior foreground probability per pixel, evaluated in log-odds form:
///   sigmoid(prior_log_odds + logit(p_s) + log L_fg - log L_bg)
/// which equals p_s L_fg / (p_s L_fg + (1 - p_s) L_bg).
ProbabilityMap forward(const AppearanceModel& model, const Frame& frame,
                       const BinaryMask& last_mask);

/// Cell is set iff M > 0.5.
BinaryMask predict_mask(const ProbabilityMap& map);

/// EMA update of each class from its pixel set; an empty set leaves that
/// class untouched. Throws if the sets overlap.
AppearanceModel adapt(const AppearanceModel& model, const Frame& frame, const PixelSet& positive,
                      const PixelSet& negative, const UpdateConfig& cfg);

KeyValues model_to_key_values(const AppearanceModel& model);
AppearanceModel model_from_key_values(const KeyValues& kv);
void save_model(const std::filesystem::path& path, const AppearanceModel& model);
AppearanceModel load_model(const std::filesystem::path& path);

}  // namespace roivos
