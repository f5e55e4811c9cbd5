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

#pragma once

#include "roivos/grid.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace roivos {

enum class AgentRole { positive, negative };

std::string_view to_string(AgentRole role);
AgentRole parse_role(std::string_view text);

/// Threshold used for the positive region whenever the positive agent is not
/// acting (ablations, background-agent training).
inline constexpr double kConservativePositiveThreshold = 0.97;

/// Candidate thresholds an agent chooses between, strictly decreasing.
struct ThresholdActionSet {
  AgentRole role = AgentRole::positive;
  std::vector<double> candidates;

  /// {alpha_large, alpha_small} = {0.97, 0.7}
  static ThresholdActionSet positive();
  /// {beta_large, beta_medium, beta_small, beta_micro} = {0.4, 0.2, 0.1, 0.01}
  static ThresholdActionSet negative();
  static ThresholdActionSet for_role(AgentRole role);

  [[nodiscard]] int size() const { return static_cast<int>(candidates.size()); }
  [[nodiscard]] double operator[](int action) const { return candidates.at(action); }

  friend bool operator==(const ThresholdActionSet&, const ThresholdActionSet&) = default;
};

struct RoiConfig {
  /// Distance threshold T_n as a fraction of the grid diagonal.
  double distance_fraction = 0.25;

  [[nodiscard]] double distance_threshold(int height, int width) const {
    return distance_fraction * grid_diagonal(height, width);
  }
};

struct AdaptationRegions {
  PixelSet positive;
  PixelSet negative;
  double t_p = kConservativePositiveThreshold;
  std::optional<double> t_n;  // nullopt: distance rule only
  double distance_threshold = 0.0;
};

/// {i | M(i) > t_p}
PixelSet select_positive(const ProbabilityMap& map, double t_p);

/// {i | distance(i) > T_n}. Infinite distances (empty positive set) select
/// every pixel; callers decide whether that is meaningful.
PixelSet baseline_negative(const DistanceMap& dist, double distance_threshold);

/// baseline_negative(dist, T_n) ∪ {i | M(i) < t_n}.
PixelSet select_negative(const ProbabilityMap& map, const DistanceMap& dist,
                         double distance_threshold, double t_n);

/// Builds both regions for one frame. A missing t_n uses the distance rule
/// alone. Requires t_n < t_p.
AdaptationRegions build_regions(const ProbabilityMap& map, double t_p, std::optional<double> t_n,
                                double distance_threshold);

}  // namespace roivos
