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

#include "roivos/roi.hpp"

#include <stdexcept>
#include <string>

namespace roivos {

std::string_view to_string(AgentRole role) {
  return role == AgentRole::positive ? "positive" : "negative";
}

AgentRole parse_role(std::string_view text) {
  if (text == "positive" || text == "foreground" || text == "fg") return AgentRole::positive;
  if (text == "negative" || text == "background" || text == "bg") return AgentRole::negative;
  throw std::invalid_argument("unknown agent role '" + std::string(text) + "'");
}

ThresholdActionSet ThresholdActionSet::positive() {
  return {AgentRole::positive, {0.97, 0.7}};
}

ThresholdActionSet ThresholdActionSet::negative() {
  return {AgentRole::negative, {0.4, 0.2, 0.1, 0.01}};
}

ThresholdActionSet ThresholdActionSet::for_role(AgentRole role) {
  return role == AgentRole::positive ? positive() : negative();
}

PixelSet select_positive(const ProbabilityMap& map, double t_p) {
  return threshold_above(map, t_p);
}

PixelSet baseline_negative(const DistanceMap& dist, double distance_threshold) {
  std::vector<Pixel> out;
  for (int r = 0; r < dist.height(); ++r) {
    for (int c = 0; c < dist.width(); ++c) {
      if (static_cast<double>(dist(r, c)) > distance_threshold) out.push_back({r, c});
    }
  }
  return PixelSet::from_sorted(std::move(out));
}

PixelSet select_negative(const ProbabilityMap& map, const DistanceMap& dist,
                         double distance_threshold, double t_n) {
  if (map.height() != dist.height() || map.width() != dist.width()) {
    throw std::invalid_argument("select_negative: map and distance shapes differ");
  }
  return set_union(baseline_negative(dist, distance_threshold), threshold_below(map, t_n));
}

AdaptationRegions build_regions(const ProbabilityMap& map, double t_p, std::optional<double> t_n,
                                double distance_threshold) {
  if (t_n && !(*t_n < t_p)) throw std::invalid_argument("build_regions: requires t_n < t_p");
  AdaptationRegions regions;
  regions.t_p = t_p;
  regions.t_n = t_n;
  regions.distance_threshold = distance_threshold;
  regions.positive = select_positive(map, t_p);
  const DistanceMap dist = distance_transform(regions.positive, map.height(), map.width());
  regions.negative = t_n ? select_negative(map, dist, distance_threshold, *t_n)
                         : baseline_negative(dist, distance_threshold);
  return regions;
}

}  // namespace roivos
