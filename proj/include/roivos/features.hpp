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

// Agent states. Each candidate ROI is summarised by a fixed-length
// descriptor; an agent's state is the concatenation of the descriptors of
// its candidate ROIs, in candidate order.

#pragma once

#include "roivos/frame.hpp"
#include "roivos/grid.hpp"
#include "roivos/roi.hpp"

#include <Eigen/Core>

#include <memory>

namespace roivos {

class DescriptorExtractor {
 public:
  virtual ~DescriptorExtractor() = default;
  [[nodiscard]] virtual Eigen::Index length(int channels) const = 0;
  [[nodiscard]] virtual Eigen::VectorXd describe(const Frame& frame, const ProbabilityMap& map,
                                                 const PixelSet& roi) const = 0;
};

/// Layout, for a G x G pooling grid and C channels:
///   [C * G * G]  mean intensity of ROI pixels per pool cell (0 if none),
///                channel-major, then row-major cells
///   [G * G]      fraction of each pool cell covered by the ROI
///   [4]          area fraction, centroid row / (H-1), centroid col / (W-1),
///                mean probability over the ROI
/// An empty ROI yields the zero vector.
class PooledGridExtractor final : public DescriptorExtractor {
 public:
  explicit PooledGridExtractor(int grid = 8);

  [[nodiscard]] int grid() const { return grid_; }
  [[nodiscard]] Eigen::Index length(int channels) const override;
  [[nodiscard]] Eigen::VectorXd describe(const Frame& frame, const ProbabilityMap& map,
                                         const PixelSet& roi) const override;

 private:
  int grid_;
};

struct AgentState {
  AgentRole role = AgentRole::positive;
  Eigen::VectorXd values;

  friend bool operator==(const AgentState& a, const AgentState& b) {
    return a.role == b.role && a.values.size() == b.values.size() && a.values == b.values;
  }
};

/// Thresholds whose "> t" ROIs make up each agent's state.
std::vector<double> state_thresholds(AgentRole role);

/// Descriptors of {M > 0.97} and {M > 0.7}.
AgentState build_state_p(const DescriptorExtractor& extractor, const Frame& frame,
                         const ProbabilityMap& map);
/// Descriptors of {M > 0.4}, {M > 0.2} and {M > 0.1}.
AgentState build_state_n(const DescriptorExtractor& extractor, const Frame& frame,
                         const ProbabilityMap& map);
AgentState build_state(AgentRole role, const DescriptorExtractor& extractor, const Frame& frame,
                       const ProbabilityMap& map);

Eigen::Index state_length(AgentRole role, const DescriptorExtractor& extractor, int channels);

}  // namespace roivos
