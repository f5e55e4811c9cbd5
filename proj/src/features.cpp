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

#include "roivos/features.hpp"

#include <stdexcept>

namespace roivos {

PooledGridExtractor::PooledGridExtractor(int grid) : grid_(grid) {
  if (grid < 1) throw std::invalid_argument("pooling grid must be >= 1");
}

Eigen::Index PooledGridExtractor::length(int channels) const {
  const Eigen::Index cells = static_cast<Eigen::Index>(grid_) * grid_;
  return cells * channels + cells + 4;
}

Eigen::VectorXd PooledGridExtractor::describe(const Frame& frame, const ProbabilityMap& map,
                                              const PixelSet& roi) const {
  if (frame.height() != map.height() || frame.width() != map.width()) {
    throw std::invalid_argument("describe: frame and probability map shapes differ");
  }
  const int h = frame.height();
  const int w = frame.width();
  const int nch = frame.channels();
  const int g = grid_;
  const Eigen::Index cells = static_cast<Eigen::Index>(g) * g;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(length(nch));
  if (roi.empty()) return out;

  auto cell_of = [&](int r, int c) { return (r * g / h) * g + (c * g / w); };

  Eigen::VectorXd hits = Eigen::VectorXd::Zero(cells);
  Eigen::VectorXd cell_size = Eigen::VectorXd::Zero(cells);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) cell_size(cell_of(r, c)) += 1.0;
  }
  double row_sum = 0.0;
  double col_sum = 0.0;
  double prob_sum = 0.0;
  for (const Pixel& p : roi) {
    const Eigen::Index k = cell_of(p.row, p.col);
    hits(k) += 1.0;
    for (int ch = 0; ch < nch; ++ch) out(ch * cells + k) += frame(p.row, p.col, ch);
    row_sum += p.row;
    col_sum += p.col;
    prob_sum += map(p.row, p.col);
  }
  for (int ch = 0; ch < nch; ++ch) {
    auto pooled = out.segment(ch * cells, cells);
    pooled = (hits.array() > 0.0).select(pooled.array() / hits.array().max(1.0), 0.0);
  }
  // Pool cells can be empty on grids smaller than G x G.
  out.segment(nch * cells, cells) =
      (cell_size.array() > 0.0).select(hits.array() / cell_size.array().max(1.0), 0.0);

  const double n = static_cast<double>(roi.size());
  const Eigen::Index s = nch * cells + cells;
  out(s + 0) = n / (static_cast<double>(h) * w);
  out(s + 1) = h > 1 ? (row_sum / n) / (h - 1) : 0.0;
  out(s + 2) = w > 1 ? (col_sum / n) / (w - 1) : 0.0;
  out(s + 3) = prob_sum / n;
  return out;
}

std::vector<double> state_thresholds(AgentRole role) {
  // beta_micro is not part of the background agent's state.
  if (role == AgentRole::positive) return {0.97, 0.7};
  return {0.4, 0.2, 0.1};
}

namespace {

AgentState concat_descriptors(AgentRole role, const DescriptorExtractor& extractor,
                              const Frame& frame, const ProbabilityMap& map) {
  const std::vector<double> thresholds = state_thresholds(role);
  const Eigen::Index d = extractor.length(frame.channels());
  AgentState state;
  state.role = role;
  state.values.resize(d * static_cast<Eigen::Index>(thresholds.size()));
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    state.values.segment(static_cast<Eigen::Index>(i) * d, d) =
        extractor.describe(frame, map, threshold_above(map, thresholds[i]));
  }
  return state;
}

}  // namespace

AgentState build_state_p(const DescriptorExtractor& extractor, const Frame& frame,
                         const ProbabilityMap& map) {
  return concat_descriptors(AgentRole::positive, extractor, frame, map);
}

AgentState build_state_n(const DescriptorExtractor& extractor, const Frame& frame,
                         const ProbabilityMap& map) {
  return concat_descriptors(AgentRole::negative, extractor, frame, map);
}

AgentState build_state(AgentRole role, const DescriptorExtractor& extractor, const Frame& frame,
                       const ProbabilityMap& map) {
  return concat_descriptors(role, extractor, frame, map);
}

Eigen::Index state_length(AgentRole role, const DescriptorExtractor& extractor, int channels) {
  return extractor.length(channels) * static_cast<Eigen::Index>(state_thresholds(role).size());
}

}  // namespace roivos
