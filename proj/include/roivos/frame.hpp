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

#include <vector>

namespace roivos {

/// Multi-channel image with intensities in [0, 1]; one plane per channel.
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, int channels);
  /// Throws on mismatched plane shapes or intensities outside [0, 1].
  explicit Frame(std::vector<Grid<double>> planes);

  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int channels() const { return static_cast<int>(planes_.size()); }

  [[nodiscard]] const Grid<double>& plane(int channel) const { return planes_[channel]; }
  [[nodiscard]] double operator()(int r, int c, int channel) const {
    return planes_[channel](r, c);
  }

  friend bool operator==(const Frame& a, const Frame& b);

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Grid<double>> planes_;
};

}  // namespace roivos
