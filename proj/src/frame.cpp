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

#include "roivos/frame.hpp"

#include <stdexcept>

namespace roivos {

Frame::Frame(int height, int width, int channels) : height_(height), width_(width) {
  if (height < 1 || width < 1 || channels < 1) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  planes_.assign(channels, Grid<double>::Zero(height, width));
}

Frame::Frame(std::vector<Grid<double>> planes) : planes_(std::move(planes)) {
  if (planes_.empty()) throw std::invalid_argument("frame needs at least one channel");
  height_ = static_cast<int>(planes_.front().rows());
  width_ = static_cast<int>(planes_.front().cols());
  if (height_ < 1 || width_ < 1) throw std::invalid_argument("frame dimensions must be positive");
  for (const auto& p : planes_) {
    if (p.rows() != height_ || p.cols() != width_) {
      throw std::invalid_argument("frame planes differ in shape");
    }
    if (!((p >= 0.0) && (p <= 1.0)).all()) {
      throw std::invalid_argument("frame intensities must lie in [0,1]");
    }
  }
}

bool operator==(const Frame& a, const Frame& b) {
  if (a.height_ != b.height_ || a.width_ != b.width_ || a.channels() != b.channels()) return false;
  for (int ch = 0; ch < a.channels(); ++ch) {
    if (!(a.planes_[ch] == b.planes_[ch]).all()) return false;
  }
  return true;
}

}  // namespace roivos
