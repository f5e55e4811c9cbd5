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

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace roivos {

/// Row-major dense 2-D grid. All per-pixel containers in the library are
/// built on this alias so that Eigen expressions work directly on them.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Pixel {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Sorted (row-major), duplicate-free list of in-bounds pixel coordinates.
class PixelSet {
 public:
  PixelSet() = default;

  /// Sorts and deduplicates; bounds are checked against (height, width).
  static PixelSet from_unsorted(std::vector<Pixel> pixels, int height, int width);

  /// Caller guarantees the input is already strictly increasing.
  static PixelSet from_sorted(std::vector<Pixel> pixels);

  [[nodiscard]] std::span<const Pixel> pixels() const { return pixels_; }
  [[nodiscard]] std::size_t size() const { return pixels_.size(); }
  [[nodiscard]] bool empty() const { return pixels_.empty(); }
  [[nodiscard]] bool contains(Pixel p) const;

  auto begin() const { return pixels_.begin(); }
  auto end() const { return pixels_.end(); }

  friend bool operator==(const PixelSet&, const PixelSet&) = default;

 private:
  std::vector<Pixel> pixels_;
};

PixelSet set_union(const PixelSet& a, const PixelSet& b);
PixelSet set_intersection(const PixelSet& a, const PixelSet& b);
bool is_subset(const PixelSet& sub, const PixelSet& super);

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width);
  /// Throws if any cell is not 0 or 1.
  explicit BinaryMask(Grid<std::uint8_t> cells);

  static BinaryMask from_pixels(const PixelSet& set, int height, int width);

  [[nodiscard]] int height() const { return static_cast<int>(cells_.rows()); }
  [[nodiscard]] int width() const { return static_cast<int>(cells_.cols()); }
  [[nodiscard]] bool operator()(int r, int c) const { return cells_(r, c) != 0; }
  void set(int r, int c, bool on) { cells_(r, c) = on ? 1 : 0; }

  [[nodiscard]] const Grid<std::uint8_t>& cells() const { return cells_; }
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] PixelSet pixels() const;

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.cells_.rows() == b.cells_.rows() && a.cells_.cols() == b.cells_.cols() &&
           (a.cells_ == b.cells_).all();
  }

 private:
  Grid<std::uint8_t> cells_;
};

/// Per-pixel foreground probability, stored as float32 to match the on-disk
/// format so cached and live maps compare bit-exactly.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(int height, int width, float fill = 0.0f);
  /// Throws if any cell falls outside [0, 1] or is NaN.
  explicit ProbabilityMap(Grid<float> cells);

  [[nodiscard]] int height() const { return static_cast<int>(cells_.rows()); }
  [[nodiscard]] int width() const { return static_cast<int>(cells_.cols()); }
  [[nodiscard]] float operator()(int r, int c) const { return cells_(r, c); }
  [[nodiscard]] const Grid<float>& cells() const { return cells_; }

  friend bool operator==(const ProbabilityMap& a, const ProbabilityMap& b) {
    return a.cells_.rows() == b.cells_.rows() && a.cells_.cols() == b.cells_.cols() &&
           (a.cells_ == b.cells_).all();
  }

 private:
  Grid<float> cells_;
};

/// Euclidean distance to the nearest source pixel. An empty source set yields
/// +infinity everywhere.
class DistanceMap {
 public:
  static constexpr float kInfinite = std::numeric_limits<float>::infinity();

  DistanceMap() = default;
  explicit DistanceMap(Grid<float> cells);

  [[nodiscard]] int height() const { return static_cast<int>(cells_.rows()); }
  [[nodiscard]] int width() const { return static_cast<int>(cells_.cols()); }
  [[nodiscard]] float operator()(int r, int c) const { return cells_(r, c); }
  [[nodiscard]] const Grid<float>& cells() const { return cells_; }
  [[nodiscard]] bool all_infinite() const { return (cells_ == kInfinite).all(); }

  friend bool operator==(const DistanceMap& a, const DistanceMap& b) {
    return a.cells_.rows() == b.cells_.rows() && a.cells_.cols() == b.cells_.cols() &&
           (a.cells_ == b.cells_).all();
  }

 private:
  Grid<float> cells_;
};

inline double grid_diagonal(int height, int width) {
  return std::sqrt(static_cast<double>(height) * height + static_cast<double>(width) * width);
}

// ---------------------------------------------------------------------------
// Operations

/// |m ∩ gt| / |m ∪ gt|; 1 when both are empty.
double iou(const BinaryMask& m, const BinaryMask& gt);

/// Exact squared Euclidean distance (in pixels²) to the nearest source pixel,
/// or -1 where the source set is empty.
Grid<std::int64_t> squared_distance_transform(const PixelSet& source, int height, int width);

DistanceMap distance_transform(const PixelSet& source, int height, int width);

/// {i | M(i) > theta}
PixelSet threshold_above(const ProbabilityMap& map, double theta);
/// {i | M(i) < theta}
PixelSet threshold_below(const ProbabilityMap& map, double theta);

/// Mask pixels with at least one 4-neighbour outside the mask (the grid
/// border counts as outside).
BinaryMask boundary(const BinaryMask& m);

/// Default boundary-matching tolerance: max(1, round(0.0075 * diagonal)).
double default_contour_tolerance(int height, int width);

/// Boundary F-measure with pixel tolerance `tol`.
double contour_accuracy(const BinaryMask& m, const BinaryMask& gt, double tol);

/// Arithmetic mean of per-frame scores. Callers pass frames 2..L only; the
/// annotated first frame never enters the average. Throws on an empty list.
double mean_over_frames(std::span<const double> values);

}  // namespace roivos
