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

#include "roivos/grid.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace roivos {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* op) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw std::invalid_argument(std::string(op) + ": mask shapes differ (" +
                                std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                                " vs " + std::to_string(b.height()) + "x" +
                                std::to_string(b.width()) + ")");
  }
}

void require_positive_shape(int height, int width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("grid dimensions must be at least 1x1");
  }
}

constexpr std::int64_t kNoSource = -1;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher). `f` holds
// squared distances along one line, kNoSource where unreachable. Output uses
// the same convention.
void squared_edt_1d(std::span<const std::int64_t> f, std::span<std::int64_t> out,
                    std::vector<int>& vertices, std::vector<double>& bounds) {
  const int n = static_cast<int>(f.size());
  vertices.clear();
  bounds.clear();
  for (int q = 0; q < n; ++q) {
    if (f[q] == kNoSource) continue;
    while (!vertices.empty()) {
      const int v = vertices.back();
      const double s = (static_cast<double>(f[q] + static_cast<std::int64_t>(q) * q) -
                        static_cast<double>(f[v] + static_cast<std::int64_t>(v) * v)) /
                       (2.0 * (q - v));
      if (s <= bounds.back()) {
        vertices.pop_back();
        bounds.pop_back();
      } else {
        vertices.push_back(q);
        bounds.push_back(s);
        break;
      }
    }
    if (vertices.empty()) {
      vertices.push_back(q);
      bounds.push_back(-std::numeric_limits<double>::infinity());
    }
  }
  if (vertices.empty()) {
    std::fill(out.begin(), out.end(), kNoSource);
    return;
  }
  std::size_t k = 0;
  for (int q = 0; q < n; ++q) {
    while (k + 1 < vertices.size() && bounds[k + 1] < q) ++k;
    // Exact integer evaluation; neighbours are checked so that floating
    // point breakpoints can never pick a non-minimal parabola.
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::size_t j = (k == 0 ? 0 : k - 1); j <= std::min(k + 1, vertices.size() - 1); ++j) {
      const std::int64_t d = q - vertices[j];
      best = std::min(best, d * d + f[vertices[j]]);
    }
    out[q] = best;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PixelSet

PixelSet PixelSet::from_unsorted(std::vector<Pixel> pixels, int height, int width) {
  for (const Pixel& p : pixels) {
    if (p.row < 0 || p.row >= height || p.col < 0 || p.col >= width) {
      throw std::out_of_range("pixel (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                              ") outside " + std::to_string(height) + "x" +
                              std::to_string(width) + " grid");
    }
  }
  std::sort(pixels.begin(), pixels.end());
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  PixelSet set;
  set.pixels_ = std::move(pixels);
  return set;
}

PixelSet PixelSet::from_sorted(std::vector<Pixel> pixels) {
  PixelSet set;
  set.pixels_ = std::move(pixels);
  return set;
}

bool PixelSet::contains(Pixel p) const {
  return std::binary_search(pixels_.begin(), pixels_.end(), p);
}

PixelSet set_union(const PixelSet& a, const PixelSet& b) {
  std::vector<Pixel> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return PixelSet::from_sorted(std::move(out));
}

PixelSet set_intersection(const PixelSet& a, const PixelSet& b) {
  std::vector<Pixel> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return PixelSet::from_sorted(std::move(out));
}

bool is_subset(const PixelSet& sub, const PixelSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// ---------------------------------------------------------------------------
// Grid value types

BinaryMask::BinaryMask(int height, int width) {
  require_positive_shape(height, width);
  cells_ = Grid<std::uint8_t>::Zero(height, width);
}

BinaryMask::BinaryMask(Grid<std::uint8_t> cells) : cells_(std::move(cells)) {
  require_positive_shape(height(), width());
  if ((cells_ > std::uint8_t{1}).any()) {
    throw std::invalid_argument("binary mask cells must be 0 or 1");
  }
}

BinaryMask BinaryMask::from_pixels(const PixelSet& set, int height, int width) {
  BinaryMask mask(height, width);
  for (const Pixel& p : set) mask.cells_(p.row, p.col) = 1;
  return mask;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(cells_.cast<std::int64_t>().sum());
}

PixelSet BinaryMask::pixels() const {
  std::vector<Pixel> out;
  for (int r = 0; r < height(); ++r) {
    for (int c = 0; c < width(); ++c) {
      if (cells_(r, c)) out.push_back({r, c});
    }
  }
  return PixelSet::from_sorted(std::move(out));
}

ProbabilityMap::ProbabilityMap(int height, int width, float fill) {
  require_positive_shape(height, width);
  if (!(fill >= 0.0f && fill <= 1.0f)) throw std::invalid_argument("probability outside [0,1]");
  cells_ = Grid<float>::Constant(height, width, fill);
}

ProbabilityMap::ProbabilityMap(Grid<float> cells) : cells_(std::move(cells)) {
  require_positive_shape(height(), width());
  // NaN fails both comparisons, so it is rejected here as well.
  if (!((cells_ >= 0.0f) && (cells_ <= 1.0f)).all()) {
    throw std::invalid_argument("probability map cells must lie in [0,1]");
  }
}

DistanceMap::DistanceMap(Grid<float> cells) : cells_(std::move(cells)) {
  require_positive_shape(height(), width());
  if (!(cells_ >= 0.0f).all()) throw std::invalid_argument("distances must be nonnegative");
}

// ---------------------------------------------------------------------------
// Metrics and transforms

double iou(const BinaryMask& m, const BinaryMask& gt) {
  require_same_shape(m, gt, "iou");
  const auto a = m.cells().cast<std::int64_t>();
  const auto b = gt.cells().cast<std::int64_t>();
  const std::int64_t inter = (a * b).sum();
  const std::int64_t uni = (a + b - a * b).sum();
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Grid<std::int64_t> squared_distance_transform(const PixelSet& source, int height, int width) {
  require_positive_shape(height, width);
  Grid<std::int64_t> g = Grid<std::int64_t>::Constant(height, width, kNoSource);
  for (const Pixel& p : source) {
    if (p.row < 0 || p.row >= height || p.col < 0 || p.col >= width) {
      throw std::out_of_range("distance_transform: source pixel out of bounds");
    }
    g(p.row, p.col) = 0;
  }
  if (source.empty()) return g;

  std::vector<int> vertices;
  std::vector<double> bounds;
  std::vector<std::int64_t> line_in(std::max(height, width));
  std::vector<std::int64_t> line_out(std::max(height, width));

  // Columns first, then rows.
  for (int c = 0; c < width; ++c) {
    for (int r = 0; r < height; ++r) line_in[r] = g(r, c);
    squared_edt_1d(std::span(line_in.data(), height), std::span(line_out.data(), height),
                   vertices, bounds);
    for (int r = 0; r < height; ++r) g(r, c) = line_out[r];
  }
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) line_in[c] = g(r, c);
    squared_edt_1d(std::span(line_in.data(), width), std::span(line_out.data(), width), vertices,
                   bounds);
    for (int c = 0; c < width; ++c) g(r, c) = line_out[c];
  }
  return g;
}

DistanceMap distance_transform(const PixelSet& source, int height, int width) {
  const Grid<std::int64_t> d2 = squared_distance_transform(source, height, width);
  Grid<float> cells = d2.unaryExpr([](std::int64_t v) {
    return v < 0 ? DistanceMap::kInfinite
                 : static_cast<float>(std::sqrt(static_cast<double>(v)));
  });
  return DistanceMap(std::move(cells));
}

PixelSet threshold_above(const ProbabilityMap& map, double theta) {
  std::vector<Pixel> out;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (static_cast<double>(map(r, c)) > theta) out.push_back({r, c});
    }
  }
  return PixelSet::from_sorted(std::move(out));
}

PixelSet threshold_below(const ProbabilityMap& map, double theta) {
  std::vector<Pixel> out;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (static_cast<double>(map(r, c)) < theta) out.push_back({r, c});
    }
  }
  return PixelSet::from_sorted(std::move(out));
}

BinaryMask boundary(const BinaryMask& m) {
  const int h = m.height();
  const int w = m.width();
  BinaryMask out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!m(r, c)) continue;
      const bool edge = r == 0 || c == 0 || r == h - 1 || c == w - 1 || !m(r - 1, c) ||
                        !m(r + 1, c) || !m(r, c - 1) || !m(r, c + 1);
      if (edge) out.set(r, c, true);
    }
  }
  return out;
}

double default_contour_tolerance(int height, int width) {
  return std::max(1.0, std::round(0.0075 * grid_diagonal(height, width)));
}

double contour_accuracy(const BinaryMask& m, const BinaryMask& gt, double tol) {
  require_same_shape(m, gt, "contour_accuracy");
  if (!(tol >= 0.0)) throw std::invalid_argument("contour_accuracy: tolerance must be >= 0");

  const PixelSet bm = boundary(m).pixels();
  const PixelSet bg = boundary(gt).pixels();
  if (bm.empty() && bg.empty()) return 1.0;
  if (bm.empty() || bg.empty()) return 0.0;

  const double tol2 = tol * tol;
  auto matched_fraction = [&](const PixelSet& from, const PixelSet& to) {
    const Grid<std::int64_t> d2 = squared_distance_transform(to, m.height(), m.width());
    std::size_t hits = 0;
    for (const Pixel& p : from) {
      if (static_cast<double>(d2(p.row, p.col)) <= tol2) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(from.size());
  };
  const double precision = matched_fraction(bm, bg);
  const double recall = matched_fraction(bg, bm);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double mean_over_frames(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_over_frames: empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace roivos
