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

#include "roivos/segmenter.hpp"

#include "roivos/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace roivos {

namespace {

void check_frame_mask(const Frame& frame, const BinaryMask& mask, const char* op) {
  if (frame.height() != mask.height() || frame.width() != mask.width()) {
    throw std::invalid_argument(std::string(op) + ": frame and mask shapes differ");
  }
}

// Box mean over a (2r+1)^2 window clipped to the grid.
Grid<double> box_blur(const Grid<double>& in, int radius) {
  if (radius <= 0) return in;
  const Eigen::Index h = in.rows();
  const Eigen::Index w = in.cols();
  Grid<double> integral = Grid<double>::Zero(h + 1, w + 1);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      integral(r + 1, c + 1) = in(r, c) + integral(r, c + 1) + integral(r + 1, c) - integral(r, c);
    }
  }
  Grid<double> out(h, w);
  for (Eigen::Index r = 0; r < h; ++r) {
    const Eigen::Index r0 = std::max<Eigen::Index>(0, r - radius);
    const Eigen::Index r1 = std::min<Eigen::Index>(h, r + radius + 1);
    for (Eigen::Index c = 0; c < w; ++c) {
      const Eigen::Index c0 = std::max<Eigen::Index>(0, c - radius);
      const Eigen::Index c1 = std::min<Eigen::Index>(w, c + radius + 1);
      const double sum = integral(r1, c1) - integral(r0, c1) - integral(r1, c0) + integral(r0, c0);
      out(r, c) = sum / static_cast<double>((r1 - r0) * (c1 - c0));
    }
  }
  return out;
}

ClassStats blend(const ClassStats& old, const ClassStats& batch, double rate, double floor) {
  ClassStats out;
  out.mean = (1.0 - rate) * old.mean + rate * batch.mean;
  out.variance = ((1.0 - rate) * old.variance + rate * batch.variance).cwiseMax(floor);
  return out;
}

void put_vector(KeyValues& kv, const std::string& key, const Eigen::VectorXd& v) {
  kv.set(key, std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd get_vector(const KeyValues& kv, const std::string& key) {
  const std::vector<double> values = kv.get_doubles(key);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void UpdateConfig::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("update rate must lie in [0,1]");
  if (!(variance_floor > 0.0)) throw std::invalid_argument("variance floor must be positive");
}

ClassStats pixel_statistics(const Frame& frame, const PixelSet& pixels, double variance_floor) {
  if (pixels.empty()) throw std::invalid_argument("pixel_statistics: empty pixel set");
  const int nch = frame.channels();
  const double n = static_cast<double>(pixels.size());
  ClassStats s;
  s.mean = Eigen::VectorXd::Zero(nch);
  s.variance = Eigen::VectorXd::Zero(nch);
  for (int ch = 0; ch < nch; ++ch) {
    const Grid<double>& plane = frame.plane(ch);
    double sum = 0.0;
    for (const Pixel& p : pixels) sum += plane(p.row, p.col);
    const double mean = sum / n;
    double ss = 0.0;
    for (const Pixel& p : pixels) {
      const double d = plane(p.row, p.col) - mean;
      ss += d * d;
    }
    s.mean(ch) = mean;
    s.variance(ch) = std::max(ss / n, variance_floor);
  }
  return s;
}

AppearanceModel fit_first_frame(const Frame& frame, const BinaryMask& gt,
                                const SpatialPrior& prior, double variance_floor) {
  check_frame_mask(frame, gt, "fit_first_frame");
  const std::size_t fg = gt.count();
  if (fg == 0) throw std::invalid_argument("fit_first_frame: ground truth is empty");
  if (fg == static_cast<std::size_t>(gt.height()) * gt.width()) {
    throw std::invalid_argument("fit_first_frame: ground truth covers the whole frame");
  }
  if (!(prior.epsilon > 0.0 && prior.epsilon < 0.5)) {
    throw std::invalid_argument("spatial prior epsilon must lie in (0, 0.5)");
  }
  std::vector<Pixel> fg_px;
  std::vector<Pixel> bg_px;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) (gt(r, c) ? fg_px : bg_px).push_back({r, c});
  }
  AppearanceModel model;
  model.foreground =
      pixel_statistics(frame, PixelSet::from_sorted(std::move(fg_px)), variance_floor);
  model.background =
      pixel_statistics(frame, PixelSet::from_sorted(std::move(bg_px)), variance_floor);
  model.prior = prior;
  return model;
}

Grid<double> spatial_prior(const BinaryMask& last_mask, const SpatialPrior& prior) {
  const int h = last_mask.height();
  const int w = last_mask.width();
  Grid<double> dilated = Grid<double>::Zero(h, w);
  const PixelSet source = last_mask.pixels();
  if (!source.empty()) {
    const Grid<std::int64_t> d2 = squared_distance_transform(source, h, w);
    const std::int64_t r2 = static_cast<std::int64_t>(prior.dilation_radius) * prior.dilation_radius;
    dilated = (d2 <= r2).cast<double>();
  }
  return box_blur(dilated, prior.blur_radius).cwiseMax(prior.epsilon).cwiseMin(1.0 - prior.epsilon);
}

ProbabilityMap forward(const AppearanceModel& model, const Frame& frame,
                       const BinaryMask& last_mask) {
  check_frame_mask(frame, last_mask, "forward");
  const int nch = frame.channels();
  if (model.foreground.mean.size() != nch || model.background.mean.size() != nch) {
    throw std::invalid_argument("forward: model channel count does not match frame");
  }
  const Grid<double> ps = spatial_prior(last_mask, model.prior);
  Grid<double> log_odds = model.prior_log_odds + (ps / (1.0 - ps)).log();
  for (int ch = 0; ch < nch; ++ch) {
    const double mf = model.foreground.mean(ch);
    const double vf = model.foreground.variance(ch);
    const double mb = model.background.mean(ch);
    const double vb = model.background.variance(ch);
    const Grid<double>& x = frame.plane(ch);
    log_odds += -0.5 * std::log(vf / vb) - (x - mf).square() / (2.0 * vf) +
                (x - mb).square() / (2.0 * vb);
  }
  // Stable logistic: exp is only ever taken of a non-positive argument.
  Grid<float> cells = log_odds.unaryExpr([](double z) {
    const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return static_cast<float>(p);
  });
  return ProbabilityMap(std::move(cells));
}

BinaryMask predict_mask(const ProbabilityMap& map) {
  return BinaryMask((map.cells() > 0.5f).cast<std::uint8_t>());
}

AppearanceModel adapt(const AppearanceModel& model, const Frame& frame, const PixelSet& positive,
                      const PixelSet& negative, const UpdateConfig& cfg) {
  cfg.validate();
  if (!set_intersection(positive, negative).empty()) {
    throw std::invalid_argument("adapt: positive and negative pixel sets overlap");
  }
  AppearanceModel out = model;
  if (!positive.empty()) {
    out.foreground = blend(model.foreground, pixel_statistics(frame, positive, cfg.variance_floor),
                           cfg.rate, cfg.variance_floor);
  }
  if (!negative.empty()) {
    out.background = blend(model.background, pixel_statistics(frame, negative, cfg.variance_floor),
                           cfg.rate, cfg.variance_floor);
  }
  return out;
}

KeyValues model_to_key_values(const AppearanceModel& model) {
  KeyValues kv;
  put_vector(kv, "fg.mean", model.foreground.mean);
  put_vector(kv, "fg.variance", model.foreground.variance);
  put_vector(kv, "bg.mean", model.background.mean);
  put_vector(kv, "bg.variance", model.background.variance);
  kv.set("prior.log_odds", model.prior_log_odds);
  kv.set("prior.dilation_radius", model.prior.dilation_radius);
  kv.set("prior.blur_radius", model.prior.blur_radius);
  kv.set("prior.epsilon", model.prior.epsilon);
  return kv;
}

AppearanceModel model_from_key_values(const KeyValues& kv) {
  AppearanceModel m;
  m.foreground.mean = get_vector(kv, "fg.mean");
  m.foreground.variance = get_vector(kv, "fg.variance");
  m.background.mean = get_vector(kv, "bg.mean");
  m.background.variance = get_vector(kv, "bg.variance");
  m.prior_log_odds = kv.get_double("prior.log_odds");
  m.prior.dilation_radius = static_cast<int>(kv.get_int("prior.dilation_radius"));
  m.prior.blur_radius = static_cast<int>(kv.get_int("prior.blur_radius"));
  m.prior.epsilon = kv.get_double("prior.epsilon");
  return m;
}

void save_model(const std::filesystem::path& path, const AppearanceModel& model) {
  write_file(path, model_to_key_values(model).format());
}

AppearanceModel load_model(const std::filesystem::path& path) {
  return model_from_key_values(KeyValues::load(path.string()));
}

}  // namespace roivos
