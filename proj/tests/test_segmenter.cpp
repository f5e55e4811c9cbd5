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

#include "doctest.h"
#include "roivos/segmenter.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

using namespace roivos;
using namespace roivos::testing;

namespace {

// clamp(box_blur(dilate(mask)), eps, 1 - eps), by direct enumeration.
double prior_oracle(const BinaryMask& mask, const SpatialPrior& sp, int r, int c) {
  const int h = mask.height();
  const int w = mask.width();
  const auto src = mask_pixels(mask);
  auto dilated = [&](int y, int x) {
    const long d2 = brute_squared_distance(src, y, x);
    return d2 >= 0 && d2 <= static_cast<long>(sp.dilation_radius) * sp.dilation_radius ? 1.0 : 0.0;
  };
  double sum = 0.0;
  int n = 0;
  for (int y = std::max(0, r - sp.blur_radius); y <= std::min(h - 1, r + sp.blur_radius); ++y) {
    for (int x = std::max(0, c - sp.blur_radius); x <= std::min(w - 1, c + sp.blur_radius); ++x) {
      sum += dilated(y, x);
      ++n;
    }
  }
  return std::clamp(sum / n, sp.epsilon, 1.0 - sp.epsilon);
}

double gaussian(double x, double mean, double var) {
  return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

Frame constant_frame(int h, int w, const BinaryMask& gt, double fg, double bg) {
  Grid<double> p(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) p(r, c) = gt(r, c) ? fg : bg;
  }
  return Frame({p});
}

AppearanceModel scalar_model(double mf, double mb, double var) {
  AppearanceModel m;
  m.foreground = {Eigen::VectorXd::Constant(1, mf), Eigen::VectorXd::Constant(1, var)};
  m.background = {Eigen::VectorXd::Constant(1, mb), Eigen::VectorXd::Constant(1, var)};
  return m;
}

}  // namespace

TEST_SUITE("segmenter") {

TEST_CASE("fit on a two-valued frame gives exact means and floored variances") {
  BinaryMask gt(6, 6);
  for (int r = 1; r < 4; ++r) gt.set(r, 2, true);
  const AppearanceModel m = fit_first_frame(constant_frame(6, 6, gt, 0.8, 0.2), gt);
  CHECK(m.foreground.mean(0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.background.mean(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(m.foreground.variance(0) == kDefaultVarianceFloor);
  CHECK(m.background.variance(0) == kDefaultVarianceFloor);
  CHECK_THROWS(fit_first_frame(constant_frame(6, 6, gt, 0.8, 0.2), BinaryMask(6, 6)));
  BinaryMask full(6, 6);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) full.set(r, c, true);
  }
  CHECK_THROWS(fit_first_frame(constant_frame(6, 6, gt, 0.8, 0.2), full));
}

TEST_CASE("fit statistics match a direct two-pass computation") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int h = 4 + static_cast<int>(rng.uniform_int(12));
    const int w = 4 + static_cast<int>(rng.uniform_int(12));
    const Frame f = random_frame(rng, h, w, 3);
    BinaryMask gt = random_mask(rng, h, w, 0.4);
    gt.set(0, 0, true);
    gt.set(h - 1, w - 1, false);
    const AppearanceModel m = fit_first_frame(f, gt);
    for (int ch = 0; ch < 3; ++ch) {
      for (bool fg : {true, false}) {
        double sum = 0.0;
        int n = 0;
        for (int r = 0; r < h; ++r) {
          for (int c = 0; c < w; ++c) {
            if (gt(r, c) == fg) {
              sum += f(r, c, ch);
              ++n;
            }
          }
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (int r = 0; r < h; ++r) {
          for (int c = 0; c < w; ++c) {
            if (gt(r, c) == fg) ss += (f(r, c, ch) - mean) * (f(r, c, ch) - mean);
          }
        }
        const ClassStats& s = fg ? m.foreground : m.background;
        CHECK(std::abs(s.mean(ch) - mean) <= 1e-12);
        CHECK(std::abs(s.variance(ch) - std::max(ss / n, kDefaultVarianceFloor)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("forward matches a scalar re-derivation of the Bayes formula") {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const int h = 5 + static_cast<int>(rng.uniform_int(12));
    const int w = 5 + static_cast<int>(rng.uniform_int(12));
    const Frame f = random_frame(rng, h, w, 3);
    AppearanceModel m;
    m.foreground = {Eigen::VectorXd::NullaryExpr(3, [&] { return rng.uniform(); }),
                    Eigen::VectorXd::NullaryExpr(3, [&] { return rng.uniform(0.02, 0.2); })};
    m.background = {Eigen::VectorXd::NullaryExpr(3, [&] { return rng.uniform(); }),
                    Eigen::VectorXd::NullaryExpr(3, [&] { return rng.uniform(0.02, 0.2); })};
    const BinaryMask last = random_mask(rng, h, w, 0.1);
    const ProbabilityMap map = forward(m, f, last);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double lf = 1.0;
        double lb = 1.0;
        for (int ch = 0; ch < 3; ++ch) {
          lf *= gaussian(f(r, c, ch), m.foreground.mean(ch), m.foreground.variance(ch));
          lb *= gaussian(f(r, c, ch), m.background.mean(ch), m.background.variance(ch));
        }
        const double ps = prior_oracle(last, m.prior, r, c);
        const double expected = ps * lf / (ps * lf + (1.0 - ps) * lb);
        REQUIRE(std::abs(map(r, c) - expected) <= 1e-6);
      }
    }
  }
}

TEST_CASE("forward: dominant likelihood and the symmetric midpoint") {
  const AppearanceModel m = scalar_model(0.8, 0.2, kDefaultVarianceFloor);
  Grid<double> p(1, 2);
  p << 0.8, 0.5;
  // An empty last mask puts the prior at eps everywhere.
  BinaryMask last(1, 2);
  const ProbabilityMap map = forward(m, Frame({p}), last);
  CHECK(map(0, 0) > 0.999f);
  const double eps = m.prior.epsilon;
  CHECK(map(0, 1) == doctest::Approx(eps).epsilon(1e-6));

  // Clamping to [0.5 - 1e-12, 0.5 + 1e-12] makes p_s = 0.5.
  AppearanceModel neutral = m;
  neutral.prior.epsilon = 0.5 - 1e-12;
  const ProbabilityMap mid = forward(neutral, Frame({p}), last);
  CHECK(mid(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(mid(0, 0) > 0.999f);
}

TEST_CASE("forward output lies in [0,1] and is deterministic") {
  Rng rng(2);
  const Frame f = random_frame(rng, 16, 16, 3);
  BinaryMask gt = random_mask(rng, 16, 16, 0.3);
  gt.set(0, 0, true);
  gt.set(15, 15, false);
  const AppearanceModel m = fit_first_frame(f, gt);
  const ProbabilityMap a = forward(m, f, gt);
  CHECK(a == forward(m, f, gt));
  CHECK(a.cells().minCoeff() >= 0.0f);
  CHECK(a.cells().maxCoeff() <= 1.0f);
  CHECK_THROWS(forward(m, f, BinaryMask(16, 15)));
}

TEST_CASE("predict_mask is strict at 0.5") {
  CHECK(predict_mask(ProbabilityMap(3, 3, 0.6f)).count() == 9);
  CHECK(predict_mask(ProbabilityMap(3, 3, 0.5f)).count() == 0);
  Rng rng(4);
  const ProbabilityMap p = random_map(rng, 9, 7);
  const BinaryMask m = predict_mask(p);
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 7; ++c) CHECK(m(r, c) == (p(r, c) > 0.5f));
  }
}

TEST_CASE("adapt: rate 0, rate 1, the 0.2 example and empty sets") {
  Rng rng(6);
  const Frame f = random_frame(rng, 8, 8, 3);
  BinaryMask gt = random_mask(rng, 8, 8, 0.4);
  gt.set(0, 0, true);
  gt.set(7, 7, false);
  const AppearanceModel m = fit_first_frame(f, gt);
  const PixelSet pos = PixelSet::from_unsorted({{1, 1}, {2, 2}, {3, 1}}, 8, 8);
  const PixelSet neg = PixelSet::from_unsorted({{6, 6}, {5, 7}}, 8, 8);

  CHECK(adapt(m, f, pos, neg, {0.0, kDefaultVarianceFloor}) == m);
  CHECK(adapt(m, f, {}, {}, {}) == m);

  const AppearanceModel full = adapt(m, f, pos, neg, {1.0, kDefaultVarianceFloor});
  CHECK(full.foreground == pixel_statistics(f, pos, kDefaultVarianceFloor));
  CHECK(full.background == pixel_statistics(f, neg, kDefaultVarianceFloor));

  Grid<double> ones = Grid<double>::Constant(2, 2, 1.0);
  const AppearanceModel s = scalar_model(0.5, 0.0, 0.01);
  const AppearanceModel moved =
      adapt(s, Frame({ones}), PixelSet::from_unsorted({{0, 0}, {1, 1}}, 2, 2), {}, {});
  CHECK(moved.foreground.mean(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(moved.background == s.background);

  CHECK_THROWS(adapt(m, f, pos, pos, {}));
}

TEST_CASE("model snapshot round-trips exactly") {
  Rng rng(9);
  const Frame f = random_frame(rng, 10, 10, 3);
  BinaryMask gt = random_mask(rng, 10, 10, 0.5);
  gt.set(0, 0, true);
  gt.set(9, 9, false);
  AppearanceModel m = fit_first_frame(f, gt);
  m.prior_log_odds = 0.125;
  const auto path = std::filesystem::temp_directory_path() / "roivos_model.txt";
  save_model(path, m);
  CHECK(load_model(path) == m);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
