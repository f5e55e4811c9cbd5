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
#include "roivos/features.hpp"
#include "support.hpp"

using namespace roivos;
using namespace roivos::testing;

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

TEST_SUITE("features") {

TEST_CASE("descriptor length") {
  const PooledGridExtractor x;
  CHECK(x.length(3) == 8 * 8 * 3 + 8 * 8 + 4);
  CHECK(state_length(AgentRole::positive, x, 3) == 2 * 260);
  CHECK(state_length(AgentRole::negative, x, 3) == 3 * 260);
  CHECK(state_thresholds(AgentRole::negative) == std::vector<double>{0.4, 0.2, 0.1});
}

TEST_CASE("pooled values equal direct per-cell averaging") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int g = 2 + static_cast<int>(rng.uniform_int(7));
    const int h = 1 + static_cast<int>(rng.uniform_int(30));
    const int w = 1 + static_cast<int>(rng.uniform_int(30));
    const PooledGridExtractor x(g);
    const Frame f = random_frame(rng, h, w, 3);
    const ProbabilityMap m = random_map(rng, h, w);
    const BinaryMask roi_mask = random_mask(rng, h, w, rng.uniform(0.05, 0.8));
    const PixelSet roi = roi_mask.pixels();
    const Eigen::VectorXd d = x.describe(f, m, roi);
    REQUIRE(d.size() == x.length(3));
    if (roi.empty()) {
      CHECK(d.isZero(0.0));
      continue;
    }
    const int cells = g * g;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const int r0 = ceil_div(i * h, g);
        const int r1 = ceil_div((i + 1) * h, g);
        const int c0 = ceil_div(j * w, g);
        const int c1 = ceil_div((j + 1) * w, g);
        int in_cell = 0;
        int in_roi = 0;
        double sums[3] = {0.0, 0.0, 0.0};
        for (int r = r0; r < r1; ++r) {
          for (int c = c0; c < c1; ++c) {
            ++in_cell;
            if (!roi_mask(r, c)) continue;
            ++in_roi;
            for (int ch = 0; ch < 3; ++ch) sums[ch] += f(r, c, ch);
          }
        }
        const int k = i * g + j;
        for (int ch = 0; ch < 3; ++ch) {
          const double expected = in_roi == 0 ? 0.0 : sums[ch] / in_roi;
          CHECK(d(ch * cells + k) == doctest::Approx(expected).epsilon(1e-12));
        }
        const double occ = in_cell == 0 ? 0.0 : static_cast<double>(in_roi) / in_cell;
        CHECK(d(3 * cells + k) == doctest::Approx(occ).epsilon(1e-12));
      }
    }
    double rows = 0.0, cols = 0.0, prob = 0.0;
    for (const Pixel& p : roi) {
      rows += p.row;
      cols += p.col;
      prob += m(p.row, p.col);
    }
    const double n = static_cast<double>(roi.size());
    const int s = 4 * cells;
    CHECK(d(s) == doctest::Approx(n / (h * w)).epsilon(1e-12));
    CHECK(d(s + 1) == doctest::Approx(h > 1 ? rows / n / (h - 1) : 0.0).epsilon(1e-12));
    CHECK(d(s + 2) == doctest::Approx(w > 1 ? cols / n / (w - 1) : 0.0).epsilon(1e-12));
    CHECK(d(s + 3) == doctest::Approx(prob / n).epsilon(1e-12));
    CHECK(d.allFinite());
  }
}

TEST_CASE("empty and full ROI descriptors") {
  const PooledGridExtractor x;
  Rng rng(1);
  const ProbabilityMap m = random_map(rng, 16, 16);
  CHECK(x.describe(random_frame(rng, 16, 16, 3), m, {}).isZero(0.0));

  const Frame flat({Grid<double>::Constant(16, 16, 0.3), Grid<double>::Constant(16, 16, 0.3),
                    Grid<double>::Constant(16, 16, 0.3)});
  BinaryMask all(16, 16);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) all.set(r, c, true);
  }
  const Eigen::VectorXd d = x.describe(flat, m, all.pixels());
  CHECK((d.head(3 * 64).array() == 0.3).all());
  CHECK((d.segment(3 * 64, 64).array() == 1.0).all());
  CHECK(d(4 * 64) == 1.0);
}

TEST_CASE("states concatenate candidate descriptors in order") {
  const PooledGridExtractor x;
  Rng rng(3);
  const Frame f = random_frame(rng, 20, 20, 3);
  const ProbabilityMap m = random_map(rng, 20, 20);
  const AgentState sp = build_state_p(x, f, m);
  const AgentState sn = build_state_n(x, f, m);
  REQUIRE(sp.values.size() == 520);
  REQUIRE(sn.values.size() == 780);
  CHECK(sp.values.head(260) == x.describe(f, m, threshold_above(m, 0.97)));
  CHECK(sp.values.tail(260) == x.describe(f, m, threshold_above(m, 0.7)));
  CHECK(sn.values.segment(0, 260) == x.describe(f, m, threshold_above(m, 0.4)));
  CHECK(sn.values.segment(260, 260) == x.describe(f, m, threshold_above(m, 0.2)));
  CHECK(sn.values.segment(520, 260) == x.describe(f, m, threshold_above(m, 0.1)));
  CHECK(build_state(AgentRole::negative, x, f, m) == sn);

  // Swapping the two candidates changes the state.
  Eigen::VectorXd swapped(520);
  swapped << sp.values.tail(260), sp.values.head(260);
  CHECK(swapped != sp.values);

  CHECK(build_state_p(x, f, ProbabilityMap(20, 20, 0.0f)).values.isZero(0.0));
  const AgentState high = build_state_p(x, f, ProbabilityMap(20, 20, 0.99f));
  CHECK(high.values.head(260) == high.values.tail(260));
}

TEST_CASE("state length does not depend on frame content") {
  const PooledGridExtractor x;
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Frame f = random_frame(rng, 24, 24, 3);
    const ProbabilityMap m = random_map(rng, 24, 24);
    CHECK(build_state_p(x, f, m).values.size() == 520);
    CHECK(build_state_n(x, f, m).values.size() == 780);
  }
}

}  // TEST_SUITE
