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

#include "roivos/environment.hpp"

#include <stdexcept>

namespace roivos {

void EnvironmentConfig::validate() const {
  update.validate();
  if (!(prior.epsilon > 0.0 && prior.epsilon < 0.5)) {
    throw std::invalid_argument("env.prior.epsilon must lie in (0, 0.5)");
  }
  if (prior.dilation_radius < 0 || prior.blur_radius < 0) {
    throw std::invalid_argument("env.prior radii must be >= 0");
  }
  if (!(roi.distance_fraction >= 0.0)) {
    throw std::invalid_argument("env.roi.distance_fraction must be >= 0");
  }
  if (feature_grid < 1) throw std::invalid_argument("env.feature_grid must be >= 1");
}

std::vector<std::string> EnvironmentConfig::keys() {
  return {"env.prior.dilation_radius", "env.prior.blur_radius", "env.prior.epsilon",
          "env.update.rate",           "env.update.variance_floor", "env.roi.distance_fraction",
          "env.feature_grid"};
}

KeyValues EnvironmentConfig::to_key_values() const {
  KeyValues kv;
  kv.set("env.prior.dilation_radius", prior.dilation_radius);
  kv.set("env.prior.blur_radius", prior.blur_radius);
  kv.set("env.prior.epsilon", prior.epsilon);
  kv.set("env.update.rate", update.rate);
  kv.set("env.update.variance_floor", update.variance_floor);
  kv.set("env.roi.distance_fraction", roi.distance_fraction);
  kv.set("env.feature_grid", feature_grid);
  return kv;
}

EnvironmentConfig EnvironmentConfig::from_key_values(const KeyValues& kv) {
  EnvironmentConfig c;
  c.prior.dilation_radius =
      static_cast<int>(kv.get_int("env.prior.dilation_radius", c.prior.dilation_radius));
  c.prior.blur_radius = static_cast<int>(kv.get_int("env.prior.blur_radius", c.prior.blur_radius));
  c.prior.epsilon = kv.get_double("env.prior.epsilon", c.prior.epsilon);
  c.update.rate = kv.get_double("env.update.rate", c.update.rate);
  c.update.variance_floor = kv.get_double("env.update.variance_floor", c.update.variance_floor);
  c.roi.distance_fraction = kv.get_double("env.roi.distance_fraction", c.roi.distance_fraction);
  c.feature_grid = static_cast<int>(kv.get_int("env.feature_grid", c.feature_grid));
  return c;
}

SegmentationState initial_state(const EnvironmentConfig& cfg, const Frame& first_frame,
                                const BinaryMask& first_truth) {
  return {fit_first_frame(first_frame, first_truth, cfg.prior, cfg.update.variance_floor),
          first_truth};
}

ProbabilityMap temporary_map(const SegmentationState& state, const Frame& frame) {
  return forward(state.model, frame, state.last_mask);
}

StepResult apply_choice(const SegmentationState& state, const Frame& frame,
                        const ProbabilityMap& temporary, const ThresholdChoice& choice,
                        const EnvironmentConfig& cfg) {
  StepResult out;
  out.next = state;
  if (choice.adapt) {
    out.regions = build_regions(temporary, choice.t_p, choice.t_n,
                                cfg.roi.distance_threshold(frame.height(), frame.width()));
    if (out.regions.positive.empty()) {
      // The distance rule is undefined without positives; leave the model be.
      out.skipped = true;
    } else {
      out.next.model =
          adapt(state.model, frame, out.regions.positive, out.regions.negative, cfg.update);
      out.adapted = true;
    }
  }
  out.final_map = out.adapted ? forward(out.next.model, frame, state.last_mask) : temporary;
  out.output = predict_mask(out.final_map);
  out.next.last_mask = out.output;
  return out;
}

}  // namespace roivos
