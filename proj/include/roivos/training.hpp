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

// Actor-critic training over clip episodes. Each iteration draws a batch of
// clips uniformly with replacement and walks each one from the first
// decision to the last, sampling actions from the current policy. Every
// transition updates the critic first and then the actor with the same TD
// error.

#pragma once

#include "roivos/agent.hpp"
#include "roivos/environment.hpp"
#include "roivos/features.hpp"
#include "roivos/key_values.hpp"
#include "roivos/treecache.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace roivos {

struct TrainConfig {
  double actor_rate = 1e-5;
  double critic_rate = 5e-5;
  double discount = 0.9;
  double decay = 0.99;    // applied to both rates ...
  int decay_every = 200;  // ... after every this many iterations
  int batch = 20;
  int iterations = 5000;
  int hidden = 64;

  void validate() const;
  /// Keys are prefixed "train.".
  [[nodiscard]] KeyValues to_key_values() const;
  static TrainConfig from_key_values(const KeyValues& kv);
  static std::vector<std::string> keys();
};

/// One clip seen as an episode of decisions.
class EpisodeWalker {
 public:
  virtual ~EpisodeWalker() = default;
  [[nodiscard]] virtual Eigen::Index state_length() const = 0;
  [[nodiscard]] virtual int actions() const = 0;
  /// Back to the first decision.
  virtual void reset() = 0;
  [[nodiscard]] virtual const Eigen::VectorXd& state() const = 0;
  /// Takes an action and returns its reward; state() then refers to the
  /// next decision unless terminal().
  virtual double step(int action) = 0;
  [[nodiscard]] virtual bool terminal() const = 0;
};

/// Reads states and rewards from a cached tree. States of every internal
/// node are computed once up front; the tree's maps are not retained.
class TreeWalker final : public EpisodeWalker {
 public:
  TreeWalker(const ExplorationTree& tree, const Clip& clip, const DescriptorExtractor& extractor);

  [[nodiscard]] Eigen::Index state_length() const override { return state_length_; }
  [[nodiscard]] int actions() const override { return branching_; }
  void reset() override { node_ = 0; }
  [[nodiscard]] const Eigen::VectorXd& state() const override;
  double step(int action) override;
  [[nodiscard]] bool terminal() const override { return depths_[node_] == depth_; }

  /// Greedy-evaluation helper: states of all internal nodes.
  [[nodiscard]] const std::vector<Eigen::VectorXd>& internal_states() const { return states_; }

 private:
  int branching_ = 0;
  int depth_ = 0;
  Eigen::Index state_length_ = 0;
  std::size_t node_ = 0;
  std::vector<int> depths_;
  std::vector<double> rewards_;
  std::vector<Eigen::VectorXd> states_;  // internal nodes, BFS order
};

/// Runs the environment as the episode unfolds; used to cross-check the
/// cache and for small experiments without building trees.
class LiveWalker final : public EpisodeWalker {
 public:
  LiveWalker(Clip clip, AgentRole role, EnvironmentConfig env,
             std::shared_ptr<const DescriptorExtractor> extractor);

  [[nodiscard]] Eigen::Index state_length() const override;
  [[nodiscard]] int actions() const override { return actions_.size(); }
  void reset() override;
  [[nodiscard]] const Eigen::VectorXd& state() const override { return state_; }
  double step(int action) override;
  [[nodiscard]] bool terminal() const override;

 private:
  Clip clip_;
  AgentRole role_;
  EnvironmentConfig env_;
  std::shared_ptr<const DescriptorExtractor> extractor_;
  ThresholdActionSet actions_;
  int frame_ = 1;  // frame of the pending decision
  SegmentationState seg_;
  ProbabilityMap temporary_;
  Eigen::VectorXd state_;
};

struct TrainResult {
  PolicyNetd actor;
  ValueNetd critic;
  std::vector<double> reward_curve;  // mean reward per transition, per iteration
};

/// Throws std::invalid_argument when `episodes` is empty or the walkers
/// disagree on state length or action count.
TrainResult train_agent(std::span<EpisodeWalker* const> episodes, const TrainConfig& cfg,
                        std::uint64_t seed);

/// Convenience overload over cached trees and their clips (matched by
/// position).
TrainResult train_agent(AgentRole role, std::span<const ExplorationTree> trees,
                        std::span<const Clip> clips, const TrainConfig& cfg, std::uint64_t seed,
                        const DescriptorExtractor& extractor);

/// Fraction of states on which the greedy action equals `action`.
double greedy_agreement(const PolicyNetd& actor, std::span<const Eigen::VectorXd> states,
                        int action);

/// "iteration,mean_reward" with 6 significant digits.
std::string reward_curve_csv(std::span<const double> curve);

}  // namespace roivos
