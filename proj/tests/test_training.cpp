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
#include "roivos/training.hpp"
#include "support.hpp"

#include <numeric>

using namespace roivos;
using namespace roivos::testing;

namespace {

std::vector<Clip> test_clips(int length, int count, std::uint64_t seed) {
  std::vector<SyntheticSequence> seqs;
  for (int i = 0; i < count; ++i) seqs.push_back(generate_sequence(small_config(length), seed + i));
  return extract_clips(seqs, length, length);
}

// Rewrites a tree so that the IOU of every node depends only on the action
// that led to it: action 0 gives 0.9, any other action 0.05.
ExplorationTree rig(ExplorationTree tree) {
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    tree.nodes[i].iou = tree.path_of(i).back() == 0 ? 0.9 : 0.05;
  }
  return tree;
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("config validation and key-values") {
  CHECK_NOTHROW(TrainConfig{}.validate());
  TrainConfig c;
  c.discount = 1.5;
  CHECK_THROWS(c.validate());
  c = {};
  c.actor_rate = 0.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.batch = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.iterations = 77;
  c.decay = 0.5;
  const TrainConfig d = TrainConfig::from_key_values(c.to_key_values());
  CHECK(d.iterations == 77);
  CHECK(d.decay == 0.5);
  CHECK(d.actor_rate == 1e-5);
  CHECK(d.critic_rate == 5e-5);
  CHECK(d.discount == 0.9);
  CHECK(d.batch == 20);
  CHECK(d.decay_every == 200);
}

TEST_CASE("zero iterations return the initial networks") {
  const EnvironmentConfig env;
  const PooledGridExtractor x(env.feature_grid);
  const auto clips = test_clips(4, 1, 1);
  const std::vector<ExplorationTree> trees{build_tree(clips[0], AgentRole::positive, env)};
  TrainConfig cfg;
  cfg.iterations = 0;
  const TrainResult r = train_agent(AgentRole::positive, trees, clips, cfg, 5, x);
  Rng init(mix_seed(5, 1));
  const Eigen::Index len = state_length(AgentRole::positive, x, 3);
  CHECK(r.actor == PolicyNetd::random(len, 2, init, cfg.hidden));
  CHECK(r.critic == ValueNetd::random(len, init, cfg.hidden));
  CHECK(r.reward_curve.empty());
}

TEST_CASE("an empty cache set is an error") {
  const PooledGridExtractor x;
  CHECK_THROWS_AS(train_agent(AgentRole::positive, {}, {}, TrainConfig{}, 1, x),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_agent(std::span<EpisodeWalker* const>{}, TrainConfig{}, 1),
                  std::invalid_argument);
}

TEST_CASE("trees of the wrong role are rejected") {
  const EnvironmentConfig env;
  const PooledGridExtractor x;
  const auto clips = test_clips(4, 1, 2);
  const std::vector<ExplorationTree> trees{build_tree(clips[0], AgentRole::negative, env)};
  CHECK_THROWS(train_agent(AgentRole::positive, trees, clips, TrainConfig{}, 1, x));
}

TEST_CASE("training on a rigged cache learns the dominant action") {
  const EnvironmentConfig env;
  const PooledGridExtractor x(env.feature_grid);
  const auto clips = test_clips(6, 4, 20);
  std::vector<ExplorationTree> trees;
  for (const Clip& c : clips) trees.push_back(rig(build_tree(c, AgentRole::positive, env)));

  TrainConfig cfg;
  cfg.iterations = 2000;
  const TrainResult r = train_agent(AgentRole::positive, trees, clips, cfg, 3, x);
  std::vector<Eigen::VectorXd> states;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const TreeWalker w(trees[i], clips[i], x);
    states.insert(states.end(), w.internal_states().begin(), w.internal_states().end());
  }
  CHECK(greedy_agreement(r.actor, states, 0) >= 0.95);
  REQUIRE(r.reward_curve.size() == 2000);
  const std::span<const double> curve(r.reward_curve);
  CHECK(mean(curve.last(500)) > mean(curve.first(500)));
}

TEST_CASE("cached and live training produce identical networks") {
  const EnvironmentConfig env;
  auto x = std::make_shared<PooledGridExtractor>(env.feature_grid);
  for (AgentRole role : {AgentRole::positive, AgentRole::negative}) {
    const auto clips = test_clips(role == AgentRole::positive ? 5 : 4, 3, 30);
    std::vector<ExplorationTree> trees;
    std::vector<TreeWalker> cached;
    std::vector<LiveWalker> live;
    for (const Clip& c : clips) trees.push_back(build_tree(c, role, env));
    for (std::size_t i = 0; i < clips.size(); ++i) {
      cached.emplace_back(trees[i], clips[i], *x);
      live.emplace_back(clips[i], role, env, x);
    }
    std::vector<EpisodeWalker*> a, b;
    for (auto& w : cached) a.push_back(&w);
    for (auto& w : live) b.push_back(&w);
    TrainConfig cfg;
    cfg.iterations = 15;
    cfg.batch = 4;
    cfg.actor_rate = 1e-3;
    cfg.critic_rate = 1e-3;
    const TrainResult ra = train_agent(a, cfg, 9);
    const TrainResult rb = train_agent(b, cfg, 9);
    CHECK(ra.actor == rb.actor);
    CHECK(ra.critic == rb.critic);
    CHECK(ra.reward_curve == rb.reward_curve);
  }
}

TEST_CASE("training is reproducible from the seed") {
  const EnvironmentConfig env;
  const PooledGridExtractor x(env.feature_grid);
  const auto clips = test_clips(4, 2, 40);
  std::vector<ExplorationTree> trees;
  for (const Clip& c : clips) trees.push_back(build_tree(c, AgentRole::negative, env));
  TrainConfig cfg;
  cfg.iterations = 20;
  const TrainResult a = train_agent(AgentRole::negative, trees, clips, cfg, 4, x);
  const TrainResult b = train_agent(AgentRole::negative, trees, clips, cfg, 4, x);
  const TrainResult c = train_agent(AgentRole::negative, trees, clips, cfg, 5, x);
  CHECK(a.actor == b.actor);
  CHECK(a.reward_curve == b.reward_curve);
  CHECK_FALSE(a.actor == c.actor);
}

TEST_CASE("reward curve csv") {
  const std::vector<double> curve{1.5, -1.0, 0.123456789};
  CHECK(reward_curve_csv(curve) == "iteration,mean_reward\n1,1.5\n2,-1\n3,0.123457\n");
}

}  // TEST_SUITE
