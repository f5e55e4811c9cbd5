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

#include "roivos/training.hpp"

#include "roivos/pipeline.hpp"
#include "roivos/rng.hpp"

#include <stdexcept>

namespace roivos {

void TrainConfig::validate() const {
  if (!(actor_rate > 0.0 && critic_rate > 0.0)) {
    throw std::invalid_argument("train: learning rates must be > 0");
  }
  if (!(discount >= 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("train.discount must lie in [0,1]");
  }
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("train.decay must lie in (0,1]");
  if (decay_every < 1 || batch < 1 || iterations < 0 || hidden < 1) {
    throw std::invalid_argument("train: decay_every, batch and hidden must be >= 1");
  }
}

std::vector<std::string> TrainConfig::keys() {
  return {"train.actor_rate", "train.critic_rate", "train.discount",   "train.decay",
          "train.decay_every", "train.batch",      "train.iterations", "train.hidden"};
}

KeyValues TrainConfig::to_key_values() const {
  KeyValues kv;
  kv.set("train.actor_rate", actor_rate);
  kv.set("train.critic_rate", critic_rate);
  kv.set("train.discount", discount);
  kv.set("train.decay", decay);
  kv.set("train.decay_every", decay_every);
  kv.set("train.batch", batch);
  kv.set("train.iterations", iterations);
  kv.set("train.hidden", hidden);
  return kv;
}

TrainConfig TrainConfig::from_key_values(const KeyValues& kv) {
  TrainConfig c;
  c.actor_rate = kv.get_double("train.actor_rate", c.actor_rate);
  c.critic_rate = kv.get_double("train.critic_rate", c.critic_rate);
  c.discount = kv.get_double("train.discount", c.discount);
  c.decay = kv.get_double("train.decay", c.decay);
  c.decay_every = static_cast<int>(kv.get_int("train.decay_every", c.decay_every));
  c.batch = static_cast<int>(kv.get_int("train.batch", c.batch));
  c.iterations = static_cast<int>(kv.get_int("train.iterations", c.iterations));
  c.hidden = static_cast<int>(kv.get_int("train.hidden", c.hidden));
  return c;
}

// ---------------------------------------------------------------------------
// Walkers

TreeWalker::TreeWalker(const ExplorationTree& tree, const Clip& clip,
                       const DescriptorExtractor& extractor)
    : branching_(tree.branching()), depth_(tree.depth) {
  if (clip.id() != tree.clip_id) {
    throw std::invalid_argument("TreeWalker: clip " + clip.id() + " does not match tree " +
                                tree.clip_id);
  }
  depths_.reserve(tree.nodes.size());
  rewards_.reserve(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    depths_.push_back(node.depth);
    rewards_.push_back(reward(node.iou));
    if (node.depth < depth_) {
      if (!node.pmap || !node.map_frame) {
        throw std::invalid_argument("TreeWalker: internal node without a stored map");
      }
      states_.push_back(
          build_state(tree.role, extractor, clip.frames[*node.map_frame], *node.pmap).values);
    }
  }
  state_length_ = states_.front().size();
}

const Eigen::VectorXd& TreeWalker::state() const {
  if (terminal()) throw std::logic_error("TreeWalker: no state at a leaf");
  // Internal nodes precede every leaf in breadth-first order.
  return states_[node_];
}

double TreeWalker::step(int action) {
  if (terminal()) throw std::logic_error("TreeWalker: episode already finished");
  if (action < 0 || action >= branching_) throw std::out_of_range("TreeWalker: bad action");
  node_ = node_ * static_cast<std::size_t>(branching_) + 1 + static_cast<std::size_t>(action);
  return rewards_[node_];
}

LiveWalker::LiveWalker(Clip clip, AgentRole role, EnvironmentConfig env,
                       std::shared_ptr<const DescriptorExtractor> extractor)
    : clip_(std::move(clip)),
      role_(role),
      env_(std::move(env)),
      extractor_(std::move(extractor)),
      actions_(ThresholdActionSet::for_role(role)) {
  if (clip_.frames.size() < 2) throw std::invalid_argument("LiveWalker: clip too short");
  reset();
}

Eigen::Index LiveWalker::state_length() const {
  return roivos::state_length(role_, *extractor_, clip_.frames[0].channels());
}

void LiveWalker::reset() {
  frame_ = 1;
  seg_ = initial_state(env_, clip_.frames[0], clip_.truths[0]);
  temporary_ = temporary_map(seg_, clip_.frames[1]);
  state_ = build_state(role_, *extractor_, clip_.frames[1], temporary_).values;
}

bool LiveWalker::terminal() const { return frame_ >= static_cast<int>(clip_.frames.size()); }

double LiveWalker::step(int action) {
  if (terminal()) throw std::logic_error("LiveWalker: episode already finished");
  const StepResult r = apply_choice(seg_, clip_.frames[frame_], temporary_,
                                    pinned_choice(role_, actions_, action), env_);
  const double rew = reward(iou(r.output, clip_.truths[frame_]));
  seg_ = r.next;
  ++frame_;
  if (!terminal()) {
    temporary_ = temporary_map(seg_, clip_.frames[frame_]);
    state_ = build_state(role_, *extractor_, clip_.frames[frame_], temporary_).values;
  }
  return rew;
}

// ---------------------------------------------------------------------------
// Training

TrainResult train_agent(std::span<EpisodeWalker* const> episodes, const TrainConfig& cfg,
                        std::uint64_t seed) {
  cfg.validate();
  if (episodes.empty()) throw std::invalid_argument("train_agent: no cached clips");
  const Eigen::Index len = episodes.front()->state_length();
  const int actions = episodes.front()->actions();
  for (const EpisodeWalker* e : episodes) {
    if (e->state_length() != len || e->actions() != actions) {
      throw std::invalid_argument("train_agent: episodes disagree on state or action shape");
    }
  }

  Rng init(mix_seed(seed, 1));
  Rng sampler(mix_seed(seed, 2));
  TrainResult out{PolicyNetd::random(len, actions, init, cfg.hidden),
                  ValueNetd::random(len, init, cfg.hidden),
                  {}};
  out.reward_curve.reserve(static_cast<std::size_t>(cfg.iterations));

  double actor_rate = cfg.actor_rate;
  double critic_rate = cfg.critic_rate;
  for (int it = 1; it <= cfg.iterations; ++it) {
    double total = 0.0;
    long transitions = 0;
    for (int b = 0; b < cfg.batch; ++b) {
      EpisodeWalker& ep = *episodes[sampler.uniform_int(episodes.size())];
      ep.reset();
      while (!ep.terminal()) {
        const Eigen::VectorXd s = ep.state();
        const int a = sample_action(out.actor.probabilities(s), sampler);
        const double r = ep.step(a);
        std::optional<double> next_value;
        if (!ep.terminal()) next_value = out.critic.value(ep.state());
        const double delta = td_error(r, next_value, out.critic.value(s), cfg.discount);
        out.critic = critic_update(std::move(out.critic), s, delta, critic_rate);
        out.actor = actor_update(std::move(out.actor), s, a, delta, actor_rate);
        total += r;
        ++transitions;
      }
    }
    out.reward_curve.push_back(total / static_cast<double>(transitions));
    if (it % cfg.decay_every == 0) {
      actor_rate *= cfg.decay;
      critic_rate *= cfg.decay;
    }
  }
  return out;
}

TrainResult train_agent(AgentRole role, std::span<const ExplorationTree> trees,
                        std::span<const Clip> clips, const TrainConfig& cfg, std::uint64_t seed,
                        const DescriptorExtractor& extractor) {
  if (trees.empty()) throw std::invalid_argument("train_agent: no cached clips");
  if (trees.size() != clips.size()) {
    throw std::invalid_argument("train_agent: one clip per tree required");
  }
  std::vector<TreeWalker> walkers;
  walkers.reserve(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (trees[i].role != role) {
      throw std::invalid_argument("train_agent: tree " + trees[i].clip_id + " is for role " +
                                  std::string(to_string(trees[i].role)));
    }
    walkers.emplace_back(trees[i], clips[i], extractor);
  }
  std::vector<EpisodeWalker*> episodes;
  for (auto& w : walkers) episodes.push_back(&w);
  return train_agent(episodes, cfg, seed);
}

double greedy_agreement(const PolicyNetd& actor, std::span<const Eigen::VectorXd> states,
                        int action) {
  if (states.empty()) throw std::invalid_argument("greedy_agreement: no states");
  std::size_t hits = 0;
  for (const auto& s : states) {
    if (greedy_action(actor.probabilities(s)) == action) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(states.size());
}

std::string reward_curve_csv(std::span<const double> curve) {
  std::string out = "iteration,mean_reward\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_number(curve[i]) + "\n";
  }
  return out;
}

}  // namespace roivos
