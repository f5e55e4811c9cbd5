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

// Exploration trees: every action prefix of one training clip, evaluated
// once and stored so that training can replay transitions instead of
// re-running the segmenter.
//
// A clip of L frames gives L-1 decisions (frames 1..L-1, 0-based; frame 0
// is fitted from its annotation). The node for prefix (a_1..a_d) holds
//   iou        IOU of the mask produced on frame d by the last action
//              (the root holds the IOU of the fitted model on frame 0)
//   pmap       temporary map of frame d+1 under the adapted model
//   dmap       distance to {pmap > 0.97}, negative-agent trees only
// Leaves have no next frame and therefore no maps.
//
// The agent that is not being trained is pinned: positive-agent trees use
// distance-only negatives, negative-agent trees use t_p = 0.97.

#pragma once

#include "roivos/agent.hpp"
#include "roivos/environment.hpp"
#include "roivos/features.hpp"
#include "roivos/key_values.hpp"
#include "roivos/synthseq.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roivos {

struct TreeNode {
  int depth = 0;
  std::optional<int> map_frame;  // clip frame the stored maps belong to
  std::optional<ProbabilityMap> pmap;
  std::optional<DistanceMap> dmap;
  double iou = 0.0;
  bool skipped = false;  // S_p was empty on the decided frame

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Complete |A|-ary tree stored in breadth-first order: the children of node
/// i are i*|A| + 1 + a for a in [0, |A|).
struct ExplorationTree {
  std::string clip_id;
  AgentRole role = AgentRole::positive;
  ThresholdActionSet actions;
  int depth = 0;
  KeyValues fingerprint;
  std::vector<TreeNode> nodes;

  [[nodiscard]] int branching() const { return actions.size(); }
  [[nodiscard]] std::size_t child(std::size_t node, int action) const {
    return node * static_cast<std::size_t>(branching()) + 1 + static_cast<std::size_t>(action);
  }
  [[nodiscard]] bool is_leaf(std::size_t node) const { return nodes[node].depth == depth; }
  /// Node index for an action path from the root; throws on bad actions.
  [[nodiscard]] std::size_t find(std::span<const int> path) const;
  /// Action path from the root to `node`.
  [[nodiscard]] std::vector<int> path_of(std::size_t node) const;

  friend bool operator==(const ExplorationTree&, const ExplorationTree&) = default;
};

/// (|A|^(depth+1) - 1) / (|A| - 1); depth + 1 for a single action.
std::size_t tree_node_count(int branching, int depth);

/// Thresholds applied when the tree's agent takes `action`, with the other
/// agent pinned.
ThresholdChoice pinned_choice(AgentRole role, const ThresholdActionSet& actions, int action);

/// Everything that determines a tree's contents: environment config, clip
/// identity and pixel content hash, role, action set and pins.
KeyValues tree_fingerprint(const Clip& clip, AgentRole role, const EnvironmentConfig& env);

/// 64-bit FNV-1a over the clip's frames and annotations.
std::uint64_t clip_hash(const Clip& clip);

ExplorationTree build_tree(const Clip& clip, AgentRole role, const EnvironmentConfig& env);

/// Node contents along one root-to-node path, recomputed from scratch
/// (element k is the node at depth k).
std::vector<TreeNode> live_rollout(const Clip& clip, AgentRole role, std::span<const int> path,
                                   const EnvironmentConfig& env);

/// Directory layout: manifest.txt plus one directory per node named by its
/// action path ("root", "root/0", "root/0/1", ...), each holding
/// meta.txt, iou.txt and, for internal nodes, pmap.pmp (and dmap.dst).
void persist(const ExplorationTree& tree, const std::filesystem::path& dir);
ExplorationTree load_tree(const std::filesystem::path& dir);

struct Transition {
  AgentState state;
  int action = 0;
  double reward = 0.0;
  std::optional<AgentState> next;  // nullopt at the terminal step

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Transitions along a full-depth path read from the cache.
std::vector<Transition> replay_transitions(const ExplorationTree& tree, std::span<const int> path,
                                           const Clip& clip, const DescriptorExtractor& extractor);

/// The same transitions computed by running the environment live.
std::vector<Transition> live_transitions(const Clip& clip, AgentRole role,
                                         std::span<const int> path, const EnvironmentConfig& env,
                                         const DescriptorExtractor& extractor);

/// Checks the fingerprint against (clip, env), then re-runs `paths` random
/// full-depth paths live and compares every stored node bit-exactly.
bool verify_replay(const ExplorationTree& tree, const Clip& clip, const EnvironmentConfig& env,
                   int paths, std::uint64_t seed);

}  // namespace roivos
