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

#include "roivos/treecache.hpp"

#include "roivos/grid_io.hpp"
#include "roivos/rng.hpp"

#include <bit>
#include <stdexcept>

namespace roivos {

namespace {

int decision_depth(const Clip& clip) {
  if (clip.frames.size() < 2 || clip.frames.size() != clip.truths.size()) {
    throw std::invalid_argument("clip " + clip.id() + " needs >= 2 annotated frames");
  }
  return static_cast<int>(clip.frames.size()) - 1;
}

// Stored maps for the node whose next undecided frame is `frame`.
void attach_maps(TreeNode& node, AgentRole role, const SegmentationState& state, const Clip& clip,
                 int frame) {
  node.map_frame = frame;
  node.pmap = temporary_map(state, clip.frames[frame]);
  if (role == AgentRole::negative) {
    node.dmap = distance_transform(select_positive(*node.pmap, kConservativePositiveThreshold),
                                   node.pmap->height(), node.pmap->width());
  }
}

TreeNode root_node(AgentRole role, const SegmentationState& state, const Clip& clip) {
  TreeNode root;
  root.iou = iou(predict_mask(temporary_map(state, clip.frames[0])), clip.truths[0]);
  attach_maps(root, role, state, clip, 1);
  return root;
}

// Applies `action` at a node of depth `depth` and returns the child node
// together with the state it leads to.
std::pair<TreeNode, SegmentationState> step(const TreeNode& node, const SegmentationState& state,
                                            AgentRole role, const ThresholdActionSet& actions,
                                            int action, const Clip& clip, int depth,
                                            const EnvironmentConfig& env) {
  const int frame = depth + 1;
  const StepResult r = apply_choice(state, clip.frames[frame], *node.pmap,
                                    pinned_choice(role, actions, action), env);
  TreeNode child;
  child.depth = depth + 1;
  child.iou = iou(r.output, clip.truths[frame]);
  child.skipped = r.skipped;
  if (frame + 1 < static_cast<int>(clip.frames.size())) {
    attach_maps(child, role, r.next, clip, frame + 1);
  }
  return {std::move(child), r.next};
}

void expand(ExplorationTree& tree, std::size_t index, const SegmentationState& state,
            const Clip& clip, const EnvironmentConfig& env) {
  const int depth = tree.nodes[index].depth;
  if (depth == tree.depth) return;
  for (int a = 0; a < tree.branching(); ++a) {
    auto [child, next] = step(tree.nodes[index], state, tree.role, tree.actions, a, clip, depth, env);
    const std::size_t c = tree.child(index, a);
    tree.nodes[c] = std::move(child);
    expand(tree, c, next, clip, env);
  }
}

std::filesystem::path node_dir(const std::filesystem::path& root, std::span<const int> path) {
  std::filesystem::path p = root / "root";
  for (int a : path) p /= std::to_string(a);
  return p;
}

std::string actions_text(const ThresholdActionSet& actions) {
  KeyValues kv;
  kv.set("a", actions.candidates);
  return kv.get("a");
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::size_t ExplorationTree::find(std::span<const int> path) const {
  if (static_cast<int>(path.size()) > depth) throw std::out_of_range("path longer than tree depth");
  std::size_t node = 0;
  for (int a : path) {
    if (a < 0 || a >= branching()) throw std::out_of_range("action index out of range");
    node = child(node, a);
  }
  return node;
}

std::vector<int> ExplorationTree::path_of(std::size_t node) const {
  std::vector<int> path;
  const auto b = static_cast<std::size_t>(branching());
  while (node != 0) {
    path.push_back(static_cast<int>((node - 1) % b));
    node = (node - 1) / b;
  }
  return {path.rbegin(), path.rend()};
}

std::size_t tree_node_count(int branching, int depth) {
  if (branching < 1 || depth < 0) throw std::invalid_argument("tree_node_count: bad shape");
  std::size_t total = 0;
  std::size_t level = 1;
  for (int d = 0; d <= depth; ++d) {
    total += level;
    level *= static_cast<std::size_t>(branching);
  }
  return total;
}

ThresholdChoice pinned_choice(AgentRole role, const ThresholdActionSet& actions, int action) {
  ThresholdChoice choice;
  if (role == AgentRole::positive) {
    choice.t_p = actions[action];
  } else {
    choice.t_p = kConservativePositiveThreshold;
    choice.t_n = actions[action];
  }
  return choice;
}

std::uint64_t clip_hash(const Clip& clip) {
  std::uint64_t h = kFnvOffset;
  for (const Frame& f : clip.frames) {
    for (int ch = 0; ch < f.channels(); ++ch) {
      const Grid<double>& plane = f.plane(ch);
      for (Eigen::Index i = 0; i < plane.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(plane.data()[i]);
        fnv_bytes(h, &bits, sizeof bits);
      }
    }
  }
  for (const BinaryMask& m : clip.truths) {
    fnv_bytes(h, m.cells().data(), static_cast<std::size_t>(m.cells().size()));
  }
  return h;
}

KeyValues tree_fingerprint(const Clip& clip, AgentRole role, const EnvironmentConfig& env) {
  KeyValues kv = env.to_key_values();
  const ThresholdActionSet actions = ThresholdActionSet::for_role(role);
  kv.set("clip.id", clip.id());
  kv.set("clip.hash", static_cast<unsigned long long>(clip_hash(clip)));
  kv.set("clip.length", static_cast<int>(clip.frames.size()));
  kv.set("role", std::string(to_string(role)));
  kv.set("actions", actions.candidates);
  if (role == AgentRole::positive) {
    kv.set("pin.negative", std::string("distance"));
  } else {
    kv.set("pin.t_p", kConservativePositiveThreshold);
  }
  return kv;
}

ExplorationTree build_tree(const Clip& clip, AgentRole role, const EnvironmentConfig& env) {
  env.validate();
  ExplorationTree tree;
  tree.clip_id = clip.id();
  tree.role = role;
  tree.actions = ThresholdActionSet::for_role(role);
  tree.depth = decision_depth(clip);
  tree.fingerprint = tree_fingerprint(clip, role, env);
  tree.nodes.resize(tree_node_count(tree.branching(), tree.depth));
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    tree.nodes[i].depth = tree.nodes[(i - 1) / tree.branching()].depth + 1;
  }

  const SegmentationState start = initial_state(env, clip.frames[0], clip.truths[0]);
  tree.nodes[0] = root_node(role, start, clip);
  expand(tree, 0, start, clip, env);
  return tree;
}

std::vector<TreeNode> live_rollout(const Clip& clip, AgentRole role, std::span<const int> path,
                                   const EnvironmentConfig& env) {
  const int depth = decision_depth(clip);
  if (static_cast<int>(path.size()) > depth) throw std::out_of_range("path longer than clip");
  const ThresholdActionSet actions = ThresholdActionSet::for_role(role);
  SegmentationState state = initial_state(env, clip.frames[0], clip.truths[0]);
  std::vector<TreeNode> nodes{root_node(role, state, clip)};
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k] < 0 || path[k] >= actions.size()) throw std::out_of_range("action out of range");
    auto [child, next] =
        step(nodes.back(), state, role, actions, path[k], clip, static_cast<int>(k), env);
    nodes.push_back(std::move(child));
    state = std::move(next);
  }
  return nodes;
}

// ---------------------------------------------------------------------------
// Persistence

void persist(const ExplorationTree& tree, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  KeyValues manifest;
  manifest.set("clip_id", tree.clip_id);
  manifest.set("role", std::string(to_string(tree.role)));
  manifest.set("actions", tree.actions.candidates);
  manifest.set("depth", tree.depth);
  manifest.set("nodes", static_cast<unsigned long long>(tree.nodes.size()));
  for (const auto& [k, v] : tree.fingerprint.entries()) manifest.set("fingerprint." + k, v);
  write_file(dir / "manifest.txt", manifest.format());

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    const std::filesystem::path nd = node_dir(dir, tree.path_of(i));
    std::filesystem::create_directories(nd);
    KeyValues meta;
    meta.set("depth", node.depth);
    meta.set("map_frame", node.map_frame ? std::to_string(*node.map_frame) : std::string("none"));
    meta.set("skipped", node.skipped ? 1 : 0);
    write_file(nd / "meta.txt", meta.format());
    write_file(nd / "iou.txt", format_exact(node.iou) + "\n");
    if (node.pmap) write_probability_map(nd / "pmap.pmp", *node.pmap);
    if (node.dmap) write_distance_map(nd / "dmap.dst", *node.dmap);
  }
}

ExplorationTree load_tree(const std::filesystem::path& dir) {
  const KeyValues manifest = KeyValues::load((dir / "manifest.txt").string());
  ExplorationTree tree;
  tree.clip_id = manifest.get("clip_id");
  tree.role = parse_role(manifest.get("role"));
  tree.actions = ThresholdActionSet::for_role(tree.role);
  if (actions_text(tree.actions) != manifest.get("actions")) {
    throw FormatError((dir / "manifest.txt").string() + ": action set does not match role");
  }
  tree.depth = static_cast<int>(manifest.get_int("depth"));
  const std::size_t expected = tree_node_count(tree.branching(), tree.depth);
  if (manifest.get_uint("nodes") != expected) {
    throw FormatError((dir / "manifest.txt").string() + ": node count does not match depth");
  }
  const std::string prefix = "fingerprint.";
  for (const auto& [k, v] : manifest.entries()) {
    if (k.starts_with(prefix)) tree.fingerprint.set(k.substr(prefix.size()), v);
  }

  tree.nodes.resize(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const std::filesystem::path nd = node_dir(dir, tree.path_of(i));
    if (!std::filesystem::is_directory(nd)) {
      throw FormatError("missing tree node directory: " + nd.string());
    }
    TreeNode& node = tree.nodes[i];
    const KeyValues meta = KeyValues::load((nd / "meta.txt").string());
    node.depth = static_cast<int>(meta.get_int("depth"));
    const int want_depth = i == 0 ? 0 : tree.nodes[(i - 1) / tree.branching()].depth + 1;
    if (node.depth != want_depth) throw FormatError(nd.string() + ": depth does not match path");
    if (meta.get("map_frame") != "none") node.map_frame = static_cast<int>(meta.get_int("map_frame"));
    node.skipped = meta.get_int("skipped") != 0;
    const std::string iou_text = read_file(nd / "iou.txt");
    try {
      node.iou = parse_double(iou_text.substr(0, iou_text.find('\n')));
    } catch (const std::exception&) {
      throw FormatError((nd / "iou.txt").string() + ": not a number");
    }
    if (!(node.iou >= 0.0 && node.iou <= 1.0)) {
      throw FormatError((nd / "iou.txt").string() + ": IOU outside [0,1]");
    }
    if (node.map_frame) {
      node.pmap = read_probability_map(nd / "pmap.pmp");
      if (tree.role == AgentRole::negative) node.dmap = read_distance_map(nd / "dmap.dst");
    }
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Transitions

namespace {

std::vector<Transition> transitions_from(std::span<const TreeNode> nodes, AgentRole role,
                                         std::span<const int> path, const Clip& clip,
                                         const DescriptorExtractor& extractor) {
  std::vector<Transition> out;
  out.reserve(path.size());
  auto state_of = [&](const TreeNode& node) {
    return build_state(role, extractor, clip.frames[*node.map_frame], *node.pmap);
  };
  std::optional<AgentState> current = state_of(nodes[0]);
  for (std::size_t k = 0; k < path.size(); ++k) {
    Transition t;
    t.state = std::move(*current);
    t.action = path[k];
    t.reward = reward(nodes[k + 1].iou);
    if (nodes[k + 1].pmap) t.next = state_of(nodes[k + 1]);
    current = t.next;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<Transition> replay_transitions(const ExplorationTree& tree, std::span<const int> path,
                                           const Clip& clip, const DescriptorExtractor& extractor) {
  if (static_cast<int>(path.size()) != tree.depth) {
    throw std::invalid_argument("replay_transitions: path must reach a leaf");
  }
  if (clip.id() != tree.clip_id) {
    throw std::invalid_argument("replay_transitions: clip " + clip.id() + " does not match tree " +
                                tree.clip_id);
  }
  std::vector<TreeNode> nodes;
  for (std::size_t k = 0; k <= path.size(); ++k) {
    nodes.push_back(tree.nodes[tree.find(path.first(k))]);
  }
  return transitions_from(nodes, tree.role, path, clip, extractor);
}

std::vector<Transition> live_transitions(const Clip& clip, AgentRole role,
                                         std::span<const int> path, const EnvironmentConfig& env,
                                         const DescriptorExtractor& extractor) {
  if (static_cast<int>(path.size()) != decision_depth(clip)) {
    throw std::invalid_argument("live_transitions: path must cover every decision");
  }
  const std::vector<TreeNode> nodes = live_rollout(clip, role, path, env);
  return transitions_from(nodes, role, path, clip, extractor);
}

bool verify_replay(const ExplorationTree& tree, const Clip& clip, const EnvironmentConfig& env,
                   int paths, std::uint64_t seed) {
  if (tree.fingerprint != tree_fingerprint(clip, tree.role, env)) return false;
  if (tree.depth != decision_depth(clip)) return false;
  if (tree.nodes.size() != tree_node_count(tree.branching(), tree.depth)) return false;
  Rng rng(seed);
  for (int p = 0; p < paths; ++p) {
    std::vector<int> path(static_cast<std::size_t>(tree.depth));
    for (int& a : path) a = static_cast<int>(rng.uniform_int(tree.branching()));
    const std::vector<TreeNode> live = live_rollout(clip, tree.role, path, env);
    for (std::size_t k = 0; k < live.size(); ++k) {
      if (!(tree.nodes[tree.find(std::span(path).first(k))] == live[k])) return false;
    }
  }
  return true;
}

}  // namespace roivos
