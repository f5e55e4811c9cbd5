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

#include "roivos/cli.hpp"

#include "roivos/grid_io.hpp"
#include "roivos/pipeline.hpp"
#include "roivos/rng.hpp"
#include "roivos/treecache.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace roivos {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

void DataConfig::validate() const {
  if (train_sequences < 1 || test_sequences < 1) {
    throw std::invalid_argument("data: sequence counts must be >= 1");
  }
  if (positive_clip_length < 2 || negative_clip_length < 2) {
    throw std::invalid_argument("data: clip lengths must be >= 2");
  }
  if (positive_clips < 1 || negative_clips < 1) {
    throw std::invalid_argument("data: clip counts must be >= 1");
  }
}

int DataConfig::clip_length(AgentRole role) const {
  return role == AgentRole::positive ? positive_clip_length : negative_clip_length;
}

int DataConfig::clip_count(AgentRole role) const {
  return role == AgentRole::positive ? positive_clips : negative_clips;
}

namespace {

constexpr const char* kSeqPrefix = "seq.";

const std::vector<std::string>& data_keys() {
  static const std::vector<std::string> keys = {
      "data.train_sequences",      "data.test_sequences",   "data.test_seed_offset",
      "data.positive_clip_length", "data.negative_clip_length", "data.positive_clips",
      "data.negative_clips"};
  return keys;
}

}  // namespace

void PipelineConfig::validate() const {
  seq.validate();
  env.validate();
  train.validate();
  data.validate();
}

std::vector<std::string> PipelineConfig::keys() {
  std::vector<std::string> out;
  for (const auto& k : SequenceConfig::keys()) out.push_back(kSeqPrefix + k);
  for (const auto& k : EnvironmentConfig::keys()) out.push_back(k);
  for (const auto& k : TrainConfig::keys()) out.push_back(k);
  for (const auto& k : data_keys()) out.push_back(k);
  return out;
}

KeyValues PipelineConfig::to_key_values() const {
  KeyValues kv;
  const KeyValues seq_kv = seq.to_key_values();
  const KeyValues env_kv = env.to_key_values();
  const KeyValues train_kv = train.to_key_values();
  for (const auto& [k, v] : seq_kv.entries()) kv.set(kSeqPrefix + k, v);
  for (const auto& [k, v] : env_kv.entries()) kv.set(k, v);
  for (const auto& [k, v] : train_kv.entries()) kv.set(k, v);
  kv.set("data.train_sequences", data.train_sequences);
  kv.set("data.test_sequences", data.test_sequences);
  kv.set("data.test_seed_offset", static_cast<unsigned long long>(data.test_seed_offset));
  kv.set("data.positive_clip_length", data.positive_clip_length);
  kv.set("data.negative_clip_length", data.negative_clip_length);
  kv.set("data.positive_clips", data.positive_clips);
  kv.set("data.negative_clips", data.negative_clips);
  return kv;
}

PipelineConfig PipelineConfig::from_key_values(const KeyValues& kv) {
  kv.require_known(keys());
  PipelineConfig c;
  KeyValues seq_kv;
  for (const auto& [k, v] : kv.entries()) {
    if (k.starts_with(kSeqPrefix)) seq_kv.set(k.substr(std::string_view(kSeqPrefix).size()), v);
  }
  c.seq = SequenceConfig::from_key_values(seq_kv);
  c.env = EnvironmentConfig::from_key_values(kv);
  c.train = TrainConfig::from_key_values(kv);
  DataConfig& d = c.data;
  d.train_sequences = static_cast<int>(kv.get_int("data.train_sequences", d.train_sequences));
  d.test_sequences = static_cast<int>(kv.get_int("data.test_sequences", d.test_sequences));
  if (kv.has("data.test_seed_offset")) d.test_seed_offset = kv.get_uint("data.test_seed_offset");
  d.positive_clip_length =
      static_cast<int>(kv.get_int("data.positive_clip_length", d.positive_clip_length));
  d.negative_clip_length =
      static_cast<int>(kv.get_int("data.negative_clip_length", d.negative_clip_length));
  d.positive_clips = static_cast<int>(kv.get_int("data.positive_clips", d.positive_clips));
  d.negative_clips = static_cast<int>(kv.get_int("data.negative_clips", d.negative_clips));
  c.validate();
  return c;
}

std::vector<SyntheticSequence> load_sequences(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.txt")) {
      dirs.push_back(entry.path());
    }
  }
  if (dirs.empty()) throw std::runtime_error("no sequence directories in " + dir.string());
  std::sort(dirs.begin(), dirs.end());
  std::vector<SyntheticSequence> out;
  for (const auto& d : dirs) out.push_back(load_sequence(d));
  return out;
}

std::vector<Clip> select_clips(std::span<const SyntheticSequence> sequences, AgentRole role,
                               const DataConfig& data, std::uint64_t seed) {
  const int len = data.clip_length(role);
  std::vector<Clip> all = extract_clips(sequences, len, len);
  const auto want = static_cast<std::size_t>(data.clip_count(role));
  if (all.size() <= want) return all;
  // Partial Fisher-Yates over indices, then restore extraction order.
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j = i + rng.uniform_int(order.size() - i);
    std::swap(order[i], order[j]);
  }
  order.resize(want);
  std::sort(order.begin(), order.end());
  std::vector<Clip> out;
  out.reserve(want);
  for (std::size_t i : order) out.push_back(std::move(all[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

// Seed streams, so that each stage draws independent randomness from --seed.
constexpr std::uint64_t kClipStream = 11;
constexpr std::uint64_t kTrainStream = 12;

std::uint64_t role_stream(AgentRole role) { return role == AgentRole::positive ? 0 : 1; }

struct Globals {
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string config;
};

PipelineConfig load_config(const Globals& g) {
  if (g.config.empty()) return PipelineConfig{};
  return PipelineConfig::from_key_values(KeyValues::load(g.config));
}

void gen_data(const Globals& g, std::ostream& out) {
  const PipelineConfig cfg = load_config(g);
  const fs::path root(g.out);
  fs::create_directories(root);
  write_file(root / "config.txt", cfg.to_key_values().format());
  auto emit = [&](const char* split, int count, std::uint64_t base) {
    for (int i = 0; i < count; ++i) {
      const SyntheticSequence seq = generate_sequence(cfg.seq, base + static_cast<std::uint64_t>(i));
      save_sequence(root / split / seq.name, seq);
    }
    out << "wrote " << count << " " << split << " sequences to " << (root / split).string() << "\n";
  };
  emit("train", cfg.data.train_sequences, g.seed);
  emit("test", cfg.data.test_sequences, g.seed + cfg.data.test_seed_offset);
}

void build_trees(const Globals& g, const std::string& data_dir, AgentRole role, int verify_paths,
                 std::ostream& out) {
  const PipelineConfig cfg = load_config(g);
  const std::vector<SyntheticSequence> seqs = load_sequences(data_dir);
  const std::vector<Clip> clips =
      select_clips(seqs, role, cfg.data, mix_seed(g.seed, kClipStream + role_stream(role)));
  const fs::path root(g.out);
  for (const Clip& clip : clips) {
    const ExplorationTree tree = build_tree(clip, role, cfg.env);
    if (verify_paths > 0 &&
        !verify_replay(tree, clip, cfg.env, verify_paths, mix_seed(g.seed, clip_hash(clip)))) {
      throw std::runtime_error("cache verification failed for clip " + clip.id());
    }
    persist(tree, root / clip.id() / "tree");
    save_clip(root / clip.id() / "clip", clip);
  }
  out << "built " << clips.size() << " " << to_string(role) << " trees in " << root.string()
      << "\n";
}

void train_role(const Globals& g, const std::string& cache_dir, AgentRole role,
                std::ostream& out) {
  const PipelineConfig cfg = load_config(g);
  if (!fs::is_directory(cache_dir)) throw std::runtime_error("not a directory: " + cache_dir);
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(cache_dir)) {
    if (fs::exists(entry.path() / "tree" / "manifest.txt")) dirs.push_back(entry.path());
  }
  if (dirs.empty()) throw std::runtime_error("no cached trees in " + cache_dir);
  std::sort(dirs.begin(), dirs.end());

  // Walkers keep only the precomputed states, so trees are dropped as soon
  // as they have been read.
  const PooledGridExtractor extractor(cfg.env.feature_grid);
  std::vector<std::unique_ptr<TreeWalker>> walkers;
  for (const auto& d : dirs) {
    const ExplorationTree tree = load_tree(d / "tree");
    if (tree.role != role) {
      throw std::runtime_error((d / "tree").string() + " holds a " +
                               std::string(to_string(tree.role)) + " tree");
    }
    walkers.push_back(std::make_unique<TreeWalker>(tree, load_clip(d / "clip"), extractor));
  }
  std::vector<EpisodeWalker*> episodes;
  for (auto& w : walkers) episodes.push_back(w.get());
  const TrainResult result =
      train_agent(episodes, cfg.train, mix_seed(g.seed, kTrainStream + role_stream(role)));

  const fs::path root(g.out);
  fs::create_directories(root);
  save_policy(root / "policy.txt", result.actor);
  save_value(root / "value.txt", result.critic);
  write_file(root / "reward_curve.csv", reward_curve_csv(result.reward_curve));
  out << "trained " << to_string(role) << " agent on " << walkers.size() << " clips, "
      << cfg.train.iterations << " iterations\n";
}

Actors load_actors(const std::string& positive, const std::string& negative) {
  Actors actors;
  if (!positive.empty()) actors.positive = load_policy(positive);
  if (!negative.empty()) actors.negative = load_policy(negative);
  return actors;
}

void eval_sequence(const Globals& g, const std::string& seq_dir, const std::string& mode_text,
                   const std::string& positive, const std::string& negative, std::ostream& out) {
  const PipelineConfig cfg = load_config(g);
  const AdaptationMode mode = parse_mode(mode_text);
  const Actors actors = load_actors(positive, negative);
  const SyntheticSequence seq = load_sequence(seq_dir);
  RunReport report = run_inference(seq, actors, mode, cfg.env);
  write_report(g.out, report);
  out << seq.name << " mode=" << to_string(mode) << " J_m=" << format_number(report.j_mean)
      << " F_m=" << format_number(report.f_mean) << "\n";
}

void sweep(const Globals& g, const std::string& data_dir, const std::string& positive,
           const std::string& negative, std::ostream& out) {
  const PipelineConfig cfg = load_config(g);
  const Actors actors = load_actors(positive, negative);
  const std::vector<SyntheticSequence> seqs = load_sequences(data_dir);
  const auto combos = table_combos();
  const std::vector<SweepRow> rows = baseline_sweep(seqs, combos, actors, cfg.env);
  const fs::path root(g.out);
  fs::create_directories(root);
  const std::string csv = sweep_csv(rows);
  write_file(root / "sweep.csv", csv);
  out << render_table(csv);
}

}  // namespace

int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold-selection agents for online adaptation of a segmenter", "roivos"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "key = value config file")->check(CLI::ExistingFile);

  std::string data_dir, cache_dir, seq_dir, role_text, mode_text = "full", positive, negative,
                                                       csv_path;
  int verify_paths = 0;

  auto* gen = app.add_subcommand("gen-data", "Generate training and test sequences");

  auto* build = app.add_subcommand("build-tree", "Build exploration-tree caches for one role");
  build->add_option("--data", data_dir, "Directory of training sequences")->required();
  build->add_option("--role", role_text, "positive or negative")->required();
  build->add_option("--verify", verify_paths, "Random paths re-run live per tree (0: off)");

  auto* train = app.add_subcommand("train", "Train one agent from its tree caches");
  train->add_option("--cache", cache_dir, "Directory written by build-tree")->required();
  train->add_option("--role", role_text, "positive or negative")->required();

  auto* eval = app.add_subcommand("eval", "Segment one sequence and write its report");
  eval->add_option("--sequence", seq_dir, "Sequence directory")->required();
  eval->add_option("--mode", mode_text, "none, foreground, background or full")
      ->capture_default_str();
  eval->add_option("--positive", positive, "Positive-agent policy snapshot");
  eval->add_option("--negative", negative, "Negative-agent policy snapshot");

  auto* sweep_cmd = app.add_subcommand("sweep", "Fixed-threshold sweep plus the agent row");
  sweep_cmd->add_option("--data", data_dir, "Directory of test sequences")->required();
  sweep_cmd->add_option("--positive", positive, "Positive-agent policy snapshot");
  sweep_cmd->add_option("--negative", negative, "Negative-agent policy snapshot");

  auto* report = app.add_subcommand("report", "Print a CSV as an aligned table");
  report->add_option("csv", csv_path, "CSV file")->required();

  std::vector<std::string> argv_store{"roivos"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      gen_data(g, out);
    } else if (build->parsed()) {
      build_trees(g, data_dir, parse_role(role_text), verify_paths, out);
    } else if (train->parsed()) {
      train_role(g, cache_dir, parse_role(role_text), out);
    } else if (eval->parsed()) {
      eval_sequence(g, seq_dir, mode_text, positive, negative, out);
    } else if (sweep_cmd->parsed()) {
      sweep(g, data_dir, positive, negative, out);
    } else if (report->parsed()) {
      out << render_table(read_file(csv_path));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace roivos
