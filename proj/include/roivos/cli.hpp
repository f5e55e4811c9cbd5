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

// Command-line front end and the file-level pipeline it drives:
//
//   gen-data    sequences        -> OUT/train/<seq>/, OUT/test/<seq>/
//   build-tree  train sequences  -> OUT/<clip>/{tree,clip}/
//   train       tree caches      -> OUT/{policy,value}.txt, OUT/reward_curve.csv
//   eval        one sequence     -> OUT/report.csv, OUT/mask_%04d.msk
//   sweep       test sequences   -> OUT/sweep.csv
//   report      any CSV          -> aligned table on stdout
//
// Every output is a pure function of the config file and --seed.

#pragma once

#include "roivos/environment.hpp"
#include "roivos/key_values.hpp"
#include "roivos/synthseq.hpp"
#include "roivos/training.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roivos {

struct DataConfig {
  int train_sequences = 40;
  int test_sequences = 10;
  std::uint64_t test_seed_offset = 10000;  // test sequence i uses seed + offset + i
  int positive_clip_length = 10;
  int negative_clip_length = 5;
  int positive_clips = 50;
  int negative_clips = 100;

  void validate() const;
  [[nodiscard]] int clip_length(AgentRole role) const;
  [[nodiscard]] int clip_count(AgentRole role) const;
};

/// The single config file shared by all subcommands. Keys are prefixed
/// "seq.", "env.", "train." or "data."; unknown keys are rejected.
struct PipelineConfig {
  SequenceConfig seq;
  EnvironmentConfig env;
  TrainConfig train;
  DataConfig data;

  void validate() const;
  [[nodiscard]] KeyValues to_key_values() const;
  static PipelineConfig from_key_values(const KeyValues& kv);
  static std::vector<std::string> keys();
};

/// Sequence directories (those holding a manifest.txt) under `dir`, sorted
/// by directory name.
std::vector<SyntheticSequence> load_sequences(const std::filesystem::path& dir);

/// Non-overlapping clips of the role's length, `count` of them drawn without
/// replacement (all when fewer exist), in extraction order.
std::vector<Clip> select_clips(std::span<const SyntheticSequence> sequences, AgentRole role,
                               const DataConfig& data, std::uint64_t seed);

/// Runs the command line. `args` excludes the program name. Returns the
/// process exit status; failures print one "error: ..." line to `err`.
int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace roivos
