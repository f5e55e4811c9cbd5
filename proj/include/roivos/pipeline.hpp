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

#pragma once

#include "roivos/agent.hpp"
#include "roivos/environment.hpp"
#include "roivos/features.hpp"
#include "roivos/synthseq.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace roivos {

enum class AdaptationMode { none, foreground_only, background_only, full };

std::string_view to_string(AdaptationMode mode);
AdaptationMode parse_mode(std::string_view text);

/// Trained (or otherwise supplied) policies. A mode only requires the
/// policies of the roles it lets act.
struct Actors {
  std::optional<PolicyNetd> positive;
  std::optional<PolicyNetd> negative;
};

struct FrameRecord {
  int frame = 0;  // 1-based index within the sequence
  double iou = 0.0;
  double f = 0.0;
  ThresholdChoice choice;
  bool adapted = false;
  bool skipped = false;
};

struct RunReport {
  std::string sequence;
  std::vector<FrameRecord> frames;  // frames 2..L
  std::vector<BinaryMask> masks;    // O_t for frames 2..L
  double j_mean = 0.0;
  double f_mean = 0.0;
  int adaptations = 0;
  int skips = 0;
  double wall_seconds = 0.0;
};

/// Picks the thresholds for one frame given the frame and its temporary map.
using ThresholdPolicy = std::function<ThresholdChoice(const Frame&, const ProbabilityMap&)>;

/// Online segmentation of frames 2..L, fitted on the first annotated frame.
RunReport run_sequence(const SyntheticSequence& seq, const ThresholdPolicy& policy,
                       const EnvironmentConfig& env);

/// Greedy agent decisions; roles disabled by `mode` use the baseline rules
/// (t_p = 0.97, distance-only negatives).
RunReport run_inference(const SyntheticSequence& seq, const Actors& actors, AdaptationMode mode,
                        const EnvironmentConfig& env);

/// Fixed thresholds on every frame. A missing t_n gives distance-only
/// negatives.
RunReport run_fixed(const SyntheticSequence& seq, std::optional<double> t_n, double t_p,
                    const EnvironmentConfig& env);

/// Mean of per-sequence J_m / F_m.
std::pair<double, double> suite_means(std::span<const RunReport> reports);

struct SweepRow {
  std::string t_n;
  std::string t_p;
  double j_mean = 0.0;
  double f_mean = 0.0;
};

/// All 8 combinations of {0.4, 0.2, 0.1, 0.01} x {0.97, 0.7}.
std::vector<std::pair<double, double>> table_combos();

/// One row per fixed (t_n, t_p) combo, plus an "RL" row (full mode) when
/// both actors are supplied.
std::vector<SweepRow> baseline_sweep(std::span<const SyntheticSequence> sequences,
                                     std::span<const std::pair<double, double>> combos,
                                     const Actors& actors, const EnvironmentConfig& env);

/// CSV with 6 significant digits.
std::string format_number(double value);
std::string report_csv(const RunReport& report);
std::string sweep_csv(std::span<const SweepRow> rows);

/// Writes report.csv and mask_%04d.msk (1-based frame numbers) into dir.
void write_report(const std::filesystem::path& dir, const RunReport& report);

/// Renders a CSV as an aligned plain-text table.
std::string render_table(std::string_view csv);

}  // namespace roivos
