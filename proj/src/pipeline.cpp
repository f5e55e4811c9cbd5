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

#include "roivos/pipeline.hpp"

#include "roivos/grid_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace roivos {

std::string_view to_string(AdaptationMode mode) {
  switch (mode) {
    case AdaptationMode::none: return "none";
    case AdaptationMode::foreground_only: return "foreground";
    case AdaptationMode::background_only: return "background";
    case AdaptationMode::full: return "full";
  }
  return "?";
}

AdaptationMode parse_mode(std::string_view text) {
  if (text == "none") return AdaptationMode::none;
  if (text == "foreground" || text == "foreground-only") return AdaptationMode::foreground_only;
  if (text == "background" || text == "background-only") return AdaptationMode::background_only;
  if (text == "full") return AdaptationMode::full;
  throw std::invalid_argument("unknown adaptation mode '" + std::string(text) + "'");
}

RunReport run_sequence(const SyntheticSequence& seq, const ThresholdPolicy& policy,
                       const EnvironmentConfig& env) {
  if (seq.length() < 2) throw std::invalid_argument("run_sequence: need at least two frames");
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.sequence = seq.name;
  const double tol = default_contour_tolerance(seq.frames[0].height(), seq.frames[0].width());

  SegmentationState state = initial_state(env, seq.frames[0], seq.truths[0]);
  std::vector<double> ious;
  std::vector<double> fs;
  for (int t = 1; t < seq.length(); ++t) {
    const Frame& frame = seq.frames[t];
    const ProbabilityMap temp = temporary_map(state, frame);
    const ThresholdChoice choice = policy(frame, temp);
    StepResult step = apply_choice(state, frame, temp, choice, env);

    FrameRecord rec;
    rec.frame = t + 1;
    rec.choice = choice;
    rec.adapted = step.adapted;
    rec.skipped = step.skipped;
    rec.iou = iou(step.output, seq.truths[t]);
    rec.f = contour_accuracy(step.output, seq.truths[t], tol);
    ious.push_back(rec.iou);
    fs.push_back(rec.f);
    report.adaptations += step.adapted ? 1 : 0;
    report.skips += step.skipped ? 1 : 0;
    report.frames.push_back(rec);
    report.masks.push_back(step.output);
    state = std::move(step.next);
  }
  report.j_mean = mean_over_frames(ious);
  report.f_mean = mean_over_frames(fs);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

RunReport run_inference(const SyntheticSequence& seq, const Actors& actors, AdaptationMode mode,
                        const EnvironmentConfig& env) {
  const bool use_positive =
      mode == AdaptationMode::foreground_only || mode == AdaptationMode::full;
  const bool use_negative =
      mode == AdaptationMode::background_only || mode == AdaptationMode::full;
  if (use_positive && !actors.positive) {
    throw std::invalid_argument("mode " + std::string(to_string(mode)) +
                                " needs a positive (foreground) policy");
  }
  if (use_negative && !actors.negative) {
    throw std::invalid_argument("mode " + std::string(to_string(mode)) +
                                " needs a negative (background) policy");
  }
  const PooledGridExtractor extractor(env.feature_grid);
  const ThresholdActionSet pos_actions = ThresholdActionSet::positive();
  const ThresholdActionSet neg_actions = ThresholdActionSet::negative();

  ThresholdPolicy policy = [&](const Frame& frame, const ProbabilityMap& temp) {
    ThresholdChoice choice;
    if (mode == AdaptationMode::none) {
      choice.adapt = false;
      return choice;
    }
    if (use_positive) {
      const AgentState s = build_state_p(extractor, frame, temp);
      choice.t_p = pos_actions[greedy_action(actors.positive->probabilities(s.values))];
    }
    if (use_negative) {
      const AgentState s = build_state_n(extractor, frame, temp);
      choice.t_n = neg_actions[greedy_action(actors.negative->probabilities(s.values))];
    }
    return choice;
  };
  return run_sequence(seq, policy, env);
}

RunReport run_fixed(const SyntheticSequence& seq, std::optional<double> t_n, double t_p,
                    const EnvironmentConfig& env) {
  const ThresholdChoice fixed{true, t_p, t_n};
  return run_sequence(seq, [&](const Frame&, const ProbabilityMap&) { return fixed; }, env);
}

std::pair<double, double> suite_means(std::span<const RunReport> reports) {
  if (reports.empty()) throw std::invalid_argument("suite_means: no reports");
  double j = 0.0;
  double f = 0.0;
  for (const auto& r : reports) {
    j += r.j_mean;
    f += r.f_mean;
  }
  return {j / static_cast<double>(reports.size()), f / static_cast<double>(reports.size())};
}

std::vector<std::pair<double, double>> table_combos() {
  std::vector<std::pair<double, double>> combos;
  for (double t_n : ThresholdActionSet::negative().candidates) {
    for (double t_p : ThresholdActionSet::positive().candidates) combos.emplace_back(t_n, t_p);
  }
  return combos;
}

std::vector<SweepRow> baseline_sweep(std::span<const SyntheticSequence> sequences,
                                     std::span<const std::pair<double, double>> combos,
                                     const Actors& actors, const EnvironmentConfig& env) {
  if (sequences.empty()) throw std::invalid_argument("baseline_sweep: no sequences");
  std::vector<SweepRow> rows;
  for (const auto& [t_n, t_p] : combos) {
    std::vector<RunReport> reports;
    for (const auto& seq : sequences) reports.push_back(run_fixed(seq, t_n, t_p, env));
    const auto [j, f] = suite_means(reports);
    rows.push_back({format_number(t_n), format_number(t_p), j, f});
  }
  if (actors.positive && actors.negative) {
    std::vector<RunReport> reports;
    for (const auto& seq : sequences) {
      reports.push_back(run_inference(seq, actors, AdaptationMode::full, env));
    }
    const auto [j, f] = suite_means(reports);
    rows.push_back({"RL", "RL", j, f});
  }
  return rows;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string report_csv(const RunReport& report) {
  std::string out = "frame,iou,f,t_p,t_n,skipped\n";
  for (const auto& rec : report.frames) {
    out += std::to_string(rec.frame) + "," + format_number(rec.iou) + "," + format_number(rec.f) +
           ",";
    if (rec.choice.adapt) {
      out += format_number(rec.choice.t_p) + ",";
      out += rec.choice.t_n ? format_number(*rec.choice.t_n) : std::string("dist");
    } else {
      out += "none,none";
    }
    out += std::string(",") + (rec.skipped ? "1" : "0") + "\n";
  }
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "t_n,t_p,J_m,F_m\n";
  for (const auto& row : rows) {
    out += row.t_n + "," + row.t_p + "," + format_number(row.j_mean) + "," +
           format_number(row.f_mean) + "\n";
  }
  return out;
}

void write_report(const std::filesystem::path& dir, const RunReport& report) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.csv", report_csv(report));
  for (std::size_t i = 0; i < report.masks.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mask_%04d.msk", report.frames[i].frame);
    write_mask(dir / name, report.masks[i]);
  }
}

std::string render_table(std::string_view csv) {
  std::vector<std::vector<std::string>> cells;
  std::istringstream in{std::string(csv)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(field);
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> widths;
  for (const auto& row : cells) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      if (i) out += "  ";
      out += std::string(widths[i] - cells[r][i].size(), ' ') + cells[r][i];
    }
    out += '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) total += widths[i] + (i ? 2 : 0);
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

}  // namespace roivos
