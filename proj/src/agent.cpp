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

#include "roivos/agent.hpp"

#include "roivos/key_values.hpp"

namespace roivos {

double reward(double iou) {
  if (!(iou >= 0.0 && iou <= 1.0)) throw std::invalid_argument("reward: IOU outside [0,1]");
  return iou > 0.1 ? iou + 1.0 : -1.0;
}

double td_error(double reward, std::optional<double> next_value, double current_value,
                double discount) {
  return reward + discount * next_value.value_or(0.0) - current_value;
}

int sample_action(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (Eigen::Index a = 0; a < probs.size(); ++a) {
    cumulative += probs(a);
    if (u < cumulative) return static_cast<int>(a);
  }
  // Rounding left u above the final partial sum: take the last action with
  // nonzero mass.
  for (Eigen::Index a = probs.size() - 1; a >= 0; --a) {
    if (probs(a) > 0.0) return static_cast<int>(a);
  }
  throw std::invalid_argument("sample_action: probabilities are all zero");
}

int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& probs) {
  if (probs.size() == 0) throw std::invalid_argument("greedy_action: empty distribution");
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < probs.size(); ++a) {
    if (probs(a) > probs(best)) best = a;
  }
  return static_cast<int>(best);
}

namespace {

void append_rows(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += format_exact(m(r, c));
    }
    out += '\n';
  }
}

Eigen::MatrixXd read_rows(std::istringstream& in, Eigen::Index rows, Eigen::Index cols,
                          const char* what) {
  Eigen::MatrixXd m(rows, cols);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw std::runtime_error(std::string("network snapshot truncated in ") + what);
    }
    std::istringstream row(line);
    std::string token;
    Eigen::Index c = 0;
    while (row >> token) {
      if (c >= cols) throw std::runtime_error(std::string("too many values in ") + what);
      m(r, c++) = parse_double(token);
    }
    if (c != cols) throw std::runtime_error(std::string("too few values in ") + what);
  }
  return m;
}

}  // namespace

std::string encode_mlp(const Mlp<double>& net) {
  std::string out = "layers " + std::to_string(net.inputs()) + " " +
                    std::to_string(net.hidden()) + " " + std::to_string(net.outputs()) + "\n";
  append_rows(out, net.w1);
  append_rows(out, net.b1.transpose());
  append_rows(out, net.w2);
  append_rows(out, net.b2.transpose());
  return out;
}

Mlp<double> decode_mlp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream head(line);
  std::string tag;
  long long inputs = 0, hidden = 0, outputs = 0;
  if (!(head >> tag >> inputs >> hidden >> outputs) || tag != "layers" || inputs < 1 ||
      hidden < 1 || outputs < 1) {
    throw std::runtime_error("network snapshot: bad header line");
  }
  Mlp<double> net;
  net.w1 = read_rows(in, hidden, inputs, "w1");
  net.b1 = read_rows(in, 1, hidden, "b1").transpose();
  net.w2 = read_rows(in, outputs, hidden, "w2");
  net.b2 = read_rows(in, 1, outputs, "b2").transpose();
  return net;
}

void save_policy(const std::filesystem::path& path, const PolicyNetd& policy) {
  write_file(path, encode_mlp(policy.net));
}

void save_value(const std::filesystem::path& path, const ValueNetd& value) {
  write_file(path, encode_mlp(value.net));
}

PolicyNetd load_policy(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return {decode_mlp(text)};
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

ValueNetd load_value(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    ValueNetd v{decode_mlp(text)};
    if (v.net.outputs() != 1) throw std::runtime_error("value network must have one output");
    return v;
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace roivos
