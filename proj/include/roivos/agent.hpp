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

// Actor-critic building blocks: a one-hidden-layer tanh network used both
// as the policy (softmax head) and the value function (linear scalar head),
// with hand-derived gradients, plus the reward and TD-error definitions.

#pragma once

#include "roivos/grid_io.hpp"
#include "roivos/rng.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace roivos {

/// inputs -> tanh(hidden) -> linear outputs. Also used as the gradient type,
/// since a gradient has exactly the parameter shapes.
template <typename Scalar>
struct Mlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix w1;  // hidden x inputs
  Vector b1;
  Matrix w2;  // outputs x hidden
  Vector b2;

  Mlp() = default;
  Mlp(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index outputs)
      : w1(Matrix::Zero(hidden, inputs)),
        b1(Vector::Zero(hidden)),
        w2(Matrix::Zero(outputs, hidden)),
        b2(Vector::Zero(outputs)) {}

  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static Mlp random(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index outputs, Rng& rng) {
    Mlp net(inputs, hidden, outputs);
    const auto fill = [&rng](auto& m, double bound) {
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
      }
    };
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(inputs));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    fill(net.w1, bound1);
    fill(net.b1, bound1);
    fill(net.w2, bound2);
    fill(net.b2, bound2);
    return net;
  }

  [[nodiscard]] Eigen::Index inputs() const { return w1.cols(); }
  [[nodiscard]] Eigen::Index hidden() const { return w1.rows(); }
  [[nodiscard]] Eigen::Index outputs() const { return w2.rows(); }

  struct Activations {
    Vector hidden;
    Vector output;
  };

  [[nodiscard]] Activations forward(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != inputs()) {
      throw std::invalid_argument("Mlp::forward: expected " + std::to_string(inputs()) +
                                  " inputs, got " + std::to_string(x.size()));
    }
    Activations a;
    a.hidden = (w1 * x + b1).array().tanh().matrix();
    a.output = w2 * a.hidden + b2;
    return a;
  }

  /// Parameter gradient of <d_output, output(x)>.
  [[nodiscard]] Mlp backward(const Eigen::Ref<const Vector>& x, const Activations& a,
                             const Vector& d_output) const {
    Mlp g;
    g.w2 = d_output * a.hidden.transpose();
    g.b2 = d_output;
    const Vector d_pre =
        ((w2.transpose() * d_output).array() * (Scalar(1) - a.hidden.array().square())).matrix();
    g.w1 = d_pre * x.transpose();
    g.b1 = d_pre;
    return g;
  }

  /// this += alpha * backward(x, forward(x), d_output), without
  /// materialising the gradient.
  void ascend(const Eigen::Ref<const Vector>& x, const Activations& a, const Vector& d_output,
              Scalar alpha) {
    const Vector d_pre =
        ((w2.transpose() * d_output).array() * (Scalar(1) - a.hidden.array().square())).matrix();
    w2.noalias() += (alpha * d_output) * a.hidden.transpose();
    b2 += alpha * d_output;
    w1.noalias() += (alpha * d_pre) * x.transpose();
    b1 += alpha * d_pre;
  }

  /// this += alpha * other
  void axpy(Scalar alpha, const Mlp& other) {
    w1 += alpha * other.w1;
    b1 += alpha * other.b1;
    w2 += alpha * other.w2;
    b2 += alpha * other.b2;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.w1.rows() == b.w1.rows() && a.w1.cols() == b.w1.cols() &&
           a.w2.rows() == b.w2.rows() && a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 &&
           a.b2 == b.b2;
  }
};

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& logits) {
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e =
      (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

/// pi(a | s): softmax over the network outputs.
template <typename Scalar>
struct PolicyNet {
  using Vector = typename Mlp<Scalar>::Vector;
  Mlp<Scalar> net;

  static PolicyNet random(Eigen::Index state_len, Eigen::Index actions, Rng& rng,
                          Eigen::Index hidden = 64) {
    return {Mlp<Scalar>::random(state_len, hidden, actions, rng)};
  }

  [[nodiscard]] Eigen::Index actions() const { return net.outputs(); }

  [[nodiscard]] Vector probabilities(const Eigen::Ref<const Vector>& state) const {
    return softmax<Scalar>(net.forward(state).output);
  }

  /// Gradient of log pi(action | state) w.r.t. all parameters. The logit
  /// cotangent is onehot(action) - pi.
  [[nodiscard]] Mlp<Scalar> log_prob_gradient(const Eigen::Ref<const Vector>& state,
                                              int action) const {
    const auto a = net.forward(state);
    Vector d = -softmax<Scalar>(a.output);
    d(action) += Scalar(1);
    return net.backward(state, a, d);
  }

  [[nodiscard]] Scalar log_prob(const Eigen::Ref<const Vector>& state, int action) const {
    return std::log(probabilities(state)(action));
  }

  friend bool operator==(const PolicyNet&, const PolicyNet&) = default;
};

/// V(s): scalar linear head.
template <typename Scalar>
struct ValueNet {
  using Vector = typename Mlp<Scalar>::Vector;
  Mlp<Scalar> net;

  static ValueNet random(Eigen::Index state_len, Rng& rng, Eigen::Index hidden = 64) {
    return {Mlp<Scalar>::random(state_len, hidden, 1, rng)};
  }

  [[nodiscard]] Scalar value(const Eigen::Ref<const Vector>& state) const {
    return net.forward(state).output(0);
  }

  [[nodiscard]] Mlp<Scalar> value_gradient(const Eigen::Ref<const Vector>& state) const {
    const auto a = net.forward(state);
    return net.backward(state, a, Vector::Ones(1));
  }

  friend bool operator==(const ValueNet&, const ValueNet&) = default;
};

using PolicyNetd = PolicyNet<double>;
using ValueNetd = ValueNet<double>;

// ---------------------------------------------------------------------------
// Operations

/// IOU + 1 when IOU > 0.1, otherwise -1.
double reward(double iou);

/// delta = r + gamma * V(s') - V(s); a terminal next state contributes 0.
double td_error(double reward, std::optional<double> next_value, double current_value,
                double discount);

template <typename Scalar>
typename PolicyNet<Scalar>::Vector policy_forward(const PolicyNet<Scalar>& policy,
                                                  const typename PolicyNet<Scalar>::Vector& s) {
  return policy.probabilities(s);
}

/// Categorical draw from one uniform variate.
int sample_action(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng);

/// argmax; lowest index wins ties.
int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& probs);

/// w <- w + rate * delta * grad V(s)
template <typename Scalar>
ValueNet<Scalar> critic_update(ValueNet<Scalar> critic,
                               const typename ValueNet<Scalar>::Vector& state, Scalar delta,
                               Scalar rate) {
  if (delta == Scalar(0)) return critic;
  const auto a = critic.net.forward(state);
  critic.net.ascend(state, a, ValueNet<Scalar>::Vector::Ones(1), rate * delta);
  return critic;
}

/// theta <- theta + rate * advantage * grad log pi(action | s)
template <typename Scalar>
PolicyNet<Scalar> actor_update(PolicyNet<Scalar> actor,
                               const typename PolicyNet<Scalar>::Vector& state, int action,
                               Scalar advantage, Scalar rate) {
  if (action < 0 || action >= actor.actions()) {
    throw std::out_of_range("actor_update: action index out of range");
  }
  if (advantage == Scalar(0)) return actor;
  const auto a = actor.net.forward(state);
  typename PolicyNet<Scalar>::Vector d = -softmax<Scalar>(a.output);
  d(action) += Scalar(1);
  actor.net.ascend(state, a, d, rate * advantage);
  return actor;
}

// ---------------------------------------------------------------------------
// Snapshots: "layers <in> <hidden> <out>" followed by one line per matrix row
// (w1 rows, b1, w2 rows, b2), 17 significant digits.

std::string encode_mlp(const Mlp<double>& net);
Mlp<double> decode_mlp(const std::string& text);

void save_policy(const std::filesystem::path& path, const PolicyNetd& policy);
void save_value(const std::filesystem::path& path, const ValueNetd& value);
PolicyNetd load_policy(const std::filesystem::path& path);
ValueNetd load_value(const std::filesystem::path& path);

}  // namespace roivos
