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
#include "roivos/agent.hpp"
#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <vector>

using namespace roivos;
using namespace roivos::testing;

namespace {

// Visits every parameter of a network in a fixed order.
void for_each_param(Mlp<double>& net, const std::function<void(double&)>& fn) {
  for (auto* m : {&net.w1, &net.w2}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) fn(m->data()[i]);
  }
  for (auto* v : {&net.b1, &net.b2}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) fn(v->data()[i]);
  }
}

std::vector<double> flatten(Mlp<double> net) {
  std::vector<double> out;
  for_each_param(net, [&](double& p) { out.push_back(p); });
  return out;
}

// Central differences of f with respect to every parameter of `net`.
std::vector<double> numeric_gradient(Mlp<double> net, const std::function<double(const Mlp<double>&)>& f,
                                     double step) {
  std::vector<double> out;
  for_each_param(net, [&](double& p) {
    const double saved = p;
    p = saved + step;
    const double up = f(net);
    p = saved - step;
    const double down = f(net);
    p = saved;
    out.push_back((up - down) / (2.0 * step));
  });
  return out;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
  return Eigen::VectorXd::NullaryExpr(n, [&] { return rng.uniform(-1.0, 1.0); });
}

}  // namespace

TEST_SUITE("agent") {

TEST_CASE("reward table") {
  CHECK(reward(0.8) == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(reward(0.1) == -1.0);
  CHECK(reward(1.0) == 2.0);
  const double inputs[] = {0.0, 0.05, 0.1, 0.1 + 1e-9, 0.5, 1.0};
  const double expected[] = {-1.0, -1.0, -1.0, 1.1 + 1e-9, 1.5, 2.0};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(reward(inputs[i]) - expected[i]) <= 1e-12);
}

TEST_CASE("softmax sums to one and ignores a constant shift") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd logits = random_vector(rng, 2 + trial % 5) * 30.0;
    const Eigen::VectorXd p = softmax<double>(logits);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
    CHECK((p.array() > 0.0).all());
    const Eigen::VectorXd shifted =
        softmax<double>((logits.array() + rng.uniform(-50.0, 50.0)).matrix());
    CHECK((shifted - p).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(softmax<double>(Eigen::Vector2d(3.0, 3.0)).isApprox(Eigen::Vector2d(0.5, 0.5)));
  const PolicyNetd zero{Mlp<double>(5, 4, 3)};
  CHECK((zero.probabilities(Eigen::VectorXd::Ones(5)).array() == 1.0 / 3.0).all());
}

TEST_CASE("policy probabilities match an independent scalar forward pass") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const PolicyNetd pi = PolicyNetd::random(7, 3, rng, 5);
    const Eigen::VectorXd s = random_vector(rng, 7);
    std::vector<double> logits(3);
    for (int o = 0; o < 3; ++o) {
      double z = pi.net.b2(o);
      for (int j = 0; j < 5; ++j) {
        double pre = pi.net.b1(j);
        for (int i = 0; i < 7; ++i) pre += pi.net.w1(j, i) * s(i);
        z += pi.net.w2(o, j) * std::tanh(pre);
      }
      logits[o] = z;
    }
    double norm = 0.0;
    for (double z : logits) norm += std::exp(z);
    const Eigen::VectorXd p = policy_forward(pi, s);
    for (int o = 0; o < 3; ++o) CHECK(std::abs(p(o) - std::exp(logits[o]) / norm) <= 1e-12);
  }
}

TEST_CASE("analytic gradients agree with central finite differences") {
  Rng rng(3);
  const double step = 1e-5;
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index inputs = 3 + static_cast<Eigen::Index>(rng.uniform_int(8));
    const Eigen::Index hidden = 2 + static_cast<Eigen::Index>(rng.uniform_int(8));
    const int actions = 2 + static_cast<int>(rng.uniform_int(3));
    const Eigen::VectorXd s = random_vector(rng, inputs);

    const PolicyNetd pi = PolicyNetd::random(inputs, actions, rng, hidden);
    const int a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(actions)));
    const auto numeric_pi = numeric_gradient(
        pi.net, [&](const Mlp<double>& n) { return PolicyNetd{n}.log_prob(s, a); }, step);
    CHECK(relative_error(flatten(pi.log_prob_gradient(s, a)), numeric_pi) < 1e-4);

    const ValueNetd v = ValueNetd::random(inputs, rng, hidden);
    const auto numeric_v =
        numeric_gradient(v.net, [&](const Mlp<double>& n) { return ValueNetd{n}.value(s); }, step);
    CHECK(relative_error(flatten(v.value_gradient(s)), numeric_v) < 1e-4);
  }
}

TEST_CASE("td error examples") {
  CHECK(td_error(1.5, 2.0, 1.0, 0.9) == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(td_error(-1.0, std::nullopt, 0.0, 0.9) == -1.0);
  CHECK(td_error(0.7, 5.0, 0.2, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("critic update") {
  Rng rng(4);
  const ValueNetd v = ValueNetd::random(6, rng, 4);
  const Eigen::VectorXd s = random_vector(rng, 6);
  CHECK(critic_update(v, s, 0.0, 0.1) == v);
  // The output bias has unit gradient, so it moves by exactly rate * delta.
  const ValueNetd moved = critic_update(v, s, 2.0, 0.1);
  CHECK(moved.net.b2(0) == doctest::Approx(v.net.b2(0) + 0.2).epsilon(1e-14));

  for (int trial = 0; trial < 20; ++trial) {
    const ValueNetd net = ValueNetd::random(6, rng, 4);
    const Eigen::VectorXd x = random_vector(rng, 6);
    const double delta = rng.uniform(-2.0, 2.0);
    const double before = net.value(x);
    const double after = critic_update(net, x, delta, 1e-3).value(x);
    CHECK((after - before) * delta > 0.0);
  }
}

TEST_CASE("actor update") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const PolicyNetd pi = PolicyNetd::random(6, 4, rng, 5);
    const Eigen::VectorXd s = random_vector(rng, 6);
    const int a = static_cast<int>(rng.uniform_int(4));
    CHECK(actor_update(pi, s, a, 0.0, 0.1) == pi);
    const double before = pi.probabilities(s)(a);
    CHECK(actor_update(pi, s, a, 1.0, 1e-3).probabilities(s)(a) > before);
    CHECK(actor_update(pi, s, a, -1.0, 1e-3).probabilities(s)(a) < before);
  }
  const PolicyNetd pi = PolicyNetd::random(3, 2, rng, 2);
  CHECK_THROWS(actor_update(pi, Eigen::VectorXd::Ones(3), 2, 1.0, 0.1));
}

TEST_CASE("updates match a step along the analytic gradient") {
  Rng rng(6);
  const PolicyNetd pi = PolicyNetd::random(5, 3, rng, 4);
  const ValueNetd v = ValueNetd::random(5, rng, 4);
  const Eigen::VectorXd s = random_vector(rng, 5);
  Mlp<double> expected_pi = pi.net;
  expected_pi.axpy(0.01 * 0.7, pi.log_prob_gradient(s, 1));
  CHECK(relative_error(flatten(actor_update(pi, s, 1, 0.7, 0.01).net), flatten(expected_pi)) <
        1e-14);
  Mlp<double> expected_v = v.net;
  expected_v.axpy(0.05 * -0.3, v.value_gradient(s));
  CHECK(relative_error(flatten(critic_update(v, s, -0.3, 0.05).net), flatten(expected_v)) < 1e-14);
}

TEST_CASE("sampling frequencies lie within three standard deviations") {
  Rng rng(7);
  const Eigen::Vector3d probs(0.2, 0.5, 0.3);
  const int n = 100000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) ++counts[sample_action(probs, rng)];
  for (int a = 0; a < 3; ++a) {
    const double sigma = std::sqrt(n * probs(a) * (1.0 - probs(a)));
    CHECK(std::abs(counts[a] - n * probs(a)) <= 3.0 * sigma);
  }
  for (int i = 0; i < 1000; ++i) CHECK(sample_action(Eigen::Vector2d(1.0, 0.0), rng) == 0);
}

TEST_CASE("greedy action takes the lowest index on ties") {
  CHECK(greedy_action(Eigen::Vector2d(0.3, 0.7)) == 1);
  CHECK(greedy_action(Eigen::Vector3d(0.4, 0.4, 0.2)) == 0);
  CHECK(greedy_action(Eigen::Vector4d(0.1, 0.3, 0.3, 0.3)) == 1);
}

TEST_CASE("network snapshots round-trip exactly") {
  Rng rng(8);
  const PolicyNetd pi = PolicyNetd::random(9, 4, rng, 6);
  const ValueNetd v = ValueNetd::random(9, rng, 6);
  CHECK(decode_mlp(encode_mlp(pi.net)) == pi.net);
  const auto dir = std::filesystem::temp_directory_path() / "roivos_agent_io";
  std::filesystem::create_directories(dir);
  save_policy(dir / "policy.txt", pi);
  save_value(dir / "value.txt", v);
  CHECK(load_policy(dir / "policy.txt") == pi);
  CHECK(load_value(dir / "value.txt") == v);
  CHECK_THROWS(decode_mlp("layers 2 2\n"));
  CHECK_THROWS(load_policy(dir / "missing.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("forward rejects a wrong input length") {
  Rng rng(9);
  const PolicyNetd pi = PolicyNetd::random(4, 2, rng, 3);
  CHECK_THROWS_AS(pi.probabilities(Eigen::VectorXd::Ones(5)), std::invalid_argument);
}

}  // TEST_SUITE
