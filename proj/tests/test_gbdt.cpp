// Copyright 2026 The Argforge Authors.
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <optional>

#include "argforge/gbdt.hpp"
#include "argforge/rng.hpp"
#include "gbdt_fixtures.hpp"
#include "oracles.hpp"

using namespace argforge;
using namespace argforge::gbdt;
using features::FeatureVector;
using oracles::StumpChoice;
using oracles::stump_oracle;
using testfix::make_example;

namespace {

std::vector<Example> to_examples(const std::vector<std::vector<int>>& rows,
                                 const std::vector<int>& labels) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> dense(rows[i].begin(), rows[i].end());
    out.push_back(make_example(dense, labels[i]));
  }
  return out;
}

// Trains one depth-1 round and compares the root split to the oracle.
void check_stump(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels,
                 int n_features) {
  const auto examples = to_examples(rows, labels);
  const int positives = std::accumulate(labels.begin(), labels.end(), 0);
  TrainConfig config;
  config.n_trees = 1;
  config.max_depth = 1;
  config.learning_rate = 1.0;
  if (positives == 0 || positives == static_cast<int>(labels.size())) {
    CHECK_THROWS_AS(train_gbdt(examples, config), ValidationError);
    return;
  }
  const auto model = train_gbdt(examples, config);
  const auto& root = model.trees().at(0).nodes().at(0);
  const auto expected = stump_oracle(rows, labels, n_features);
  if (!expected) {
    CHECK(root.is_leaf());
    return;
  }
  REQUIRE_FALSE(root.is_leaf());
  CHECK(StumpChoice{root.feature, root.threshold} == *expected);
}

}  // namespace

TEST_CASE("sigmoid and loss") {
  CHECK(sigmoid(-2.0) == doctest::Approx(0.11920292202211755).epsilon(1e-15));
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(1000.0) == 1.0);
  CHECK(sigmoid(-1000.0) >= 0.0);
  CHECK(logistic_loss(0.0, 1) == doctest::Approx(std::log(2.0)));
  CHECK(std::isfinite(logistic_loss(-1000.0, 1)));
  CHECK(logistic_loss(-1000.0, 1) == doctest::Approx(1000.0));
}

TEST_CASE("predict_proba on hand-built ensembles") {
  const FeatureVector x("s", {});
  CHECK(TreeEnsemble(-2.0, 1.0, "s", {}, 0).predict_proba(x) ==
        doctest::Approx(0.1192).epsilon(1e-4));
  CHECK(TreeEnsemble(0.0, 1.0, "s", {}, 0).predict_proba(x) == 0.5);
  for (double score : {1e3, -1e3}) {
    const double p = TreeEnsemble(score, 1.0, "s", {}, 0).predict_proba(x);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  CHECK_THROWS_AS(TreeEnsemble(0.0, 1.0, "other", {}, 0).predict_proba(x), ValidationError);
}

TEST_CASE("stump oracle, exhaustive small instances") {
  // Every ordered dataset of up to 4 rows over 3 binary features.
  for (std::size_t n = 1; n <= 4; ++n) {
    const std::size_t combos = std::size_t{1} << (4 * n);
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<std::vector<int>> rows(n, std::vector<int>(3));
      std::vector<int> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto bits = (code >> (4 * i)) & 0xF;
        for (int f = 0; f < 3; ++f) rows[i][static_cast<std::size_t>(f)] = (bits >> f) & 1;
        labels[i] = static_cast<int>((bits >> 3) & 1);
      }
      check_stump(rows, labels, 3);
    }
  }
}

TEST_CASE("stump oracle, random instances up to 20 rows") {
  Rng rng(2026);
  for (int trial = 0; trial < 20000; ++trial) {
    const auto n = 2 + rng.below(19);
    const int n_features = 1 + static_cast<int>(rng.below(3));
    const bool counts = trial % 4 == 0;
    std::vector<std::vector<int>> rows(n, std::vector<int>(static_cast<std::size_t>(n_features)));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : rows[i]) v = static_cast<int>(rng.below(counts ? 4 : 2));
      labels[i] = static_cast<int>(rng.below(2));
    }
    check_stump(rows, labels, n_features);
  }
}

TEST_CASE("training loss is non-increasing") {
  const auto data = testfix::synthetic_dataset(500, 20, 42);
  TrainConfig config;
  config.n_trees = 200;
  config.max_depth = 3;
  config.learning_rate = 0.3;
  const auto result = train_gbdt_traced(data, config);
  REQUIRE(result.loss_history.size() == 201);
  for (std::size_t i = 1; i < result.loss_history.size(); ++i) {
    CHECK(result.loss_history[i] <= result.loss_history[i - 1] + 1e-9);
  }
  CHECK(result.loss_history.back() < 0.5 * result.loss_history.front());
}

TEST_CASE("loss stays monotone with an aggressive learning rate") {
  const auto data = testfix::synthetic_dataset(300, 10, 9);
  TrainConfig config;
  config.n_trees = 100;
  config.max_depth = 6;
  config.learning_rate = 1.0;
  config.l2_leaf_reg = 1e-6;
  const auto result = train_gbdt_traced(data, config);
  for (std::size_t i = 1; i < result.loss_history.size(); ++i) {
    CHECK(result.loss_history[i] <= result.loss_history[i - 1] + 1e-9);
  }
}

TEST_CASE("separable 1D data reaches full training accuracy at depth 2") {
  std::vector<Example> data;
  for (int v = 0; v < 40; ++v) data.push_back(make_example({static_cast<double>(v)}, v >= 23));
  TrainConfig config;
  config.n_trees = 50;
  config.max_depth = 2;
  config.learning_rate = 0.5;
  const auto model = train_gbdt(data, config);
  for (const auto& e : data) CHECK(model.predict(e.x) == (e.label == 1));
  for (const auto& t : model.trees()) CHECK(t.depth() <= 2);
}

TEST_CASE("base score is the class prior log-odds") {
  std::vector<Example> data;
  for (int i = 0; i < 10; ++i) data.push_back(make_example({0.0}, i < 5));
  TrainConfig config;
  config.n_trees = 1;
  const auto model = train_gbdt(data, config);
  CHECK(model.base_score() == doctest::Approx(0.0));
  CHECK(model.predict_proba(data[0].x) == doctest::Approx(0.5));
}

TEST_CASE("Newton leaf values") {
  // One feature splits 3 positives from 1 negative.
  std::vector<Example> data = {make_example({1.0}, 1), make_example({1.0}, 1),
                               make_example({1.0}, 1), make_example({0.0}, 0)};
  TrainConfig config;
  config.n_trees = 1;
  config.max_depth = 1;
  config.learning_rate = 1.0;
  config.l2_leaf_reg = 1.0;
  const auto model = train_gbdt(data, config);
  const auto& nodes = model.trees()[0].nodes();
  REQUIRE(nodes.size() == 3);
  const double p = 0.75;
  const double right = 3 * (1 - p) / (3 * p * (1 - p) + 1.0);
  const double left = (0 - p) / (p * (1 - p) + 1.0);
  CHECK(nodes[static_cast<std::size_t>(nodes[0].left)].value == doctest::Approx(left));
  CHECK(nodes[static_cast<std::size_t>(nodes[0].right)].value == doctest::Approx(right));
}

TEST_CASE("depth bound and large ensembles") {
  const auto data = testfix::synthetic_dataset(200, 8, 3);
  TrainConfig config;
  config.n_trees = 500;
  config.max_depth = 2;
  const auto model = train_gbdt(data, config);
  CHECK(model.trees().size() == 500);
  for (const auto& t : model.trees()) CHECK(t.depth() <= 2);
}

TEST_CASE("serialize round trip") {
  const auto data = testfix::synthetic_dataset(120, 6, 5);
  TrainConfig config;
  config.n_trees = 30;
  config.max_depth = 3;
  const auto model = train_gbdt(data, config);
  const auto bytes = model.serialize();
  const auto back = TreeEnsemble::deserialize(bytes);
  CHECK(back.serialize() == bytes);
  for (const auto& e : data) CHECK(back.predict_proba(e.x) == model.predict_proba(e.x));

  CHECK_THROWS_AS(TreeEnsemble::deserialize(bytes.substr(0, bytes.size() / 2)),
                  ValidationError);
  auto j = json::parse(bytes);
  j["format_version"] = 99;
  CHECK_THROWS_AS(TreeEnsemble::deserialize(j.dump()), ValidationError);
  j = json::parse(bytes);
  j["n_trees"] = 31;
  CHECK_THROWS_AS(TreeEnsemble::deserialize(j.dump()), ValidationError);
  j = json::parse(bytes);
  j["trees"][0]["nodes"][0]["left"] = 0;
  if (j["trees"][0]["nodes"][0].contains("feature")) {
    CHECK_THROWS_AS(TreeEnsemble::deserialize(j.dump()), ValidationError);
  }
}

TEST_CASE("training errors") {
  const auto data = testfix::synthetic_dataset(50, 4, 1);
  TrainConfig config;
  config.n_trees = 0;
  CHECK_THROWS_AS(train_gbdt(data, config), ValidationError);
  config = {};
  config.max_depth = 0;
  CHECK_THROWS_AS(train_gbdt(data, config), ValidationError);
  config = {};
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(train_gbdt(data, config), ValidationError);

  std::vector<Example> one_class;
  for (int i = 0; i < 5; ++i) one_class.push_back(make_example({1.0 * i}, 1));
  CHECK_THROWS_AS(train_gbdt(one_class, TrainConfig{}), ValidationError);
  CHECK_THROWS_AS(train_gbdt(std::vector<Example>{}, TrainConfig{}), ValidationError);

  auto mixed = data;
  mixed[0].x = FeatureVector("other-schema", {});
  CHECK_THROWS_AS(train_gbdt(mixed, TrainConfig{}), ValidationError);
}

TEST_CASE("training is deterministic") {
  const auto data = testfix::synthetic_dataset(200, 10, 77);
  TrainConfig config;
  config.n_trees = 40;
  config.max_depth = 4;
  CHECK(train_gbdt(data, config).serialize() == train_gbdt(data, config).serialize());
}
