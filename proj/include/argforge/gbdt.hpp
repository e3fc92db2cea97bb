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

#ifndef ARGFORGE_GBDT_HPP_
#define ARGFORGE_GBDT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/features.hpp"
#include "argforge/io.hpp"

// Gradient-boosted binary classification trees with logistic loss.
namespace argforge::gbdt {

inline constexpr int kFormatVersion = 1;

struct TreeNode {
  // Internal nodes have feature >= 0; rows with count < threshold go left.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() : nodes_{TreeNode{}} {}
  explicit DecisionTree(std::vector<TreeNode> nodes);

  double evaluate(const features::FeatureVector& x) const;
  int depth() const;

  // Root is nodes()[0].
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

struct TrainConfig {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 1;
  double l2_leaf_reg = 1.0;
  std::uint64_t seed = 0;

  // Throws ValidationError unless every field is in range.
  void validate() const;
  json to_json() const;
  static TrainConfig from_json(const json& j);
  bool operator==(const TrainConfig&) const = default;
};

class TreeEnsemble {
 public:
  TreeEnsemble() = default;
  TreeEnsemble(double base_score, double learning_rate, std::string schema_id,
               std::vector<DecisionTree> trees, int max_depth);

  // base_score + learning_rate * sum of tree outputs.
  double raw_score(const features::FeatureVector& x) const;
  // Strictly inside (0, 1); saturated scores are clamped one ulp off the ends.
  double predict_proba(const features::FeatureVector& x) const;
  bool predict(const features::FeatureVector& x) const {
    return predict_proba(x) >= 0.5;
  }

  double base_score() const { return base_score_; }
  double learning_rate() const { return learning_rate_; }
  const std::string& schema_id() const { return schema_id_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  int max_depth() const { return max_depth_; }

  std::string serialize() const;
  static TreeEnsemble deserialize(std::string_view bytes);

 private:
  double base_score_ = 0.0;
  double learning_rate_ = 1.0;
  std::string schema_id_;
  std::vector<DecisionTree> trees_;
  int max_depth_ = 0;
};

struct Example {
  features::FeatureVector x;
  int label = 0;  // 1 = premise
};

struct TrainResult {
  TreeEnsemble model;
  // Mean training logistic loss after the base score (index 0) and after
  // each round.
  std::vector<double> loss_history;
};

// Exact greedy variance-reduction splits on the negative gradients, Newton
// leaf values sum(r) / (sum(p(1-p)) + l2). Equal gains resolve to the lowest
// feature index, then the lowest threshold. A round whose tree would raise
// the training loss has its leaf values halved until it no longer does.
TrainResult train_gbdt_traced(std::span<const Example> examples,
                              const TrainConfig& config);

inline TreeEnsemble train_gbdt(std::span<const Example> examples,
                               const TrainConfig& config) {
  return train_gbdt_traced(examples, config).model;
}

double sigmoid(double score);
double logistic_loss(double score, int label);

}  // namespace argforge::gbdt

#endif  // ARGFORGE_GBDT_HPP_
