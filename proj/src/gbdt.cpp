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

#include "argforge/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace argforge::gbdt {

namespace {

constexpr int kMaxHalvings = 60;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct Entry {
  std::uint32_t feature;
  double value;
  std::uint32_t row;
};

// Builds one regression tree over the current gradients.
class TreeBuilder {
 public:
  TreeBuilder(std::span<const Example> examples, const std::vector<double>& grad,
              const std::vector<double>& hess, const TrainConfig& config)
      : examples_(examples), grad_(grad), hess_(hess), config_(config) {}

  DecisionTree build(std::vector<std::uint32_t> rows,
                     std::vector<std::uint32_t>& leaf_of_row) {
    nodes_.clear();
    leaf_of_row_ = &leaf_of_row;
    grow(std::move(rows), 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  int grow(std::vector<std::uint32_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double g_sum = 0.0, h_sum = 0.0, g_sq = 0.0;
    for (auto r : rows) {
      g_sum += grad_[r];
      h_sum += hess_[r];
      g_sq += grad_[r] * grad_[r];
    }

    Split split;
    if (depth < config_.max_depth &&
        rows.size() >= 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
      split = find_split(rows, g_sum, g_sq);
    }
    if (split.feature < 0) {
      nodes_[id].value = g_sum / (h_sum + config_.l2_leaf_reg);
      for (auto r : rows) (*leaf_of_row_)[r] = static_cast<std::uint32_t>(id);
      return id;
    }

    std::vector<std::uint32_t> left, right;
    for (auto r : rows) {
      const double v = examples_[r].x.count(static_cast<std::size_t>(split.feature));
      (v < split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  Split find_split(const std::vector<std::uint32_t>& rows, double g_sum,
                   double g_sq) const {
    std::vector<Entry> entries;
    for (auto r : rows) {
      for (const auto& [f, c] : examples_[r].x.entries()) {
        entries.push_back({f, static_cast<double>(c), r});
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.feature, a.value, a.row) < std::tie(b.feature, b.value, b.row);
    });

    const double n = static_cast<double>(rows.size());
    const double parent = g_sum * g_sum / n;
    const double tol = 1e-12 * (1.0 + g_sq);
    const auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);

    // Near-equal gains keep the earlier (feature, threshold).
    Split best;
    std::size_t i = 0;
    while (i < entries.size()) {
      const std::uint32_t feature = entries[i].feature;
      std::size_t end = i;
      double nz_sum = 0.0;
      while (end < entries.size() && entries[end].feature == feature) {
        nz_sum += grad_[entries[end].row];
        ++end;
      }
      const std::size_t nz_count = end - i;

      // Rows without an entry have count 0, the smallest value.
      std::size_t left_n = rows.size() - nz_count;
      double left_sum = g_sum - nz_sum;
      double prev = 0.0;
      std::size_t j = i;
      while (j < end) {
        const double v = entries[j].value;
        if (left_n > 0) {
          const std::size_t right_n = rows.size() - left_n;
          if (left_n >= min_leaf && right_n >= min_leaf) {
            const double right_sum = g_sum - left_sum;
            const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                                right_sum * right_sum / static_cast<double>(right_n) -
                                parent;
            if (gain > best.gain + tol) {
              best.feature = static_cast<int>(feature);
              best.threshold = 0.5 * (prev + v);
              best.gain = gain;
            }
          }
        }
        while (j < end && entries[j].value == v) {
          left_sum += grad_[entries[j].row];
          ++left_n;
          ++j;
        }
        prev = v;
      }
      i = end;
    }
    return best;
  }

  std::span<const Example> examples_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const TrainConfig& config_;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t>* leaf_of_row_ = nullptr;
};

double mean_loss(const std::vector<double>& scores, std::span<const Example> examples) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    total += logistic_loss(scores[i], examples[i].label);
  }
  return total / static_cast<double>(scores.size());
}

}  // namespace

double sigmoid(double score) {
  if (score >= 0) return 1.0 / (1.0 + std::exp(-score));
  const double e = std::exp(score);
  return e / (1.0 + e);
}

double logistic_loss(double score, int label) {
  return std::max(score, 0.0) - label * score + std::log1p(std::exp(-std::abs(score)));
}

// ---------------------------------------------------------------------------

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("decision tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    const auto size = static_cast<int>(nodes_.size());
    const auto self = static_cast<int>(i);
    if (n.left <= self || n.right <= self || n.left >= size || n.right >= size) {
      throw ValidationError("decision tree node " + std::to_string(i) +
                            " has invalid children");
    }
  }
}

double DecisionTree::evaluate(const features::FeatureVector& x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    const double v = x.count(static_cast<std::size_t>(n.feature));
    i = static_cast<std::size_t>(v < n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (n_trees < 1) throw ValidationError("n_trees must be >= 1");
  if (max_depth < 1) throw ValidationError("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("learning_rate must be in (0, 1]");
  }
  if (min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
  if (!(l2_leaf_reg > 0.0)) throw ValidationError("l2_leaf_reg must be positive");
}

json TrainConfig::to_json() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth},
          {"learning_rate", learning_rate},
          {"min_samples_leaf", min_samples_leaf},
          {"l2_leaf_reg", l2_leaf_reg},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  c.n_trees = j.at("n_trees").get<int>();
  c.max_depth = j.at("max_depth").get<int>();
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
  c.l2_leaf_reg = j.value("l2_leaf_reg", c.l2_leaf_reg);
  c.seed = j.value("seed", c.seed);
  return c;
}

// ---------------------------------------------------------------------------

TreeEnsemble::TreeEnsemble(double base_score, double learning_rate,
                           std::string schema_id, std::vector<DecisionTree> trees,
                           int max_depth)
    : base_score_(base_score),
      learning_rate_(learning_rate),
      schema_id_(std::move(schema_id)),
      trees_(std::move(trees)),
      max_depth_(max_depth) {}

double TreeEnsemble::raw_score(const features::FeatureVector& x) const {
  if (!schema_id_.empty() && x.schema_id() != schema_id_) {
    throw ValidationError("feature vector schema " + x.schema_id() +
                          " does not match model schema " + schema_id_);
  }
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.evaluate(x);
  return base_score_ + learning_rate_ * sum;
}

double TreeEnsemble::predict_proba(const features::FeatureVector& x) const {
  const double p = sigmoid(raw_score(x));
  return std::clamp(p, std::numeric_limits<double>::min(),
                    std::nextafter(1.0, 0.0));
}

std::string TreeEnsemble::serialize() const {
  json trees = json::array();
  for (const auto& t : trees_) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"value", n.value}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  json j = {{"format_version", kFormatVersion},
            {"base_score", base_score_},
            {"learning_rate", learning_rate_},
            {"schema_id", schema_id_},
            {"n_trees", trees_.size()},
            {"max_depth", max_depth_},
            {"trees", std::move(trees)}};
  return j.dump() + "\n";
}

TreeEnsemble TreeEnsemble::deserialize(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("corrupted model file: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw ValidationError("unsupported model format_version " +
                            std::to_string(version));
    }
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        if (jn.contains("value")) {
          n.value = jn.at("value").get<double>();
        } else {
          n.feature = jn.at("feature").get<int>();
          if (n.feature < 0) throw ValidationError("negative feature index");
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
        }
        nodes.push_back(n);
      }
      trees.emplace_back(std::move(nodes));
    }
    if (j.contains("n_trees") && j.at("n_trees").get<std::size_t>() != trees.size()) {
      throw ValidationError("model declares " + j.at("n_trees").dump() +
                            " trees but contains " + std::to_string(trees.size()));
    }
    return TreeEnsemble(j.at("base_score").get<double>(),
                        j.at("learning_rate").get<double>(),
                        j.at("schema_id").get<std::string>(), std::move(trees),
                        j.value("max_depth", 0));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("corrupted model file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

TrainResult train_gbdt_traced(std::span<const Example> examples,
                              const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw ValidationError("no training examples");
  const std::string& schema_id = examples.front().x.schema_id();
  std::size_t positives = 0;
  for (const auto& e : examples) {
    if (e.x.schema_id() != schema_id) {
      throw ValidationError("training examples mix feature schemas");
    }
    if (e.label != 0 && e.label != 1) throw ValidationError("labels must be 0 or 1");
    positives += static_cast<std::size_t>(e.label);
  }
  if (positives == 0 || positives == examples.size()) {
    throw ValidationError("training data must contain both classes");
  }

  const std::size_t n = examples.size();
  const double prior = static_cast<double>(positives) / static_cast<double>(n);
  const double base_score = std::log(prior / (1.0 - prior));

  std::vector<double> scores(n, base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<std::uint32_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> leaf_of_row(n, 0);

  TrainResult result;
  result.loss_history.push_back(mean_loss(scores, examples));
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(config.n_trees));
  TreeBuilder builder(examples, grad, hess, config);
  std::vector<double> trial(n);

  for (int round = 0; round < config.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(scores[i]);
      grad[i] = examples[i].label - p;
      hess[i] = p * (1.0 - p);
    }
    DecisionTree tree = builder.build(all_rows, leaf_of_row);
    const double previous = result.loss_history.back();
    double loss = previous;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      const auto& nodes = tree.nodes();
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = scores[i] + config.learning_rate * nodes[leaf_of_row[i]].value;
      }
      loss = mean_loss(trial, examples);
      if (loss <= previous) break;
      if (attempt == kMaxHalvings) {
        for (auto& node : tree.mutable_nodes()) node.value = 0.0;
        trial = scores;
        loss = previous;
        break;
      }
      for (auto& node : tree.mutable_nodes()) node.value *= 0.5;
    }
    scores.swap(trial);
    result.loss_history.push_back(loss);
    trees.push_back(std::move(tree));
  }

  result.model = TreeEnsemble(base_score, config.learning_rate, schema_id,
                              std::move(trees), config.max_depth);
  return result;
}

}  // namespace argforge::gbdt
