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

#ifndef ARGFORGE_EVALUATION_HPP_
#define ARGFORGE_EVALUATION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "argforge/gbdt.hpp"
#include "argforge/io.hpp"

namespace argforge::evaluation {

// assignments[i] is the fold of the i-th example.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignments;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

// Shuffles each class by `seed` and deals it round-robin into k folds. Each
// class continues dealing at the fold after the previous class stopped.
FoldPlan stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  ClassMetrics premise;
  ClassMetrics non_premise;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;

  json to_json() const;
};

// Labels are 1 = premise, 0 = non-premise. A class with a zero denominator
// gets 0 for the affected metric.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> golds);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation
};

MeanStd mean_std(std::span<const double> values);

struct GridResult {
  gbdt::TrainConfig best;
  std::size_t best_index = 0;
  std::vector<double> mean_f1;  // per grid entry; empty for a singleton grid
};

// Picks the config with the highest mean inner-CV macro F1; the earliest
// grid entry wins ties.
GridResult nested_grid_search(std::span<const gbdt::Example> train,
                              std::span<const gbdt::TrainConfig> grid, int inner_k,
                              std::uint64_t seed);

struct FoldResult {
  int fold = 0;
  gbdt::TrainConfig chosen;
  Metrics metrics;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct MetricReport {
  int outer_k = 0;
  int inner_k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  MeanStd macro_f1, macro_precision, macro_recall, accuracy;

  json to_json() const;
};

// Outer stratified CV; each outer training fold runs nested_grid_search.
// Outer folds run concurrently and are collected by fold index.
MetricReport cross_validate(std::span<const gbdt::Example> examples,
                            std::span<const gbdt::TrainConfig> grid, int outer_k,
                            int inner_k, std::uint64_t seed);

// Cartesian product of tree counts and depths, trees varying slowest.
std::vector<gbdt::TrainConfig> make_grid(std::span<const int> n_trees,
                                         std::span<const int> max_depths,
                                         const gbdt::TrainConfig& base);

}  // namespace argforge::evaluation

#endif  // ARGFORGE_EVALUATION_HPP_
