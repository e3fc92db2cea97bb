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

#include "argforge/evaluation.hpp"

#include <cmath>
#include <future>
#include <map>
#include <string>

#include "argforge/rng.hpp"

namespace argforge::evaluation {

namespace {

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

std::vector<gbdt::Example> gather(std::span<const gbdt::Example> examples,
                                  const std::vector<std::size_t>& indices) {
  std::vector<gbdt::Example> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(examples[i]);
  return out;
}

Metrics fit_and_score(std::span<const gbdt::Example> train,
                      std::span<const gbdt::Example> test,
                      const gbdt::TrainConfig& config) {
  const auto model = gbdt::train_gbdt(train, config);
  std::vector<int> predictions, golds;
  predictions.reserve(test.size());
  golds.reserve(test.size());
  for (const auto& e : test) {
    predictions.push_back(model.predict(e.x) ? 1 : 0);
    golds.push_back(e.label);
  }
  return compute_metrics(predictions, golds);
}

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(k)) {
      throw ValidationError("class " + std::to_string(label) + " has " +
                            std::to_string(members.size()) +
                            " examples, fewer than k=" + std::to_string(k));
    }
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), -1);
  Rng rng(seed);
  int next = 0;
  for (auto& [label, members] : by_class) {
    rng.shuffle(members);
    for (auto i : members) {
      plan.assignments[i] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> golds) {
  if (predictions.size() != golds.size()) {
    throw ValidationError("predictions and golds differ in length (" +
                          std::to_string(predictions.size()) + " vs " +
                          std::to_string(golds.size()) + ")");
  }
  if (golds.empty()) throw ValidationError("no predictions to evaluate");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool gold = golds[i] == 1;
    if (pred && gold) ++tp;
    else if (pred && !gold) ++fp;
    else if (!pred && gold) ++fn;
    else ++tn;
  }
  Metrics m;
  m.premise = class_metrics(tp, fp, fn);
  m.non_premise = class_metrics(tn, fn, fp);
  m.macro_precision = 0.5 * (m.premise.precision + m.non_premise.precision);
  m.macro_recall = 0.5 * (m.premise.recall + m.non_premise.recall);
  m.macro_f1 = 0.5 * (m.premise.f1 + m.non_premise.f1);
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(golds.size());
  return m;
}

json Metrics::to_json() const {
  return {{"macro_f1", macro_f1},
          {"macro_precision", macro_precision},
          {"macro_recall", macro_recall},
          {"accuracy", accuracy},
          {"premise", class_json(premise)},
          {"non_premise", class_json(non_premise)}};
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

GridResult nested_grid_search(std::span<const gbdt::Example> train,
                              std::span<const gbdt::TrainConfig> grid, int inner_k,
                              std::uint64_t seed) {
  if (grid.empty()) throw ValidationError("hyperparameter grid is empty");
  GridResult result;
  if (grid.size() == 1) {
    result.best = grid.front();
    return result;
  }
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& e : train) labels.push_back(e.label);
  const FoldPlan plan = stratified_kfold(labels, inner_k, seed);

  std::vector<std::vector<gbdt::Example>> inner_train, inner_test;
  for (int f = 0; f < inner_k; ++f) {
    inner_train.push_back(gather(train, plan.train_indices(f)));
    inner_test.push_back(gather(train, plan.test_indices(f)));
  }
  double best = -1.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> f1;
    for (int f = 0; f < inner_k; ++f) {
      f1.push_back(fit_and_score(inner_train[static_cast<std::size_t>(f)],
                                 inner_test[static_cast<std::size_t>(f)], grid[g])
                       .macro_f1);
    }
    const double mean = mean_std(f1).mean;
    result.mean_f1.push_back(mean);
    if (mean > best) {
      best = mean;
      result.best = grid[g];
      result.best_index = g;
    }
  }
  return result;
}

MetricReport cross_validate(std::span<const gbdt::Example> examples,
                            std::span<const gbdt::TrainConfig> grid, int outer_k,
                            int inner_k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);
  const FoldPlan plan = stratified_kfold(labels, outer_k, seed);

  std::vector<std::future<FoldResult>> pending;
  for (int f = 0; f < outer_k; ++f) {
    pending.push_back(std::async(std::launch::async, [&, f] {
      const auto train = gather(examples, plan.train_indices(f));
      const auto test = gather(examples, plan.test_indices(f));
      const auto search = nested_grid_search(
          train, grid, inner_k, derive_seed(seed, "inner-" + std::to_string(f)));
      FoldResult r;
      r.fold = f;
      r.chosen = search.best;
      r.metrics = fit_and_score(train, test, search.best);
      r.train_size = train.size();
      r.test_size = test.size();
      return r;
    }));
  }

  MetricReport report;
  report.outer_k = outer_k;
  report.inner_k = inner_k;
  report.seed = seed;
  for (auto& p : pending) report.folds.push_back(p.get());

  std::vector<double> f1, prec, rec, acc;
  for (const auto& r : report.folds) {
    f1.push_back(r.metrics.macro_f1);
    prec.push_back(r.metrics.macro_precision);
    rec.push_back(r.metrics.macro_recall);
    acc.push_back(r.metrics.accuracy);
  }
  report.macro_f1 = mean_std(f1);
  report.macro_precision = mean_std(prec);
  report.macro_recall = mean_std(rec);
  report.accuracy = mean_std(acc);
  return report;
}

json MetricReport::to_json() const {
  json folds_json = json::array();
  for (const auto& r : folds) {
    folds_json.push_back({{"fold", r.fold},
                          {"train_size", r.train_size},
                          {"test_size", r.test_size},
                          {"chosen", r.chosen.to_json()},
                          {"metrics", r.metrics.to_json()}});
  }
  return {{"outer_k", outer_k},
          {"inner_k", inner_k},
          {"seed", seed},
          {"folds", std::move(folds_json)},
          {"summary",
           {{"macro_f1", mean_std_json(macro_f1)},
            {"macro_precision", mean_std_json(macro_precision)},
            {"macro_recall", mean_std_json(macro_recall)},
            {"accuracy", mean_std_json(accuracy)}}}};
}

std::vector<gbdt::TrainConfig> make_grid(std::span<const int> n_trees,
                                         std::span<const int> max_depths,
                                         const gbdt::TrainConfig& base) {
  std::vector<gbdt::TrainConfig> grid;
  for (int t : n_trees) {
    for (int d : max_depths) {
      gbdt::TrainConfig c = base;
      c.n_trees = t;
      c.max_depth = d;
      grid.push_back(c);
    }
  }
  return grid;
}

}  // namespace argforge::evaluation
