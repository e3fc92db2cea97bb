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

#include "argforge/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "argforge/rng.hpp"

namespace argforge::annotation {

json annotator_view(const AnnotationTask& task) {
  return {{"task_id", task.task_id},
          {"claim", task.claim_text},
          {"sentence", task.sentence_text}};
}

json key_record(const AnnotationTask& task) {
  return {{"task_id", task.task_id}, {"model_id", task.model_id}};
}

std::vector<AnnotationTask> load_tasks(const std::filesystem::path& path) {
  std::vector<AnnotationTask> tasks;
  std::unordered_set<std::string> ids;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    AnnotationTask t;
    try {
      t.task_id = j.at("task_id").get<std::string>();
      t.claim_text = j.at("claim").get<std::string>();
      t.sentence_text = j.at("sentence").get<std::string>();
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) +
                            ": bad task record: " + e.what());
    }
    if (!ids.insert(t.task_id).second) {
      throw ValidationError(path.string() + ":" + std::to_string(line) +
                            ": duplicate task id '" + t.task_id + "'");
    }
    t.display_order = tasks.size();
    tasks.push_back(std::move(t));
  });
  return tasks;
}

std::map<std::string, std::string> load_task_key(const std::filesystem::path& path) {
  std::map<std::string, std::string> key;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      key[j.at("task_id").get<std::string>()] = j.at("model_id").get<std::string>();
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) +
                            ": bad key record: " + e.what());
    }
  });
  return key;
}

std::vector<AnnotationTask> build_blind_tasks(
    std::span<const lm::GeneratedCandidate> candidates,
    const std::map<std::string, std::string>& claims, std::uint64_t seed) {
  std::set<std::string> models;
  std::set<std::tuple<std::string, std::string, std::uint64_t>> seen;
  for (const auto& c : candidates) {
    if (c.model_id.empty()) throw ValidationError("candidate without a model id");
    if (!claims.contains(c.prompt_id)) {
      throw ValidationError("candidate refers to unknown prompt '" + c.prompt_id + "'");
    }
    if (!seen.emplace(c.model_id, c.prompt_id, c.seed_used).second) {
      throw ValidationError("duplicate task for model '" + c.model_id + "', prompt '" +
                            c.prompt_id + "', seed " + std::to_string(c.seed_used));
    }
    models.insert(c.model_id);
  }
  if (models.size() < 2) {
    throw ValidationError("blind evaluation needs candidates from at least two models");
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t width = std::max<std::size_t>(4, std::to_string(order.size()).size());
  std::vector<AnnotationTask> tasks;
  tasks.reserve(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& c = candidates[order[pos]];
    std::string number = std::to_string(pos + 1);
    number.insert(0, width - number.size(), '0');
    tasks.push_back({"T" + number, claims.at(c.prompt_id), c.text, c.model_id, pos});
  }
  return tasks;
}

// ---------------------------------------------------------------------------

std::string format_label_tsv(const AnnotatorLabel& l) {
  return l.task_id + '\t' + l.annotator_id + '\t' + std::string(corpus::label_name(l.label)) +
         '\t' + l.timestamp + '\n';
}

std::vector<AnnotatorLabel> parse_labels_tsv(std::string_view text) {
  std::vector<AnnotatorLabel> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i].front() == '#') continue;
    const auto cols = split(lines[i], '\t');
    if (cols.size() < 3 || cols.size() > 4) {
      throw ValidationError("labels line " + std::to_string(i + 1) +
                            ": expected task_id<TAB>annotator_id<TAB>label<TAB>timestamp");
    }
    AnnotatorLabel l;
    l.task_id = cols[0];
    l.annotator_id = cols[1];
    try {
      l.label = corpus::parse_label(cols[2]);
    } catch (const ValidationError& e) {
      throw ValidationError("labels line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (cols.size() == 4) l.timestamp = cols[3];
    if (l.task_id.empty() || l.annotator_id.empty()) {
      throw ValidationError("labels line " + std::to_string(i + 1) +
                            ": empty task or annotator id");
    }
    out.push_back(std::move(l));
  }
  return out;
}

// ---------------------------------------------------------------------------

json VoteResult::to_json() const {
  return {{"task_id", task_id},
          {"final_label",
           final_label ? std::string(corpus::label_name(*final_label)) : "unassigned"},
          {"votes", {{"premise", premise_votes}, {"non_premise", non_premise_votes}}},
          {"quorum", quorum}};
}

VoteResult majority_vote(std::string_view task_id, std::span<const AnnotatorLabel> labels,
                         std::size_t n_annotators, std::size_t quorum) {
  if (quorum == 0 || quorum > n_annotators || 2 * quorum <= n_annotators) {
    throw ValidationError("quorum must be a strict majority of the annotators");
  }
  if (labels.size() > n_annotators) {
    throw ValidationError("task '" + std::string(task_id) + "' has " +
                          std::to_string(labels.size()) + " labels for " +
                          std::to_string(n_annotators) + " annotators");
  }
  VoteResult r;
  r.task_id = std::string(task_id);
  r.quorum = quorum;
  std::unordered_set<std::string> annotators;
  for (const auto& l : labels) {
    if (!annotators.insert(l.annotator_id).second) {
      throw ValidationError("annotator '" + l.annotator_id + "' labeled task '" +
                            std::string(task_id) + "' twice");
    }
    (l.label == Label::kPremise ? r.premise_votes : r.non_premise_votes) += 1;
  }
  if (r.premise_votes >= quorum) r.final_label = Label::kPremise;
  else if (r.non_premise_votes >= quorum) r.final_label = Label::kNonPremise;
  return r;
}

std::vector<VoteResult> vote_all(std::span<const AnnotationTask> tasks,
                                 std::span<const AnnotatorLabel> labels,
                                 std::size_t n_annotators, std::size_t quorum) {
  std::unordered_map<std::string, std::vector<AnnotatorLabel>> by_task;
  std::unordered_set<std::string> known;
  for (const auto& t : tasks) known.insert(t.task_id);
  for (const auto& l : labels) {
    if (!known.contains(l.task_id)) {
      throw ValidationError("label refers to unknown task '" + l.task_id + "'");
    }
    by_task[l.task_id].push_back(l);
  }
  std::vector<VoteResult> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    const auto it = by_task.find(t.task_id);
    if (it == by_task.end()) {
      out.push_back(majority_vote(t.task_id, {}, n_annotators, quorum));
    } else {
      out.push_back(majority_vote(t.task_id, it->second, n_annotators, quorum));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string landis_koch_band(double alpha) {
  if (alpha < 0.0) return "poor";
  if (alpha <= 0.2) return "slight";
  if (alpha <= 0.4) return "fair";
  if (alpha <= 0.6) return "moderate";
  if (alpha <= 0.8) return "substantial";
  return "almost perfect";
}

json AgreementResult::to_json() const {
  return {{"alpha", alpha},
          {"D_o", observed_disagreement},
          {"D_e", expected_disagreement},
          {"n_units_used", n_units_used},
          {"n_pairable", n_pairable},
          {"degenerate", degenerate},
          {"band", band}};
}

AgreementResult krippendorff_alpha(const LabelMatrix& matrix) {
  std::map<int, std::size_t> category_index;
  for (const auto& unit : matrix) {
    for (const auto& v : unit) {
      if (v) category_index.emplace(*v, 0);
    }
  }
  std::size_t next = 0;
  for (auto& [value, index] : category_index) index = next++;
  const std::size_t c = category_index.size();

  std::vector<double> coincidence(c * c, 0.0);
  AgreementResult result;
  std::vector<double> unit_counts(c);
  for (const auto& unit : matrix) {
    std::fill(unit_counts.begin(), unit_counts.end(), 0.0);
    std::size_t m = 0;
    for (const auto& v : unit) {
      if (!v) continue;
      unit_counts[category_index.at(*v)] += 1.0;
      ++m;
    }
    if (m < 2) continue;
    ++result.n_units_used;
    result.n_pairable += m;
    const double weight = 1.0 / static_cast<double>(m - 1);
    for (std::size_t a = 0; a < c; ++a) {
      for (std::size_t b = 0; b < c; ++b) {
        const double pairs = unit_counts[a] * (unit_counts[b] - (a == b ? 1.0 : 0.0));
        coincidence[a * c + b] += pairs * weight;
      }
    }
  }
  if (result.n_units_used == 0) {
    throw ValidationError("agreement needs at least one unit with two or more labels");
  }

  std::vector<double> marginals(c, 0.0);
  double n = 0.0;
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = 0; b < c; ++b) marginals[a] += coincidence[a * c + b];
    n += marginals[a];
  }
  double off_diagonal = 0.0, expected = 0.0;
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = 0; b < c; ++b) {
      if (a == b) continue;
      off_diagonal += coincidence[a * c + b];
      expected += marginals[a] * marginals[b];
    }
  }
  result.observed_disagreement = off_diagonal / n;
  result.expected_disagreement = expected / (n * (n - 1.0));
  if (result.expected_disagreement == 0.0) {
    result.alpha = 1.0;
    result.degenerate = true;
  } else {
    result.alpha = 1.0 - result.observed_disagreement / result.expected_disagreement;
  }
  result.band = landis_koch_band(result.alpha);
  return result;
}

LabelMatrix label_matrix(std::span<const AnnotatorLabel> labels) {
  std::map<std::string, std::size_t> units, annotators;
  for (const auto& l : labels) {
    units.emplace(l.task_id, 0);
    annotators.emplace(l.annotator_id, 0);
  }
  std::size_t i = 0;
  for (auto& [id, index] : units) index = i++;
  i = 0;
  for (auto& [id, index] : annotators) index = i++;

  LabelMatrix matrix(units.size(),
                     std::vector<std::optional<int>>(annotators.size()));
  for (const auto& l : labels) {
    auto& cell = matrix[units.at(l.task_id)][annotators.at(l.annotator_id)];
    if (cell) {
      throw ValidationError("annotator '" + l.annotator_id + "' labeled task '" +
                            l.task_id + "' twice");
    }
    cell = l.label == Label::kPremise ? 1 : 0;
  }
  return matrix;
}

AgreementResult agreement_from_labels(std::span<const AnnotatorLabel> labels) {
  return krippendorff_alpha(label_matrix(labels));
}

// ---------------------------------------------------------------------------

double ModelRow::premise_rate() const {
  return assigned() == 0 ? 0.0
                         : static_cast<double>(premise) / static_cast<double>(assigned());
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

namespace {

json row_json(const ModelRow& r) {
  const double assigned = static_cast<double>(r.assigned());
  const double non_rate = r.assigned() == 0 ? 0.0 : static_cast<double>(r.non_premise) / assigned;
  return {{"model_id", r.model_id},
          {"premise", r.premise},
          {"non_premise", r.non_premise},
          {"assigned", r.assigned()},
          {"unassigned", r.unassigned},
          {"total", r.total()},
          {"premise_rate", r.premise_rate()},
          {"non_premise_rate", non_rate},
          {"premise_cell", std::to_string(r.premise) + " / " + format_percent(r.premise_rate())},
          {"non_premise_cell", std::to_string(r.non_premise) + " / " + format_percent(non_rate)},
          {"sum_cell", std::to_string(r.assigned()) + " / 100%"}};
}

}  // namespace

json AccuracyReport::to_json() const {
  json rows = json::array();
  for (const auto& r : models) rows.push_back(row_json(r));
  const double total = static_cast<double>(overall.total());
  return {{"models", std::move(rows)},
          {"overall", row_json(overall)},
          {"tasks", overall.total()},
          {"assigned", overall.assigned()},
          {"assigned_fraction",
           overall.total() == 0 ? 0.0 : static_cast<double>(overall.assigned()) / total}};
}

AccuracyReport model_accuracy(std::span<const VoteResult> votes,
                              const std::map<std::string, std::string>& key) {
  std::map<std::string, ModelRow> rows;
  AccuracyReport report;
  report.overall.model_id = "overall";
  for (const auto& v : votes) {
    const auto it = key.find(v.task_id);
    if (it == key.end()) {
      throw ValidationError("task '" + v.task_id + "' is missing from the key file");
    }
    auto& row = rows[it->second];
    row.model_id = it->second;
    for (ModelRow* r : {&row, &report.overall}) {
      if (!v.final_label) ++r->unassigned;
      else if (*v.final_label == Label::kPremise) ++r->premise;
      else ++r->non_premise;
    }
  }
  for (auto& [id, row] : rows) report.models.push_back(row);
  return report;
}

}  // namespace argforge::annotation
