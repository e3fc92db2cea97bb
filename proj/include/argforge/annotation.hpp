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

#ifndef ARGFORGE_ANNOTATION_HPP_
#define ARGFORGE_ANNOTATION_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/corpus.hpp"
#include "argforge/generator.hpp"
#include "argforge/io.hpp"

namespace argforge::annotation {

using corpus::Label;

struct AnnotationTask {
  std::string task_id;
  std::string claim_text;
  std::string sentence_text;
  std::string model_id;  // evaluator-only; never in annotator_view()
  std::size_t display_order = 0;
};

// Annotator-facing record {task_id, claim, sentence}.
json annotator_view(const AnnotationTask& task);
// Evaluator key record {task_id, model_id}.
json key_record(const AnnotationTask& task);

// Reads the annotator-facing tasks file; display order is line order.
std::vector<AnnotationTask> load_tasks(const std::filesystem::path& path);
// task_id -> model_id from a key file.
std::map<std::string, std::string> load_task_key(const std::filesystem::path& path);

// Shuffles candidates from at least two models with a seeded permutation.
// Task ids are "T0001", "T0002", ... in display order. `claims` maps
// prompt ids to claim text. Two candidates with the same (model, prompt,
// seed) are a duplicate-task error.
std::vector<AnnotationTask> build_blind_tasks(
    std::span<const lm::GeneratedCandidate> candidates,
    const std::map<std::string, std::string>& claims, std::uint64_t seed);

struct AnnotatorLabel {
  std::string task_id;
  std::string annotator_id;
  Label label = Label::kPremise;
  std::string timestamp;
};

// Labels TSV: task_id<TAB>annotator_id<TAB>label<TAB>timestamp.
std::string format_label_tsv(const AnnotatorLabel& label);
std::vector<AnnotatorLabel> parse_labels_tsv(std::string_view text);

struct VoteResult {
  std::string task_id;
  std::optional<Label> final_label;  // nullopt = unassigned
  std::size_t premise_votes = 0;
  std::size_t non_premise_votes = 0;
  std::size_t quorum = 0;

  json to_json() const;
};

// The label with at least `quorum` votes wins; otherwise unassigned.
// Requires quorum > n_annotators / 2 and distinct annotators.
VoteResult majority_vote(std::string_view task_id,
                         std::span<const AnnotatorLabel> labels,
                         std::size_t n_annotators = 4, std::size_t quorum = 3);

// Votes every task in `tasks` order; tasks without labels are unassigned.
std::vector<VoteResult> vote_all(std::span<const AnnotationTask> tasks,
                                 std::span<const AnnotatorLabel> labels,
                                 std::size_t n_annotators = 4, std::size_t quorum = 3);

// units x annotators; nullopt marks a missing label. Values are nominal
// category codes.
using LabelMatrix = std::vector<std::vector<std::optional<int>>>;

struct AgreementResult {
  double alpha = 1.0;
  double observed_disagreement = 0.0;  // D_o
  double expected_disagreement = 0.0;  // D_e
  std::size_t n_units_used = 0;
  std::size_t n_pairable = 0;  // values in units with >= 2 labels
  bool degenerate = false;     // D_e == 0; alpha pinned to 1
  std::string band;

  json to_json() const;
};

// Landis-Koch interpretation band.
std::string landis_koch_band(double alpha);

// Nominal Krippendorff's alpha via the coincidence matrix. Units with fewer
// than two labels are ignored; at least one pairable unit is required.
AgreementResult krippendorff_alpha(const LabelMatrix& matrix);

// Builds the matrix over tasks (sorted by id) and annotators (sorted by id).
LabelMatrix label_matrix(std::span<const AnnotatorLabel> labels);
AgreementResult agreement_from_labels(std::span<const AnnotatorLabel> labels);

struct ModelRow {
  std::string model_id;
  std::size_t premise = 0;
  std::size_t non_premise = 0;
  std::size_t unassigned = 0;

  std::size_t assigned() const { return premise + non_premise; }
  std::size_t total() const { return assigned() + unassigned; }
  // premise / assigned; 0 when nothing was assigned.
  double premise_rate() const;
};

struct AccuracyReport {
  std::vector<ModelRow> models;  // sorted by model id
  ModelRow overall;

  json to_json() const;
};

// Per-model premise/non-premise/unassigned counts. Every voted task must
// appear in `key`.
AccuracyReport model_accuracy(std::span<const VoteResult> votes,
                              const std::map<std::string, std::string>& key);

// "63.2%"
std::string format_percent(double fraction);

}  // namespace argforge::annotation

#endif  // ARGFORGE_ANNOTATION_HPP_
