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

#ifndef ARGFORGE_PIPELINE_HPP_
#define ARGFORGE_PIPELINE_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/annotation.hpp"
#include "argforge/config.hpp"

namespace argforge::pipeline {

// Artifact locations relative to the output directory.
namespace paths {
inline constexpr std::string_view kLabeledCorpus = "corpus/labeled.jsonl";
inline constexpr std::string_view kNewsCorpus = "corpus/news.jsonl";
inline constexpr std::string_view kIngestStats = "corpus/stats.json";
inline constexpr std::string_view kSchema = "features/schema.json";
inline constexpr std::string_view kLabeledFeatures = "features/labeled.svm";
inline constexpr std::string_view kNewsFeatures = "features/news.svm";
inline constexpr std::string_view kClassifier = "model/classifier.json";
inline constexpr std::string_view kTrainingSummary = "model/training.json";
inline constexpr std::string_view kCvReport = "reports/cv.json";
inline constexpr std::string_view kScores = "classify/scores.jsonl";
inline constexpr std::string_view kSelected = "select/selected.jsonl";
inline constexpr std::string_view kTrainingLines = "select/training_lines.txt";
inline constexpr std::string_view kSelectedLm = "lm/selected.json";
inline constexpr std::string_view kBaselineLm = "lm/baseline.json";
inline constexpr std::string_view kPerplexity = "lm/perplexity.json";
inline constexpr std::string_view kCandidates = "generate/candidates.jsonl";
inline constexpr std::string_view kTasks = "annotation/tasks.jsonl";
inline constexpr std::string_view kTaskKey = "annotation/key.jsonl";
inline constexpr std::string_view kVotes = "annotation/votes.jsonl";
inline constexpr std::string_view kAgreement = "annotation/agreement.json";
inline constexpr std::string_view kGenerationReport = "reports/generation.json";
inline constexpr std::string_view kManifestDir = "manifests";
}  // namespace paths

// Stage names in pipeline order.
const std::vector<std::string>& stage_names();
bool is_stage(std::string_view name);

// Per-stage seed derived from the global seed.
std::uint64_t stage_seed(const config::PipelineConfig& config, std::string_view stage);

// Runs one stage, writing its artifacts and manifests/<stage>.json.
// Absent prerequisites raise MissingInputError; bad data ValidationError.
void run_stage(std::string_view name, const config::PipelineConfig& config,
               std::ostream& log);

// Every stage in order. vote, agree and report run only when a labels file
// is configured and present. Also writes manifests/run-all.json.
void run_all(const config::PipelineConfig& config, std::ostream& log);

// Reads a votes file written by the vote stage.
std::vector<annotation::VoteResult> load_votes(const std::filesystem::path& path);

}  // namespace argforge::pipeline

#endif  // ARGFORGE_PIPELINE_HPP_
