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

#ifndef ARGFORGE_CONFIG_HPP_
#define ARGFORGE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/corpus.hpp"
#include "argforge/gbdt.hpp"
#include "argforge/io.hpp"
#include "argforge/sampler.hpp"
#include "argforge/selection.hpp"

namespace argforge::config {

// Parses the TOML subset used by pipeline configs into a JSON object:
// [section] and [a.b] headers, key = value with basic "strings", literal
// 'strings', integers, floats, booleans and (possibly multi-line) arrays.
// '#' starts a comment outside strings.
json parse_toml(std::string_view text);

struct ExternalGenerator {
  std::string model_id;
  std::string url;
};

struct PipelineConfig {
  std::filesystem::path config_dir;  // relative paths resolve against it
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;

  // [paths]
  std::filesystem::path labeled_corpus;
  std::filesystem::path documents;
  std::filesystem::path abbreviations;
  std::filesystem::path markers;
  std::filesystem::path pos_lexicon;
  std::filesystem::path prompts;
  std::optional<std::filesystem::path> labels;

  // [label_map]
  std::vector<corpus::LabelMapRule> label_map;

  // [preprocess]
  double lower_frac = 0.10;
  double upper_frac = 0.10;

  // [features]
  bool binary = false;
  bool suffix_heuristics = true;
  std::string tagger_command;

  // [classifier]
  gbdt::TrainConfig base;
  std::vector<int> grid_trees{50, 150, 500};
  std::vector<int> grid_depths{2, 8, 20, 30};
  int outer_k = 5;
  int inner_k = 4;

  // [classify]
  std::string scorer = "gbdt";  // gbdt | process | http
  std::string scorer_command;
  std::string scorer_url;

  // [select]
  selection::SelectionSize size = selection::Count{3500};
  std::string connective = std::string(selection::kDefaultConnective);

  // [lm]
  int lm_order = 3;
  double lm_discount = 0.75;
  double validation_fraction = 0.1;
  bool baseline = true;

  // [generate]
  lm::SamplerConfig sampler;
  std::vector<ExternalGenerator> external_generators;

  // [annotation]
  std::size_t n_annotators = 4;
  std::size_t quorum = 3;

  void validate() const;
  json to_json() const;
};

// Reads and validates a config file. Missing files raise MissingInputError;
// bad values raise ValidationError.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const json& doc, const std::filesystem::path& config_dir);

}  // namespace argforge::config

#endif  // ARGFORGE_CONFIG_HPP_
