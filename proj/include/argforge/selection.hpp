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

#ifndef ARGFORGE_SELECTION_HPP_
#define ARGFORGE_SELECTION_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "argforge/corpus.hpp"
#include "argforge/io.hpp"

namespace argforge::selection {

inline constexpr std::string_view kDefaultConnective = "потому что";

struct ScoredSentence {
  std::string sentence_id;
  std::string text;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

// Ranks by descending score; equal scores keep corpus order.
std::vector<ScoredSentence> rank(std::span<const corpus::Sentence> sentences,
                                 std::span<const double> scores);

struct Fraction {
  double value;
};
struct Count {
  std::size_t value;
};
using SelectionSize = std::variant<Fraction, Count>;

// Top round(fraction * N) or top `count` entries of a ranked list.
std::vector<ScoredSentence> rank_and_select(std::span<const ScoredSentence> ranked,
                                            SelectionSize size);

// connective + " " + text, whitespace-normalized.
std::string make_training_line(std::string_view sentence_text,
                               std::string_view connective);

struct PromptSpec {
  std::string claim_text;
  std::string connective = std::string(kDefaultConnective);
};

// claim + " " + connective.
std::string make_prompt(const PromptSpec& spec);

struct Claim {
  std::string id;  // "p01", "p02", ... in file order
  std::string text;
  std::string gloss;
};

// TSV claim<TAB>gloss; '#' comments and blank lines skipped.
std::vector<Claim> load_prompts(const std::filesystem::path& path);

json scored_to_json(const ScoredSentence& s);
ScoredSentence scored_from_json(const json& j);

}  // namespace argforge::selection

#endif  // ARGFORGE_SELECTION_HPP_
