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

#include "argforge/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "argforge/utf8.hpp"

namespace argforge::selection {

std::vector<ScoredSentence> rank(std::span<const corpus::Sentence> sentences,
                                 std::span<const double> scores) {
  if (sentences.size() != scores.size()) {
    throw ValidationError("got " + std::to_string(scores.size()) + " scores for " +
                          std::to_string(sentences.size()) + " sentences");
  }
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<ScoredSentence> out;
  out.reserve(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& s = sentences[order[r]];
    out.push_back({s.id, s.text, scores[order[r]], r + 1});
  }
  return out;
}

std::vector<ScoredSentence> rank_and_select(std::span<const ScoredSentence> ranked,
                                            SelectionSize size) {
  const std::size_t n = ranked.size();
  if (n == 0) throw ValidationError("cannot select from an empty corpus");
  std::size_t take = 0;
  if (const auto* f = std::get_if<Fraction>(&size)) {
    if (!(f->value > 0.0 && f->value <= 1.0)) {
      throw ValidationError("selection fraction must be in (0, 1]");
    }
    take = static_cast<std::size_t>(std::llround(f->value * static_cast<double>(n)));
    if (take == 0) {
      throw ValidationError("selection fraction " + std::to_string(f->value) +
                            " of " + std::to_string(n) + " sentences selects nothing");
    }
  } else {
    take = std::get<Count>(size).value;
    if (take < 1 || take > n) {
      throw ValidationError("selection count " + std::to_string(take) +
                            " outside 1.." + std::to_string(n));
    }
  }
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take)};
}

std::string make_training_line(std::string_view sentence_text,
                               std::string_view connective) {
  const std::string text = utf8::collapse_whitespace(sentence_text);
  if (text.empty()) throw ValidationError("training sentence is empty");
  const std::string prefix = utf8::collapse_whitespace(connective);
  return prefix.empty() ? text : prefix + " " + text;
}

std::string make_prompt(const PromptSpec& spec) {
  const std::string claim = utf8::collapse_whitespace(spec.claim_text);
  if (claim.empty()) throw ValidationError("prompt claim is empty");
  const std::string suffix = utf8::collapse_whitespace(spec.connective);
  return suffix.empty() ? claim : claim + " " + suffix;
}

std::vector<Claim> load_prompts(const std::filesystem::path& path) {
  std::vector<Claim> out;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (utf8::trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const auto cols = split(lines[i], '\t');
    if (cols.size() > 2) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) +
                            ": expected claim<TAB>gloss");
    }
    Claim c;
    c.text = std::string(utf8::trim(cols[0]));
    if (c.text.empty()) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) +
                            ": empty claim");
    }
    if (cols.size() == 2) c.gloss = std::string(utf8::trim(cols[1]));
    char id[16];
    std::snprintf(id, sizeof(id), "p%02zu", out.size() + 1);
    c.id = id;
    out.push_back(std::move(c));
  }
  return out;
}

json scored_to_json(const ScoredSentence& s) {
  return {{"id", s.sentence_id}, {"text", s.text}, {"score", s.score}, {"rank", s.rank}};
}

ScoredSentence scored_from_json(const json& j) {
  return {j.at("id").get<std::string>(), j.at("text").get<std::string>(),
          j.at("score").get<double>(), j.at("rank").get<std::size_t>()};
}

}  // namespace argforge::selection
