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

#ifndef ARGFORGE_CORPUS_HPP_
#define ARGFORGE_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/io.hpp"

namespace argforge::corpus {

enum class Label { kPremise, kNonPremise };

std::string_view label_name(Label label);
// Accepts "premise" and "non_premise"; anything else is a ValidationError.
Label parse_label(std::string_view name);

struct Document {
  std::string id;
  std::string text;
  std::string source;
  std::optional<std::string> date;
};

struct Sentence {
  std::string id;
  std::string doc_id;
  std::size_t index_in_doc = 0;
  std::string text;
  std::vector<std::string> tokens;
  std::optional<Label> gold_label;
  std::optional<std::string> topic;
};

enum class LabelTarget { kPremise, kNonPremise, kExclude };

struct LabelMapRule {
  std::string source_label;
  LabelTarget target;
};

LabelTarget parse_label_target(std::string_view name);

using AbbreviationSet = std::set<std::string>;

// One lowercase abbreviation per line; '#' starts a comment.
AbbreviationSet load_abbreviations(const std::filesystem::path& path);

// Maximal runs of letters/digits, or single punctuation characters. Case is
// preserved.
std::vector<std::string> tokenize(std::string_view text);

// Splits after a run of . ! ? followed by whitespace and an uppercase letter,
// unless the whitespace-delimited word ending at the terminator is (after
// lowercasing) in `abbreviations`. Sentence ids are "<doc_id>-s<index>".
std::vector<Sentence> segment(const Document& document,
                              const AbbreviationSet& abbreviations);

// Ranks by token count (stable) and drops floor(lower_frac*N) from the short
// end and floor(upper_frac*N) from the long end. Survivors keep input order.
std::vector<Sentence> length_filter(const std::vector<Sentence>& sentences,
                                    double lower_frac = 0.10,
                                    double upper_frac = 0.10);

// Exact duplicates of whitespace-collapsed text are removed, first kept.
std::vector<Sentence> dedup(const std::vector<Sentence>& sentences);

struct LabeledCorpus {
  std::vector<Sentence> sentences;
  std::size_t premise_count = 0;
  std::size_t non_premise_count = 0;
  std::size_t excluded_count = 0;
};

// Reads the labeled-corpus JSONL interchange format
// {id, text, label, topic?, doc_id?}.
LabeledCorpus load_labeled_corpus(const std::filesystem::path& path,
                                  const std::vector<LabelMapRule>& rules);

std::vector<Document> load_documents(const std::filesystem::path& path);

json sentence_to_json(const Sentence& sentence);
Sentence sentence_from_json(const json& record);

std::string write_sentences_jsonl(const std::vector<Sentence>& sentences);
std::vector<Sentence> load_sentences(const std::filesystem::path& path);

}  // namespace argforge::corpus

#endif  // ARGFORGE_CORPUS_HPP_
