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

#ifndef ARGFORGE_FEATURES_HPP_
#define ARGFORGE_FEATURES_HPP_

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "argforge/corpus.hpp"

namespace argforge {
class LineProcess;
}

namespace argforge::features {

// ---------------------------------------------------------------------------
// Part-of-speech tags.

enum class Pos { kNoun, kPron, kVerb, kAdj, kAdv, kOther };
enum class Tense { kPast, kPresent, kFuture };
enum class Mood { kIndicative, kImperative };

struct PosTag {
  Pos pos = Pos::kOther;
  // Verb attributes; only set when pos == kVerb.
  std::optional<Tense> tense;
  std::optional<int> person;  // 1, 2 or 3
  std::optional<Mood> mood;

  bool operator==(const PosTag&) const = default;
};

// Text form: "NOUN", "VERB|tense=past,person=3,mood=indicative".
std::string format_tag(const PosTag& tag);
PosTag parse_tag(std::string_view text);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // Returns exactly one tag per token.
  virtual std::vector<PosTag> tag(const std::vector<std::string>& tokens) const = 0;
};

// Full-form lexicon lookup on lowercased tokens, then Russian suffix
// heuristics, then OTHER.
class LexiconTagger : public PosTagger {
 public:
  explicit LexiconTagger(bool suffix_heuristics = true)
      : suffix_heuristics_(suffix_heuristics) {}

  // TSV: form<TAB>tag[<TAB>key=value,...]; '#' comments.
  static LexiconTagger load(const std::filesystem::path& path,
                            bool suffix_heuristics = true);

  void add(std::string_view form, PosTag tag);
  std::size_t size() const { return forms_.size(); }

  std::vector<PosTag> tag(const std::vector<std::string>& tokens) const override;
  PosTag tag_one(std::string_view token) const;

 private:
  bool suffix_heuristics_;
  std::unordered_map<std::string, PosTag> forms_;
};

// Line-delimited child-process tagger: space-joined tokens in, one
// space-separated tag sequence of the same arity out.
class ExternalTagger : public PosTagger {
 public:
  explicit ExternalTagger(std::string command,
                          std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ExternalTagger() override;

  std::vector<PosTag> tag(const std::vector<std::string>& tokens) const override;

 private:
  mutable std::mutex mu_;
  std::unique_ptr<LineProcess> process_;
};

// ---------------------------------------------------------------------------
// Marker lexicon.

struct MarkerEntry {
  std::vector<std::string> phrase;  // lowercase tokens
  std::string feature_name;
};

class MarkerLexicon {
 public:
  MarkerLexicon() = default;
  explicit MarkerLexicon(std::vector<MarkerEntry> entries);

  // TSV: phrase<TAB>feature_name; '#' comments. Phrases are tokenized and
  // lowercased.
  static MarkerLexicon load(const std::filesystem::path& path);

  const std::vector<MarkerEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<MarkerEntry> entries_;
};

// ---------------------------------------------------------------------------
// Schema and vectors.

inline constexpr std::size_t kPunctBlock = 5;
inline constexpr std::size_t kPosgramBlock = 25 + 125 + 625;
inline constexpr std::size_t kVerbBlock = 8;
inline constexpr std::size_t kMorphosyntacticBlock = kPosgramBlock + kVerbBlock;

// Ordered feature names: lexical ++ punctuation ++ POS 2/3/4-grams ++ verb
// grammar. POS n-grams are enumerated by length, then lexicographically over
// ADJ < ADV < NOUN < PRON < VERB.
class FeatureSchema {
 public:
  explicit FeatureSchema(const MarkerLexicon& lexicon);

  std::size_t dimension() const { return names_.size(); }
  std::size_t lexical_size() const { return lexical_size_; }
  std::size_t punct_offset() const { return lexical_size_; }
  std::size_t posgram_offset() const { return lexical_size_ + kPunctBlock; }
  std::size_t verb_offset() const { return posgram_offset() + kPosgramBlock; }

  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // Hex digest of the ordered names.
  const std::string& id() const { return id_; }

  // Checks that `lexicon` produces this schema's lexical block.
  bool matches(const MarkerLexicon& lexicon) const;

  json to_json() const;

 private:
  std::size_t lexical_size_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string id_;
};

// Index of a POS n-gram (n in 2..4, content tags only) within the posgram
// block.
std::size_t posgram_index(const std::vector<Pos>& gram);

class FeatureVector {
 public:
  FeatureVector() = default;
  FeatureVector(std::string schema_id,
                std::vector<std::pair<std::uint32_t, std::uint32_t>> entries);

  const std::string& schema_id() const { return schema_id_; }
  // Sorted by index, counts > 0.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& entries() const {
    return entries_;
  }
  std::uint32_t count(std::size_t index) const;

  bool operator==(const FeatureVector&) const = default;

 private:
  std::string schema_id_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries_;
};

// ---------------------------------------------------------------------------
// Extraction.

// Non-overlapping leftmost-greedy occurrences of each phrase, counted per
// phrase on lowercased tokens.
std::vector<std::uint32_t> extract_lexical(const std::vector<std::string>& tokens,
                                           const MarkerLexicon& lexicon);

// comma, colon, semicolon, question, exclamation
std::array<std::uint32_t, kPunctBlock> extract_punct(
    const std::vector<std::string>& tokens);

// POS n-gram counts over the content-class-filtered tag sequence, followed
// by verb grammar counts: tense past/present/future, person 1/2/3, mood
// indicative/imperative.
std::vector<std::uint32_t> extract_morphosyntactic(const std::vector<PosTag>& tags);

struct FeaturizeOptions {
  bool binary = false;  // clamp every count to 1
};

FeatureVector featurize(const std::vector<std::string>& tokens,
                        const FeatureSchema& schema, const MarkerLexicon& lexicon,
                        const PosTagger& tagger, FeaturizeOptions options = {});

inline FeatureVector featurize(const corpus::Sentence& sentence,
                               const FeatureSchema& schema,
                               const MarkerLexicon& lexicon,
                               const PosTagger& tagger,
                               FeaturizeOptions options = {}) {
  return featurize(sentence.tokens, schema, lexicon, tagger, options);
}

// Sparse row export: "<id> <index>:<count> ..." per line.
std::string format_sparse_row(std::string_view id, const FeatureVector& vector);

struct SparseRow {
  std::string id;
  FeatureVector vector;
};

std::vector<SparseRow> parse_sparse_rows(std::string_view text,
                                         const FeatureSchema& schema);

}  // namespace argforge::features

#endif  // ARGFORGE_FEATURES_HPP_
