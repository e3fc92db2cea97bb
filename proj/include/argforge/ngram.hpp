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

#ifndef ARGFORGE_NGRAM_HPP_
#define ARGFORGE_NGRAM_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "argforge/io.hpp"

namespace argforge::lm {

inline constexpr int kBos = 0;
inline constexpr int kEos = 1;
inline constexpr int kUnk = 2;

inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Token <-> id map. Ids 0..2 are BOS, EOS and UNK.
class Vocabulary {
 public:
  Vocabulary();

  int add(std::string_view token);
  // Unknown tokens map to kUnk.
  int id(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Next-token distributions over a vocabulary. BOS is never predicted, so the
// support is every id except kBos.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  // Number of preceding tokens the model conditions on.
  virtual int context_size() const = 0;
  // One probability per vocabulary id; entries sum to 1.
  virtual std::vector<double> next_token_dist(std::span<const int> context) const = 0;
  virtual double prob(std::span<const int> context, int token) const;
  // Natural log of prob(), in extended precision.
  virtual long double log_prob(std::span<const int> context, int token) const;

  std::vector<double> next_token_dist(const std::vector<std::string>& context) const;
  std::vector<int> encode(const std::vector<std::string>& tokens) const;
};

// Interpolated absolute-discount backoff n-gram model:
//   P(w|h) = max(c(h,w) - d, 0) / c(h) + d * N1+(h) / c(h) * P(w|h')
// where h' drops the oldest token of h. Unseen contexts use P(w|h')
// directly; below the unigram sits a uniform distribution over the support.
class NgramModel : public LanguageModel {
 public:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::vector<std::pair<int, std::uint64_t>> next;  // sorted by id
  };

  // Each line is padded with order-1 BOS markers and terminated by EOS.
  static NgramModel train(const std::vector<std::vector<std::string>>& lines,
                          int order, double discount = 0.75);

  const Vocabulary& vocabulary() const override { return vocab_; }
  int context_size() const override { return order_ - 1; }
  std::vector<double> next_token_dist(std::span<const int> context) const override;
  double prob(std::span<const int> context, int token) const override;
  using LanguageModel::next_token_dist;

  int order() const { return order_; }
  double discount() const { return discount_; }
  // tables()[m] maps length-m contexts to their continuation counts.
  const std::vector<std::map<std::vector<int>, ContextCounts>>& tables() const {
    return tables_;
  }

  std::string serialize() const;
  static NgramModel deserialize(std::string_view bytes);

 private:
  const ContextCounts* find(std::span<const int> context) const;

  int order_ = 1;
  double discount_ = 0.75;
  Vocabulary vocab_;
  std::vector<std::map<std::vector<int>, ContextCounts>> tables_;
};

// Uniform over the support; a reference point for perplexity.
class UniformModel : public LanguageModel {
 public:
  explicit UniformModel(const std::vector<std::string>& tokens);

  const Vocabulary& vocabulary() const override { return vocab_; }
  int context_size() const override { return 0; }
  std::vector<double> next_token_dist(std::span<const int> context) const override;
  long double log_prob(std::span<const int> context, int token) const override;
  using LanguageModel::next_token_dist;

  // Size of the support (vocabulary minus BOS).
  std::size_t support_size() const { return vocab_.size() - 1; }

 private:
  Vocabulary vocab_;
};

// exp(-(1/T) * sum log P) over every token and the closing EOS of each line;
// out-of-vocabulary tokens score as UNK.
double perplexity(const LanguageModel& model,
                  const std::vector<std::vector<std::string>>& lines);

}  // namespace argforge::lm

#endif  // ARGFORGE_NGRAM_HPP_
