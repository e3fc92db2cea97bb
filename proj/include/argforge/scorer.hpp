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

#ifndef ARGFORGE_SCORER_HPP_
#define ARGFORGE_SCORER_HPP_

#include <chrono>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/corpus.hpp"
#include "argforge/features.hpp"
#include "argforge/gbdt.hpp"

namespace argforge {
class LineProcess;
}

namespace argforge::scoring {

// Probability-of-premise for sentences. Deterministic for a fixed model.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(std::span<const corpus::Sentence> sentences) = 0;
};

// The built-in boosted-tree scorer.
class TreeScorer : public Scorer {
 public:
  TreeScorer(gbdt::TreeEnsemble model, const features::FeatureSchema& schema,
             const features::MarkerLexicon& lexicon,
             const features::PosTagger& tagger,
             features::FeaturizeOptions options = {});

  std::vector<double> score(std::span<const corpus::Sentence> sentences) override;

 private:
  gbdt::TreeEnsemble model_;
  const features::FeatureSchema& schema_;
  const features::MarkerLexicon& lexicon_;
  const features::PosTagger& tagger_;
  features::FeaturizeOptions options_;
};

// Parses one reply line as a probability in [0, 1]; anything else throws.
double parse_probability(std::string_view line);

// Child-process plugin: one sentence text per line in, one probability per
// line out.
class ProcessScorer : public Scorer {
 public:
  explicit ProcessScorer(std::string command,
                         std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ProcessScorer() override;

  std::vector<double> score(std::span<const corpus::Sentence> sentences) override;

 private:
  std::mutex mu_;
  std::unique_ptr<LineProcess> process_;
};

// HTTP plugin: POST <base_url>/score with one {"id","text"} JSON object per
// line; the reply body carries one probability per line in request order.
class HttpScorer : public Scorer {
 public:
  explicit HttpScorer(std::string base_url,
                      std::chrono::milliseconds timeout = std::chrono::seconds(30),
                      std::size_t batch_size = 256);

  std::vector<double> score(std::span<const corpus::Sentence> sentences) override;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
  std::size_t batch_size_;
};

}  // namespace argforge::scoring

#endif  // ARGFORGE_SCORER_HPP_
