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

#ifndef ARGFORGE_GENERATOR_HPP_
#define ARGFORGE_GENERATOR_HPP_

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "argforge/io.hpp"
#include "argforge/ngram.hpp"
#include "argforge/sampler.hpp"

namespace argforge::lm {

struct GeneratedCandidate {
  std::string prompt_id;
  std::string model_id;
  std::string text;  // continuation only, never the prompt
  std::vector<std::string> tokens;
  std::uint64_t seed_used = 0;
};

// Candidates file record {prompt_id, model_id, text, seed_used}.
json candidate_to_json(const GeneratedCandidate& c);
GeneratedCandidate candidate_from_json(const json& j);

class Generator {
 public:
  virtual ~Generator() = default;
  virtual const std::string& model_id() const = 0;
  // config.num_samples candidates; sample i uses seed config.seed + i.
  virtual std::vector<GeneratedCandidate> generate(std::string_view prompt_id,
                                                   std::string_view prompt,
                                                   const SamplerConfig& config) = 0;
};

class NgramGenerator : public Generator {
 public:
  NgramGenerator(std::string model_id, const LanguageModel& model)
      : model_id_(std::move(model_id)), model_(model) {}

  const std::string& model_id() const override { return model_id_; }
  std::vector<GeneratedCandidate> generate(std::string_view prompt_id,
                                           std::string_view prompt,
                                           const SamplerConfig& config) override;

 private:
  std::string model_id_;
  const LanguageModel& model_;
};

// Wire schema shared by external and built-in backends:
//   request  {prompt, top_k, top_p, num_samples, max_tokens, seed}
//   response {candidates: [{text, seed_used}, ...]}
json make_generate_request(std::string_view prompt, const SamplerConfig& config);
SamplerConfig parse_generate_request(const json& request, std::string* prompt);
json make_generate_response(const std::vector<GeneratedCandidate>& candidates);

// Serves a generate request with any Generator.
json handle_generate_request(Generator& generator, const json& request);

// External LM reached via HTTP POST <base_url>/generate.
class HttpGenerator : public Generator {
 public:
  HttpGenerator(std::string model_id, std::string base_url,
                std::chrono::milliseconds timeout = std::chrono::seconds(120));

  const std::string& model_id() const override { return model_id_; }
  std::vector<GeneratedCandidate> generate(std::string_view prompt_id,
                                           std::string_view prompt,
                                           const SamplerConfig& config) override;

 private:
  std::string model_id_;
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// Space-joins tokens, attaching closing punctuation to the left and opening
// brackets/quotes to the right.
std::string detokenize(const std::vector<std::string>& tokens);

}  // namespace argforge::lm

#endif  // ARGFORGE_GENERATOR_HPP_
