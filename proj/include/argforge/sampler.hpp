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

#ifndef ARGFORGE_SAMPLER_HPP_
#define ARGFORGE_SAMPLER_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "argforge/io.hpp"
#include "argforge/rng.hpp"

namespace argforge::lm {

struct SamplerConfig {
  int top_k = 50;
  double top_p = 0.92;
  std::uint64_t seed = 0;
  int max_tokens = 40;
  int num_samples = 20;

  void validate() const;
  json to_json() const;
};

// Slack for the cumulative-mass comparison against top_p.
inline constexpr double kTopPSlack = 1e-12;

struct NucleusEntry {
  int token;
  double prob;  // renormalized over the nucleus
};

// Sorts by probability descending (ties: lower id first), keeps the first
// top_k tokens with non-zero probability, then the shortest prefix whose
// cumulative mass reaches top_p (within kTopPSlack), renormalized. If the
// top_k tokens never reach top_p, all of them are kept.
std::vector<NucleusEntry> nucleus(std::span<const double> dist, int top_k,
                                  double top_p);

// Draws one token from nucleus(dist, config.top_k, config.top_p).
int sample_topk_topp(std::span<const double> dist, const SamplerConfig& config,
                     Rng& rng);

}  // namespace argforge::lm

#endif  // ARGFORGE_SAMPLER_HPP_
