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

#include "argforge/sampler.hpp"

#include <algorithm>
#include <numeric>

namespace argforge::lm {

void SamplerConfig::validate() const {
  if (top_k < 1) throw ValidationError("top_k must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ValidationError("top_p must be in (0, 1]");
  if (max_tokens < 1) throw ValidationError("max_tokens must be >= 1");
  if (num_samples < 1) throw ValidationError("num_samples must be >= 1");
}

json SamplerConfig::to_json() const {
  return {{"top_k", top_k},
          {"top_p", top_p},
          {"seed", seed},
          {"max_tokens", max_tokens},
          {"num_samples", num_samples}};
}

std::vector<NucleusEntry> nucleus(std::span<const double> dist, int top_k,
                                  double top_p) {
  if (top_k < 1) throw ValidationError("top_k must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ValidationError("top_p must be in (0, 1]");

  std::vector<int> order;
  order.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) order.push_back(static_cast<int>(i));
  }
  if (order.empty()) throw ValidationError("distribution has no positive mass");
  const auto keep = std::min(order.size(), static_cast<std::size_t>(top_k));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](int a, int b) {
                      const double pa = dist[static_cast<std::size_t>(a)];
                      const double pb = dist[static_cast<std::size_t>(b)];
                      return pa != pb ? pa > pb : a < b;
                    });

  std::vector<NucleusEntry> out;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    const double p = dist[static_cast<std::size_t>(order[i])];
    out.push_back({order[i], p});
    cumulative += p;
    if (cumulative >= top_p - kTopPSlack) break;
  }
  for (auto& e : out) e.prob /= cumulative;
  return out;
}

int sample_topk_topp(std::span<const double> dist, const SamplerConfig& config,
                     Rng& rng) {
  const auto candidates = nucleus(dist, config.top_k, config.top_p);
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (const auto& c : candidates) {
    cumulative += c.prob;
    if (u < cumulative) return c.token;
  }
  return candidates.back().token;
}

}  // namespace argforge::lm
