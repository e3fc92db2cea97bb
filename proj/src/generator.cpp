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

#include "argforge/generator.hpp"

#include <httplib.h>

#include "argforge/corpus.hpp"

namespace argforge::lm {

namespace {

bool attaches_left(std::string_view t) {
  return t == "." || t == "," || t == "!" || t == "?" || t == ":" || t == ";" ||
         t == "%" || t == ")" || t == "]" || t == "»" || t == "…";
}

bool attaches_right(std::string_view t) {
  return t == "(" || t == "[" || t == "«";
}

}  // namespace

json candidate_to_json(const GeneratedCandidate& c) {
  return {{"prompt_id", c.prompt_id},
          {"model_id", c.model_id},
          {"text", c.text},
          {"seed_used", c.seed_used}};
}

GeneratedCandidate candidate_from_json(const json& j) {
  GeneratedCandidate c;
  c.prompt_id = j.at("prompt_id").get<std::string>();
  c.model_id = j.at("model_id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  c.seed_used = j.at("seed_used").get<std::uint64_t>();
  c.tokens = corpus::tokenize(c.text);
  return c;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  bool glue_next = true;
  for (const auto& t : tokens) {
    if (!glue_next && !attaches_left(t)) out.push_back(' ');
    out += t;
    glue_next = attaches_right(t);
  }
  return out;
}

std::vector<GeneratedCandidate> NgramGenerator::generate(std::string_view prompt_id,
                                                         std::string_view prompt,
                                                         const SamplerConfig& config) {
  config.validate();
  const auto pad = static_cast<std::size_t>(model_.context_size());
  std::vector<int> prefix(pad, kBos);
  for (int id : model_.encode(corpus::tokenize(prompt))) prefix.push_back(id);

  std::vector<GeneratedCandidate> out;
  out.reserve(static_cast<std::size_t>(config.num_samples));
  for (int s = 0; s < config.num_samples; ++s) {
    GeneratedCandidate c;
    c.prompt_id = std::string(prompt_id);
    c.model_id = model_id_;
    c.seed_used = config.seed + static_cast<std::uint64_t>(s);
    Rng rng(c.seed_used);
    std::vector<int> context = prefix;
    for (int step = 0; step < config.max_tokens; ++step) {
      const std::span<const int> window(context.data() + (context.size() - pad), pad);
      const int token = sample_topk_topp(model_.next_token_dist(window), config, rng);
      if (token == kEos) break;
      context.push_back(token);
      c.tokens.push_back(model_.vocabulary().token(token));
    }
    c.text = detokenize(c.tokens);
    out.push_back(std::move(c));
  }
  return out;
}

json make_generate_request(std::string_view prompt, const SamplerConfig& config) {
  return {{"prompt", prompt},
          {"top_k", config.top_k},
          {"top_p", config.top_p},
          {"num_samples", config.num_samples},
          {"max_tokens", config.max_tokens},
          {"seed", config.seed}};
}

SamplerConfig parse_generate_request(const json& request, std::string* prompt) {
  SamplerConfig config;
  try {
    *prompt = request.at("prompt").get<std::string>();
    config.top_k = request.at("top_k").get<int>();
    config.top_p = request.at("top_p").get<double>();
    config.num_samples = request.at("num_samples").get<int>();
    config.max_tokens = request.at("max_tokens").get<int>();
    config.seed = request.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad generate request: ") + e.what());
  }
  config.validate();
  return config;
}

json make_generate_response(const std::vector<GeneratedCandidate>& candidates) {
  json list = json::array();
  for (const auto& c : candidates) {
    list.push_back({{"text", c.text}, {"seed_used", c.seed_used}});
  }
  return {{"candidates", std::move(list)}};
}

json handle_generate_request(Generator& generator, const json& request) {
  std::string prompt;
  const auto config = parse_generate_request(request, &prompt);
  return make_generate_response(generator.generate("", prompt, config));
}

HttpGenerator::HttpGenerator(std::string model_id, std::string base_url,
                             std::chrono::milliseconds timeout)
    : model_id_(std::move(model_id)), base_url_(std::move(base_url)), timeout_(timeout) {}

std::vector<GeneratedCandidate> HttpGenerator::generate(std::string_view prompt_id,
                                                        std::string_view prompt,
                                                        const SamplerConfig& config) {
  config.validate();
  httplib::Client client(base_url_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  auto res = client.Post("/generate", make_generate_request(prompt, config).dump(),
                         "application/json");
  if (!res) {
    throw ValidationError("generator " + base_url_ + "/generate failed: " +
                          httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ValidationError("generator " + base_url_ + "/generate returned HTTP " +
                          std::to_string(res->status));
  }
  std::vector<GeneratedCandidate> out;
  try {
    const auto body = json::parse(res->body);
    for (const auto& jc : body.at("candidates")) {
      GeneratedCandidate c;
      c.prompt_id = std::string(prompt_id);
      c.model_id = model_id_;
      c.text = jc.at("text").get<std::string>();
      c.tokens = corpus::tokenize(c.text);
      c.seed_used = jc.value("seed_used", config.seed + out.size());
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ValidationError("generator " + base_url_ + " sent a malformed reply: " +
                          e.what());
  }
  if (out.size() != static_cast<std::size_t>(config.num_samples)) {
    throw ValidationError("generator " + base_url_ + " returned " +
                          std::to_string(out.size()) + " candidates, expected " +
                          std::to_string(config.num_samples));
  }
  return out;
}

}  // namespace argforge::lm
