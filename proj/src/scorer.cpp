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

#include "argforge/scorer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <httplib.h>

#include "argforge/subprocess.hpp"
#include "argforge/utf8.hpp"

namespace argforge::scoring {

namespace {

std::string one_line(std::string_view text) {
  return utf8::collapse_whitespace(text);
}

}  // namespace

TreeScorer::TreeScorer(gbdt::TreeEnsemble model,
                       const features::FeatureSchema& schema,
                       const features::MarkerLexicon& lexicon,
                       const features::PosTagger& tagger,
                       features::FeaturizeOptions options)
    : model_(std::move(model)),
      schema_(schema),
      lexicon_(lexicon),
      tagger_(tagger),
      options_(options) {
  if (model_.schema_id() != schema_.id()) {
    throw ValidationError("model schema " + model_.schema_id() +
                          " does not match feature schema " + schema_.id());
  }
}

std::vector<double> TreeScorer::score(std::span<const corpus::Sentence> sentences) {
  std::vector<double> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    out.push_back(model_.predict_proba(
        features::featurize(s, schema_, lexicon_, tagger_, options_)));
  }
  return out;
}

double parse_probability(std::string_view line) {
  const auto text = utf8::trim(line);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end ||
      !std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw ValidationError("scorer returned a non-probability reply '" +
                          std::string(line) + "'");
  }
  return value;
}

ProcessScorer::ProcessScorer(std::string command, std::chrono::milliseconds timeout)
    : process_(std::make_unique<LineProcess>(std::move(command), timeout)) {}

ProcessScorer::~ProcessScorer() = default;

std::vector<double> ProcessScorer::score(std::span<const corpus::Sentence> sentences) {
  std::lock_guard lock(mu_);
  std::vector<double> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    out.push_back(parse_probability(process_->request(one_line(s.text))));
  }
  return out;
}

HttpScorer::HttpScorer(std::string base_url, std::chrono::milliseconds timeout,
                       std::size_t batch_size)
    : base_url_(std::move(base_url)),
      timeout_(timeout),
      batch_size_(std::max<std::size_t>(1, batch_size)) {}

std::vector<double> HttpScorer::score(std::span<const corpus::Sentence> sentences) {
  httplib::Client client(base_url_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  std::vector<double> out;
  out.reserve(sentences.size());
  for (std::size_t begin = 0; begin < sentences.size(); begin += batch_size_) {
    const std::size_t end = std::min(sentences.size(), begin + batch_size_);
    std::string body;
    for (std::size_t i = begin; i < end; ++i) {
      body += json{{"id", sentences[i].id}, {"text", one_line(sentences[i].text)}}.dump();
      body += '\n';
    }
    auto res = client.Post("/score", body, "application/x-ndjson");
    if (!res) {
      throw ValidationError("scorer " + base_url_ + "/score failed: " +
                            httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw ValidationError("scorer " + base_url_ + "/score returned HTTP " +
                            std::to_string(res->status));
    }
    auto lines = split_lines(res->body);
    std::erase_if(lines, [](const std::string& l) { return utf8::trim(l).empty(); });
    if (lines.size() != end - begin) {
      throw ValidationError("scorer returned " + std::to_string(lines.size()) +
                            " scores for " + std::to_string(end - begin) +
                            " sentences");
    }
    for (const auto& l : lines) out.push_back(parse_probability(l));
  }
  return out;
}

}  // namespace argforge::scoring
