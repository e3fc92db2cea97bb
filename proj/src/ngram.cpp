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

#include "argforge/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace argforge::lm {

namespace {

constexpr int kModelFormatVersion = 1;

}  // namespace

Vocabulary::Vocabulary() {
  add(kBosToken);
  add(kEosToken);
  add(kUnkToken);
}

int Vocabulary::add(std::string_view token) {
  const auto [it, inserted] =
      ids_.emplace(std::string(token), static_cast<int>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

int Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

// ---------------------------------------------------------------------------

double LanguageModel::prob(std::span<const int> context, int token) const {
  return next_token_dist(context).at(static_cast<std::size_t>(token));
}

long double LanguageModel::log_prob(std::span<const int> context, int token) const {
  return std::log(static_cast<long double>(prob(context, token)));
}

std::vector<double> LanguageModel::next_token_dist(
    const std::vector<std::string>& context) const {
  const auto ids = encode(context);
  return next_token_dist(std::span<const int>(ids));
}

std::vector<int> LanguageModel::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocabulary().id(t));
  return ids;
}

// ---------------------------------------------------------------------------

NgramModel NgramModel::train(const std::vector<std::vector<std::string>>& lines,
                             int order, double discount) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) {
    throw ValidationError("discount must be in (0, 1)");
  }
  if (lines.empty()) throw ValidationError("language model corpus is empty");

  NgramModel model;
  model.order_ = order;
  model.discount_ = discount;
  std::vector<std::map<std::vector<int>, std::map<int, std::uint64_t>>> raw(
      static_cast<std::size_t>(order));

  const auto pad = static_cast<std::size_t>(order - 1);
  std::vector<int> seq;
  for (const auto& line : lines) {
    seq.assign(pad, kBos);
    for (const auto& t : line) seq.push_back(model.vocab_.add(t));
    seq.push_back(kEos);
    for (std::size_t i = pad; i < seq.size(); ++i) {
      for (std::size_t m = 0; m <= pad; ++m) {
        std::vector<int> ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - m),
                             seq.begin() + static_cast<std::ptrdiff_t>(i));
        ++raw[m][std::move(ctx)][seq[i]];
      }
    }
  }

  model.tables_.resize(raw.size());
  for (std::size_t m = 0; m < raw.size(); ++m) {
    for (auto& [ctx, next] : raw[m]) {
      ContextCounts cc;
      for (const auto& [tok, c] : next) {
        cc.next.emplace_back(tok, c);
        cc.total += c;
      }
      model.tables_[m].emplace(ctx, std::move(cc));
    }
  }
  return model;
}

const NgramModel::ContextCounts* NgramModel::find(std::span<const int> context) const {
  const auto& table = tables_[context.size()];
  const auto it = table.find(std::vector<int>(context.begin(), context.end()));
  return it == table.end() ? nullptr : &it->second;
}

std::vector<double> NgramModel::next_token_dist(std::span<const int> context) const {
  const std::size_t v = vocab_.size();
  std::vector<double> dist(v, 1.0 / static_cast<double>(v - 1));
  dist[kBos] = 0.0;
  const std::size_t max_m = std::min<std::size_t>(context.size(),
                                                  static_cast<std::size_t>(order_ - 1));
  for (std::size_t m = 0; m <= max_m; ++m) {
    const auto* cc = find(context.subspan(context.size() - m));
    if (cc == nullptr) break;
    const double total = static_cast<double>(cc->total);
    const double gamma = discount_ * static_cast<double>(cc->next.size()) / total;
    for (auto& p : dist) p *= gamma;
    for (const auto& [tok, c] : cc->next) {
      dist[static_cast<std::size_t>(tok)] += (static_cast<double>(c) - discount_) / total;
    }
  }
  return dist;
}

double NgramModel::prob(std::span<const int> context, int token) const {
  if (token == kBos) return 0.0;
  double p = 1.0 / static_cast<double>(vocab_.size() - 1);
  const std::size_t max_m = std::min<std::size_t>(context.size(),
                                                  static_cast<std::size_t>(order_ - 1));
  for (std::size_t m = 0; m <= max_m; ++m) {
    const auto* cc = find(context.subspan(context.size() - m));
    if (cc == nullptr) break;
    const double total = static_cast<double>(cc->total);
    const double gamma = discount_ * static_cast<double>(cc->next.size()) / total;
    p *= gamma;
    const auto it = std::lower_bound(
        cc->next.begin(), cc->next.end(), token,
        [](const auto& e, int t) { return e.first < t; });
    if (it != cc->next.end() && it->first == token) {
      p += (static_cast<double>(it->second) - discount_) / total;
    }
  }
  return p;
}

std::string NgramModel::serialize() const {
  json tables = json::array();
  for (std::size_t m = 0; m < tables_.size(); ++m) {
    json entries = json::array();
    for (const auto& [ctx, cc] : tables_[m]) {
      json next = json::array();
      for (const auto& [tok, c] : cc.next) next.push_back({tok, c});
      entries.push_back({{"context", ctx}, {"next", std::move(next)}});
    }
    tables.push_back({{"context_length", m}, {"entries", std::move(entries)}});
  }
  json j = {{"format_version", kModelFormatVersion},
            {"kind", "ngram"},
            {"order", order_},
            {"discount", discount_},
            {"vocab", vocab_.tokens()},
            {"tables", std::move(tables)}};
  return j.dump() + "\n";
}

NgramModel NgramModel::deserialize(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("corrupted language model file: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion ||
        j.at("kind").get<std::string>() != "ngram") {
      throw ValidationError("unsupported language model format");
    }
    NgramModel model;
    model.order_ = j.at("order").get<int>();
    model.discount_ = j.at("discount").get<double>();
    if (model.order_ < 1 || !(model.discount_ > 0.0 && model.discount_ < 1.0)) {
      throw ValidationError("language model has invalid order or discount");
    }
    const auto vocab = j.at("vocab").get<std::vector<std::string>>();
    if (vocab.size() < 3 || vocab[0] != kBosToken || vocab[1] != kEosToken ||
        vocab[2] != kUnkToken) {
      throw ValidationError("language model vocabulary lacks special tokens");
    }
    for (std::size_t i = 3; i < vocab.size(); ++i) model.vocab_.add(vocab[i]);
    if (model.vocab_.size() != vocab.size()) {
      throw ValidationError("language model vocabulary has duplicates");
    }
    const auto v = static_cast<int>(vocab.size());
    model.tables_.resize(static_cast<std::size_t>(model.order_));
    for (const auto& jt : j.at("tables")) {
      const auto m = jt.at("context_length").get<std::size_t>();
      if (m >= model.tables_.size()) throw ValidationError("bad context length");
      for (const auto& je : jt.at("entries")) {
        auto ctx = je.at("context").get<std::vector<int>>();
        if (ctx.size() != m) throw ValidationError("context length mismatch");
        ContextCounts cc;
        for (const auto& jn : je.at("next")) {
          const int tok = jn.at(0).get<int>();
          const auto c = jn.at(1).get<std::uint64_t>();
          if (tok <= kBos || tok >= v || c == 0) {
            throw ValidationError("bad continuation count");
          }
          cc.next.emplace_back(tok, c);
          cc.total += c;
        }
        if (cc.next.empty() || !std::is_sorted(cc.next.begin(), cc.next.end())) {
          throw ValidationError("continuations must be non-empty and sorted");
        }
        model.tables_[m].emplace(std::move(ctx), std::move(cc));
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("corrupted language model file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

UniformModel::UniformModel(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) vocab_.add(t);
}

std::vector<double> UniformModel::next_token_dist(std::span<const int>) const {
  std::vector<double> dist(vocab_.size(), 1.0 / static_cast<double>(support_size()));
  dist[kBos] = 0.0;
  return dist;
}

long double UniformModel::log_prob(std::span<const int>, int token) const {
  if (token == kBos) return -std::numeric_limits<long double>::infinity();
  return -std::log(static_cast<long double>(support_size()));
}

double perplexity(const LanguageModel& model,
                  const std::vector<std::vector<std::string>>& lines) {
  if (lines.empty()) throw ValidationError("perplexity needs held-out lines");
  const auto pad = static_cast<std::size_t>(model.context_size());
  long double log_sum = 0.0L;
  std::size_t count = 0;
  std::vector<int> seq;
  for (const auto& line : lines) {
    seq.assign(pad, kBos);
    for (const auto& t : line) seq.push_back(model.vocabulary().id(t));
    seq.push_back(kEos);
    for (std::size_t i = pad; i < seq.size(); ++i) {
      const std::span<const int> ctx(seq.data() + (i - pad), pad);
      const long double lp = model.log_prob(ctx, seq[i]);
      if (!std::isfinite(lp)) {
        throw ValidationError("zero-probability token '" +
                              model.vocabulary().token(seq[i]) + "'");
      }
      log_sum += lp;
      ++count;
    }
  }
  return static_cast<double>(std::exp(-log_sum / static_cast<long double>(count)));
}

}  // namespace argforge::lm
