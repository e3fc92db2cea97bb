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

#include "argforge/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "argforge/utf8.hpp"

namespace argforge::corpus {

namespace {

bool is_terminator(char32_t c) { return c == '.' || c == '!' || c == '?'; }

// Floor of frac*n, tolerant of products like 0.1*70 = 6.9999999.
std::size_t tail_count(double frac, std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(frac * static_cast<double>(n) + 1e-9));
}

std::string required_string(const json& record, const char* key,
                            const std::string& where) {
  const auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw ValidationError(where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::kPremise ? "premise" : "non_premise";
}

Label parse_label(std::string_view name) {
  if (name == "premise") return Label::kPremise;
  if (name == "non_premise") return Label::kNonPremise;
  throw ValidationError("unknown label '" + std::string(name) + "'");
}

LabelTarget parse_label_target(std::string_view name) {
  if (name == "premise") return LabelTarget::kPremise;
  if (name == "non_premise") return LabelTarget::kNonPremise;
  if (name == "exclude") return LabelTarget::kExclude;
  throw ValidationError("unknown label target '" + std::string(name) +
                        "' (expected premise, non_premise or exclude)");
}

AbbreviationSet load_abbreviations(const std::filesystem::path& path) {
  AbbreviationSet out;
  for (const auto& raw : split_lines(read_file(path))) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = utf8::trim(line);
    if (!line.empty()) out.insert(utf8::to_lower(line));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    const auto piece = text.substr(i, d.length);
    i += d.length;
    if (utf8::is_letter(d.code_point) || utf8::is_digit(d.code_point)) {
      word.append(piece);
      continue;
    }
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
    if (!utf8::is_space(d.code_point)) tokens.emplace_back(piece);
  }
  if (!word.empty()) tokens.push_back(std::move(word));
  return tokens;
}

std::vector<Sentence> segment(const Document& document,
                              const AbbreviationSet& abbreviations) {
  const std::string_view text = document.text;
  std::vector<Sentence> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    const auto piece = utf8::trim(text.substr(begin, end - begin));
    if (piece.empty()) return;
    Sentence s;
    s.doc_id = document.id;
    s.index_in_doc = out.size();
    s.id = document.id + "-s" + std::to_string(s.index_in_doc);
    s.text = std::string(piece);
    s.tokens = tokenize(piece);
    out.push_back(std::move(s));
  };

  std::size_t start = 0;
  std::size_t word_start = 0;  // first byte of the current whitespace word
  std::size_t i = 0;
  while (i < text.size()) {
    auto d = utf8::decode(text, i);
    if (utf8::is_space(d.code_point)) {
      i += d.length;
      word_start = i;
      continue;
    }
    if (!is_terminator(d.code_point)) {
      i += d.length;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_terminator(text[end])) ++end;
    std::size_t next = end;
    bool saw_space = false;
    while (next < text.size()) {
      const auto w = utf8::decode(text, next);
      if (!utf8::is_space(w.code_point)) break;
      saw_space = true;
      next += w.length;
    }
    i = end;
    if (!saw_space || next >= text.size()) continue;
    if (!utf8::is_upper(utf8::decode(text, next).code_point)) continue;
    const auto word = utf8::to_lower(text.substr(word_start, end - word_start));
    if (abbreviations.contains(word)) continue;
    emit(start, end);
    start = next;
  }
  emit(start, text.size());
  return out;
}

std::vector<Sentence> length_filter(const std::vector<Sentence>& sentences,
                                    double lower_frac, double upper_frac) {
  if (lower_frac < 0 || upper_frac < 0 || lower_frac + upper_frac >= 1.0) {
    throw ValidationError(
        "length_filter requires 0 <= lower_frac + upper_frac < 1");
  }
  const std::size_t n = sentences.size();
  const std::size_t drop_low = tail_count(lower_frac, n);
  const std::size_t drop_high = tail_count(upper_frac, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return sentences[a].tokens.size() <
                            sentences[b].tokens.size();
                   });
  std::vector<bool> keep(n, false);
  for (std::size_t r = drop_low; r + drop_high < n; ++r) keep[order[r]] = true;

  std::vector<Sentence> out;
  out.reserve(n - drop_low - drop_high);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(sentences[i]);
  }
  return out;
}

std::vector<Sentence> dedup(const std::vector<Sentence>& sentences) {
  std::unordered_set<std::string> seen;
  std::vector<Sentence> out;
  for (const auto& s : sentences) {
    if (seen.insert(utf8::collapse_whitespace(s.text)).second) {
      out.push_back(s);
    }
  }
  return out;
}

LabeledCorpus load_labeled_corpus(const std::filesystem::path& path,
                                  const std::vector<LabelMapRule>& rules) {
  std::unordered_map<std::string, LabelTarget> targets;
  for (const auto& rule : rules) {
    if (!targets.emplace(rule.source_label, rule.target).second) {
      throw ValidationError("duplicate label rule for '" + rule.source_label +
                            "'");
    }
  }

  LabeledCorpus corpus;
  std::unordered_map<std::string, std::size_t> next_index;
  std::unordered_set<std::string> ids;
  for_each_jsonl(path, [&](const json& record, std::size_t line) {
    const std::string where = path.string() + ":" + std::to_string(line);
    Sentence s;
    s.id = required_string(record, "id", where);
    s.text = required_string(record, "text", where);
    const std::string label = required_string(record, "label", where);
    if (const auto it = record.find("topic"); it != record.end()) {
      if (!it->is_string()) throw ValidationError(where + ": topic not a string");
      s.topic = it->get<std::string>();
    }
    s.doc_id = s.id;
    if (const auto it = record.find("doc_id"); it != record.end()) {
      if (!it->is_string()) throw ValidationError(where + ": doc_id not a string");
      s.doc_id = it->get<std::string>();
    }

    const auto rule = targets.find(label);
    if (rule == targets.end()) {
      throw ValidationError(where + ": no label rule for source label '" +
                            label + "'");
    }
    if (!ids.insert(s.id).second) {
      throw ValidationError(where + ": duplicate id '" + s.id + "'");
    }
    if (rule->second == LabelTarget::kExclude) {
      ++corpus.excluded_count;
      return;
    }
    s.tokens = tokenize(s.text);
    if (s.tokens.empty()) throw ValidationError(where + ": empty text");
    s.index_in_doc = next_index[s.doc_id]++;
    if (rule->second == LabelTarget::kPremise) {
      s.gold_label = Label::kPremise;
      ++corpus.premise_count;
    } else {
      s.gold_label = Label::kNonPremise;
      ++corpus.non_premise_count;
    }
    corpus.sentences.push_back(std::move(s));
  });
  return corpus;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  for_each_jsonl(path, [&](const json& record, std::size_t line) {
    const std::string where = path.string() + ":" + std::to_string(line);
    Document d;
    d.id = required_string(record, "id", where);
    d.text = required_string(record, "text", where);
    d.source = record.value("source", std::string());
    if (const auto it = record.find("date"); it != record.end() && it->is_string()) {
      d.date = it->get<std::string>();
    }
    if (utf8::trim(d.text).empty()) throw ValidationError(where + ": empty text");
    if (!ids.insert(d.id).second) {
      throw ValidationError(where + ": duplicate document id '" + d.id + "'");
    }
    docs.push_back(std::move(d));
  });
  return docs;
}

json sentence_to_json(const Sentence& s) {
  json j = {{"id", s.id},
            {"doc_id", s.doc_id},
            {"index_in_doc", s.index_in_doc},
            {"text", s.text},
            {"tokens", s.tokens}};
  if (s.gold_label) j["gold_label"] = label_name(*s.gold_label);
  if (s.topic) j["topic"] = *s.topic;
  return j;
}

Sentence sentence_from_json(const json& record) {
  Sentence s;
  s.id = record.at("id").get<std::string>();
  s.doc_id = record.at("doc_id").get<std::string>();
  s.index_in_doc = record.at("index_in_doc").get<std::size_t>();
  s.text = record.at("text").get<std::string>();
  s.tokens = record.at("tokens").get<std::vector<std::string>>();
  if (const auto it = record.find("gold_label"); it != record.end()) {
    s.gold_label = parse_label(it->get<std::string>());
  }
  if (const auto it = record.find("topic"); it != record.end()) {
    s.topic = it->get<std::string>();
  }
  return s;
}

std::string write_sentences_jsonl(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    out += sentence_to_json(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<Sentence> load_sentences(const std::filesystem::path& path) {
  std::vector<Sentence> out;
  for_each_jsonl(path, [&](const json& record, std::size_t line) {
    try {
      out.push_back(sentence_from_json(record));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) +
                            ": bad sentence record: " + e.what());
    }
  });
  return out;
}

}  // namespace argforge::corpus
