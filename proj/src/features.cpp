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

#include "argforge/features.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "argforge/subprocess.hpp"
#include "argforge/utf8.hpp"

namespace argforge::features {

namespace {

// Content classes in lexicographic name order; the posgram block is indexed
// in this order.
constexpr std::array<Pos, 5> kContentOrder = {Pos::kAdj, Pos::kAdv, Pos::kNoun,
                                              Pos::kPron, Pos::kVerb};

std::string_view pos_name(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "NOUN";
    case Pos::kPron: return "PRON";
    case Pos::kVerb: return "VERB";
    case Pos::kAdj: return "ADJ";
    case Pos::kAdv: return "ADV";
    case Pos::kOther: return "OTHER";
  }
  return "OTHER";
}

int content_rank(Pos pos) {
  switch (pos) {
    case Pos::kAdj: return 0;
    case Pos::kAdv: return 1;
    case Pos::kNoun: return 2;
    case Pos::kPron: return 3;
    case Pos::kVerb: return 4;
    case Pos::kOther: return -1;
  }
  return -1;
}

Pos parse_pos(std::string_view name) {
  for (Pos p : {Pos::kNoun, Pos::kPron, Pos::kVerb, Pos::kAdj, Pos::kAdv,
                Pos::kOther}) {
    if (pos_name(p) == name) return p;
  }
  throw ValidationError("unknown POS tag '" + std::string(name) + "'");
}

void apply_attribute(PosTag& tag, std::string_view key, std::string_view value) {
  auto bad = [&] {
    return ValidationError("bad verb attribute '" + std::string(key) + "=" +
                           std::string(value) + "'");
  };
  if (key == "tense") {
    if (value == "past") tag.tense = Tense::kPast;
    else if (value == "present") tag.tense = Tense::kPresent;
    else if (value == "future") tag.tense = Tense::kFuture;
    else throw bad();
  } else if (key == "person") {
    if (value == "1") tag.person = 1;
    else if (value == "2") tag.person = 2;
    else if (value == "3") tag.person = 3;
    else throw bad();
  } else if (key == "mood") {
    if (value == "indicative") tag.mood = Mood::kIndicative;
    else if (value == "imperative") tag.mood = Mood::kImperative;
    else throw bad();
  } else {
    throw bad();
  }
}

void parse_attributes(PosTag& tag, std::string_view attrs) {
  if (attrs.empty()) return;
  if (tag.pos != Pos::kVerb) {
    throw ValidationError("attributes are only allowed on VERB tags");
  }
  for (const auto& kv : split(attrs, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("bad verb attribute '" + kv + "'");
    }
    apply_attribute(tag, std::string_view(kv).substr(0, eq),
                    std::string_view(kv).substr(eq + 1));
  }
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += utf8::decode(s, i).length) ++n;
  return n;
}

bool ends_with_any(std::string_view word,
                   std::initializer_list<std::string_view> suffixes) {
  for (auto suffix : suffixes) {
    if (word.ends_with(suffix)) return true;
  }
  return false;
}

PosTag bare_tag(Pos p) {
  PosTag t;
  t.pos = p;
  return t;
}

std::optional<PosTag> suffix_guess(std::string_view lower) {
  if (lower.empty()) return std::nullopt;
  const char32_t first = utf8::decode(lower, 0).code_point;
  if (first < 0x0400 || first > 0x04FF) return std::nullopt;
  if (code_point_count(lower) < 4) return std::nullopt;

  if (ends_with_any(lower, {"ость", "ение", "ание", "ция", "ство", "тель"})) {
    return bare_tag(Pos::kNoun);
  }
  if (ends_with_any(lower, {"енно", "ьно"})) return bare_tag(Pos::kAdv);
  if (ends_with_any(lower, {"ться", "ть", "ти", "чь"})) return bare_tag(Pos::kVerb);
  if (ends_with_any(lower, {"лся", "лась", "лось", "лись", "ла", "ло", "ли",
                            "ал", "ел", "ил", "ыл"})) {
    PosTag t = bare_tag(Pos::kVerb);
    t.tense = Tense::kPast;
    t.mood = Mood::kIndicative;
    return t;
  }
  if (ends_with_any(lower, {"ется", "ится", "ются", "ятся", "ет", "ит", "ут",
                            "ют", "ат", "ят"})) {
    PosTag t = bare_tag(Pos::kVerb);
    t.tense = Tense::kPresent;
    t.person = 3;
    t.mood = Mood::kIndicative;
    return t;
  }
  if (ends_with_any(lower, {"ого", "его", "ому", "ему", "ыми", "ими", "ую", "юю", "ый",
                            "ий", "ой", "ая", "яя", "ое", "ее", "ые", "ие",
                            "ых", "их"})) {
    return bare_tag(Pos::kAdj);
  }
  return std::nullopt;
}

}  // namespace

std::string format_tag(const PosTag& tag) {
  std::string out(pos_name(tag.pos));
  std::vector<std::string> attrs;
  if (tag.tense) {
    static constexpr std::array<const char*, 3> kT = {"past", "present", "future"};
    attrs.push_back(std::string("tense=") + kT[static_cast<int>(*tag.tense)]);
  }
  if (tag.person) attrs.push_back("person=" + std::to_string(*tag.person));
  if (tag.mood) {
    attrs.push_back(*tag.mood == Mood::kIndicative ? "mood=indicative"
                                                   : "mood=imperative");
  }
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    out += (i == 0 ? "|" : ",");
    out += attrs[i];
  }
  return out;
}

PosTag parse_tag(std::string_view text) {
  const auto bar = text.find('|');
  PosTag tag;
  tag.pos = parse_pos(text.substr(0, bar));
  if (bar != std::string_view::npos) parse_attributes(tag, text.substr(bar + 1));
  return tag;
}

// ---------------------------------------------------------------------------

LexiconTagger LexiconTagger::load(const std::filesystem::path& path,
                                  bool suffix_heuristics) {
  LexiconTagger tagger(suffix_heuristics);
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    if (cols.size() < 2 || cols.size() > 3) {
      throw ValidationError(where + ": expected form<TAB>tag[<TAB>attrs]");
    }
    try {
      PosTag tag;
      tag.pos = parse_pos(cols[1]);
      if (cols.size() == 3) parse_attributes(tag, cols[2]);
      tagger.add(cols[0], tag);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return tagger;
}

void LexiconTagger::add(std::string_view form, PosTag tag) {
  forms_[utf8::to_lower(form)] = tag;
}

PosTag LexiconTagger::tag_one(std::string_view token) const {
  const std::string lower = utf8::to_lower(token);
  if (const auto it = forms_.find(lower); it != forms_.end()) return it->second;
  if (suffix_heuristics_) {
    if (auto guess = suffix_guess(lower)) return *guess;
  }
  return PosTag{};
}

std::vector<PosTag> LexiconTagger::tag(const std::vector<std::string>& tokens) const {
  std::vector<PosTag> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(tag_one(t));
  return out;
}

ExternalTagger::ExternalTagger(std::string command,
                               std::chrono::milliseconds timeout)
    : process_(std::make_unique<LineProcess>(std::move(command), timeout)) {}

ExternalTagger::~ExternalTagger() = default;

std::vector<PosTag> ExternalTagger::tag(const std::vector<std::string>& tokens) const {
  if (tokens.empty()) return {};
  std::string request;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) request.push_back(' ');
    request += tokens[i];
  }
  std::string reply;
  {
    std::lock_guard lock(mu_);
    reply = process_->request(request);
  }
  std::vector<PosTag> tags;
  for (const auto& field : split(utf8::collapse_whitespace(reply), ' ')) {
    if (field.empty()) continue;
    try {
      tags.push_back(parse_tag(field));
    } catch (const ValidationError& e) {
      throw SubprocessError("tagger '" + process_->command() +
                            "' returned an invalid tag: " + e.what());
    }
  }
  if (tags.size() != tokens.size()) {
    throw SubprocessError("tagger '" + process_->command() + "' returned " +
                          std::to_string(tags.size()) + " tags for " +
                          std::to_string(tokens.size()) + " tokens");
  }
  return tags;
}

// ---------------------------------------------------------------------------

MarkerLexicon::MarkerLexicon(std::vector<MarkerEntry> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> names;
  for (const auto& e : entries_) {
    if (e.phrase.empty()) {
      throw ValidationError("marker '" + e.feature_name + "' has an empty phrase");
    }
    if (!names.insert(e.feature_name).second) {
      throw ValidationError("duplicate marker feature name '" + e.feature_name + "'");
    }
  }
}

MarkerLexicon MarkerLexicon::load(const std::filesystem::path& path) {
  std::vector<MarkerEntry> entries;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (utf8::trim(line).empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) +
                            ": expected phrase<TAB>feature_name");
    }
    MarkerEntry entry;
    for (const auto& tok : corpus::tokenize(cols[0])) {
      entry.phrase.push_back(utf8::to_lower(tok));
    }
    entry.feature_name = std::string(utf8::trim(cols[1]));
    entries.push_back(std::move(entry));
  }
  return MarkerLexicon(std::move(entries));
}

// ---------------------------------------------------------------------------

std::size_t posgram_index(const std::vector<Pos>& gram) {
  const std::size_t n = gram.size();
  if (n < 2 || n > 4) throw std::invalid_argument("POS n-gram length must be 2..4");
  std::size_t offset = 0;
  std::size_t block = 25;
  for (std::size_t m = 2; m < n; ++m) {
    offset += block;
    block *= 5;
  }
  std::size_t index = 0;
  for (Pos p : gram) {
    const int r = content_rank(p);
    if (r < 0) throw std::invalid_argument("OTHER is not a content class");
    index = index * 5 + static_cast<std::size_t>(r);
  }
  return offset + index;
}

FeatureSchema::FeatureSchema(const MarkerLexicon& lexicon)
    : lexical_size_(lexicon.size()) {
  names_.reserve(lexical_size_ + kPunctBlock + kMorphosyntacticBlock);
  for (const auto& e : lexicon.entries()) names_.push_back("lex:" + e.feature_name);
  for (const char* p : {"comma", "colon", "semicolon", "question", "exclamation"}) {
    names_.push_back(std::string("punct:") + p);
  }
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<std::size_t> digits(n, 0);
    while (true) {
      std::string name = "pos:";
      for (std::size_t i = 0; i < n; ++i) {
        if (i) name += '+';
        name += pos_name(kContentOrder[digits[i]]);
      }
      names_.push_back(std::move(name));
      std::size_t k = n;
      while (k > 0 && ++digits[k - 1] == kContentOrder.size()) {
        digits[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  for (const char* v : {"tense_past", "tense_present", "tense_future", "person_1",
                        "person_2", "person_3", "mood_indicative",
                        "mood_imperative"}) {
    names_.push_back(std::string("verb:") + v);
  }

  std::string joined;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw ValidationError("duplicate feature name '" + names_[i] + "'");
    }
    joined += names_[i];
    joined += '\n';
  }
  id_ = sha256_hex(joined).substr(0, 16);
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool FeatureSchema::matches(const MarkerLexicon& lexicon) const {
  if (lexicon.size() != lexical_size_) return false;
  for (std::size_t i = 0; i < lexical_size_; ++i) {
    if (names_[i] != "lex:" + lexicon.entries()[i].feature_name) return false;
  }
  return true;
}

json FeatureSchema::to_json() const {
  return {{"schema_id", id_},
          {"dimension", dimension()},
          {"blocks",
           {{"lexical", lexical_size_},
            {"punct", kPunctBlock},
            {"posgram", kPosgramBlock},
            {"verb", kVerbBlock}}},
          {"names", names_}};
}

// ---------------------------------------------------------------------------

FeatureVector::FeatureVector(
    std::string schema_id,
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries)
    : schema_id_(std::move(schema_id)), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  std::erase_if(entries_, [](const auto& e) { return e.second == 0; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first == entries_[i - 1].first) {
      throw std::invalid_argument("duplicate feature index " +
                                  std::to_string(entries_[i].first));
    }
  }
}

std::uint32_t FeatureVector::count(std::size_t index) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const auto& e, std::size_t i) { return e.first < i; });
  return (it != entries_.end() && it->first == index) ? it->second : 0;
}

// ---------------------------------------------------------------------------

std::vector<std::uint32_t> extract_lexical(const std::vector<std::string>& tokens,
                                           const MarkerLexicon& lexicon) {
  std::vector<std::string> lower;
  lower.reserve(tokens.size());
  for (const auto& t : tokens) lower.push_back(utf8::to_lower(t));

  std::vector<std::uint32_t> counts(lexicon.size(), 0);
  for (std::size_t e = 0; e < lexicon.size(); ++e) {
    const auto& phrase = lexicon.entries()[e].phrase;
    std::size_t i = 0;
    while (i + phrase.size() <= lower.size()) {
      if (std::equal(phrase.begin(), phrase.end(), lower.begin() + i)) {
        ++counts[e];
        i += phrase.size();
      } else {
        ++i;
      }
    }
  }
  return counts;
}

std::array<std::uint32_t, kPunctBlock> extract_punct(
    const std::vector<std::string>& tokens) {
  std::array<std::uint32_t, kPunctBlock> counts{};
  for (const auto& t : tokens) {
    if (t == ",") ++counts[0];
    else if (t == ":") ++counts[1];
    else if (t == ";") ++counts[2];
    else if (t == "?") ++counts[3];
    else if (t == "!") ++counts[4];
  }
  return counts;
}

std::vector<std::uint32_t> extract_morphosyntactic(const std::vector<PosTag>& tags) {
  std::vector<std::uint32_t> counts(kMorphosyntacticBlock, 0);
  std::vector<Pos> content;
  for (const auto& t : tags) {
    if (t.pos != Pos::kOther) content.push_back(t.pos);
  }
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t i = 0; i + n <= content.size(); ++i) {
      const std::vector<Pos> gram(content.begin() + i, content.begin() + i + n);
      ++counts[posgram_index(gram)];
    }
  }
  auto* verb = counts.data() + kPosgramBlock;
  for (const auto& t : tags) {
    if (t.pos != Pos::kVerb) continue;
    if (t.tense) ++verb[static_cast<int>(*t.tense)];
    if (t.person) ++verb[3 + (*t.person - 1)];
    if (t.mood) ++verb[6 + static_cast<int>(*t.mood)];
  }
  return counts;
}

FeatureVector featurize(const std::vector<std::string>& tokens,
                        const FeatureSchema& schema, const MarkerLexicon& lexicon,
                        const PosTagger& tagger, FeaturizeOptions options) {
  if (!schema.matches(lexicon)) {
    throw ValidationError("feature schema " + schema.id() +
                          " was not built from this marker lexicon");
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  auto push = [&](std::size_t index, std::uint32_t c) {
    if (c == 0) return;
    entries.emplace_back(static_cast<std::uint32_t>(index),
                         options.binary ? 1u : c);
  };

  const auto lexical = extract_lexical(tokens, lexicon);
  for (std::size_t i = 0; i < lexical.size(); ++i) push(i, lexical[i]);
  const auto punct = extract_punct(tokens);
  for (std::size_t i = 0; i < punct.size(); ++i) push(schema.punct_offset() + i, punct[i]);

  const auto tags = tagger.tag(tokens);
  if (tags.size() != tokens.size()) {
    throw ValidationError("tagger returned " + std::to_string(tags.size()) +
                          " tags for " + std::to_string(tokens.size()) + " tokens");
  }
  const auto morph = extract_morphosyntactic(tags);
  for (std::size_t i = 0; i < morph.size(); ++i) {
    push(schema.posgram_offset() + i, morph[i]);
  }
  return FeatureVector(schema.id(), std::move(entries));
}

std::string format_sparse_row(std::string_view id, const FeatureVector& vector) {
  std::string out(id);
  for (const auto& [index, count] : vector.entries()) {
    out += ' ';
    out += std::to_string(index);
    out += ':';
    out += std::to_string(count);
  }
  return out;
}

std::vector<SparseRow> parse_sparse_rows(std::string_view text,
                                         const FeatureSchema& schema) {
  std::vector<SparseRow> rows;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = split(lines[ln], ' ');
    auto bad = [&](const std::string& why) {
      return ValidationError("feature row " + std::to_string(ln + 1) + ": " + why);
    };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto& field = fields[f];
      const auto colon = field.find(':');
      if (colon == std::string::npos) throw bad("expected index:count, got '" + field + "'");
      std::uint32_t index = 0, count = 0;
      const auto* b = field.data();
      auto r1 = std::from_chars(b, b + colon, index);
      auto r2 = std::from_chars(b + colon + 1, b + field.size(), count);
      if (r1.ec != std::errc() || r1.ptr != b + colon || r2.ec != std::errc() ||
          r2.ptr != b + field.size()) {
        throw bad("expected index:count, got '" + field + "'");
      }
      if (index >= schema.dimension()) {
        throw bad("index " + std::to_string(index) + " outside schema dimension");
      }
      entries.emplace_back(index, count);
    }
    rows.push_back({fields[0], FeatureVector(schema.id(), std::move(entries))});
  }
  return rows;
}

}  // namespace argforge::features
