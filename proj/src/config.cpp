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

#include "argforge/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "argforge/utf8.hpp"

namespace argforge::config {

namespace {

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        const std::string key = parse_key();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        if (table->contains(key)) fail("duplicate key '" + key + "'");
        (*table)[key] = parse_value();
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ValidationError("config line " + std::to_string(line_) + ": " + message);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  char take() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    take();
  }

  void skip_inline_space() {
    while (peek() == ' ' || peek() == '\t') take();
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') take();
    }
  }
  // Whitespace, newlines and comments.
  void skip_blank_lines() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') take();
      else break;
    }
  }
  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (peek() == '\r') take();
    if (!at_end() && peek() != '\n') fail("unexpected text after value");
  }

  static bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_key() {
    if (peek() == '"') return parse_basic_string();
    std::string key;
    while (bare_key_char(peek())) key.push_back(take());
    if (key.empty()) fail("expected a key");
    return key;
  }

  json& open_table(json& root) {
    expect('[');
    if (peek() == '[') fail("arrays of tables are not supported");
    json* table = &root;
    std::string path;
    while (true) {
      skip_inline_space();
      const std::string part = parse_key();
      path += (path.empty() ? "" : ".") + part;
      skip_inline_space();
      json& next = (*table)[part];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("'" + part + "' is not a table");
      table = &next;
      if (peek() == '.') {
        take();
        continue;
      }
      break;
    }
    expect(']');
    if (!defined_.insert(path).second) fail("table [" + path + "] defined twice");
    return *table;
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = take();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = take();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'u': {
          if (pos_ + 4 > text_.size()) fail("short \\u escape");
          unsigned code = 0;
          const auto* first = text_.data() + pos_;
          const auto [ptr, ec] = std::from_chars(first, first + 4, code, 16);
          if (ec != std::errc() || ptr != first + 4) fail("bad \\u escape");
          pos_ += 4;
          utf8::append(out, static_cast<char32_t>(code));
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = take();
      if (c == '\'') break;
      out.push_back(c);
    }
    return out;
  }

  json parse_array() {
    expect('[');
    json out = json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        take();
        return out;
      }
      out.push_back(parse_value());
      skip_blank_lines();
      if (peek() == ',') {
        take();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_number() {
    std::string token;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.' || c == '_') {
        if (c != '_') token.push_back(c);
        take();
      } else {
        break;
      }
    }
    if (token.empty()) fail("expected a value");
    const char* first = token.data();
    const char* last = first + token.size();
    if (*first == '+') ++first;
    if (token.find_first_of(".eE") == std::string::npos) {
      std::int64_t value = 0;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec == std::errc() && ptr == last) return value;
    } else {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec == std::errc() && ptr == last && std::isfinite(value)) return value;
    }
    fail("bad value '" + token + "'");
  }

  std::string_view text_;
  std::set<std::string> defined_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

// Typed access with a section-qualified error message.
class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (name_.empty()) {
      node_ = &doc;
    } else if (doc.contains(name_)) {
      node_ = &doc.at(name_);
      if (!node_->is_object()) throw ValidationError("config: [" + name_ + "] must be a table");
    }
  }

  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  template <typename T>
  void get(const std::string& key, T* out) {
    used_.insert(key);
    if (!has(key)) return;
    try {
      *out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError("config: bad type for " + where(key));
    }
  }

  void get_path(const std::string& key, const std::filesystem::path& base,
                std::filesystem::path* out) {
    std::string value;
    get(key, &value);
    if (!value.empty()) *out = base / value;
  }

  std::string where(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

  // Unknown keys are rejected to catch typos.
  void finish(const std::set<std::string>& subtables = {}) const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!used_.contains(key) && !subtables.contains(key)) {
        throw ValidationError("config: unknown key " + where(key));
      }
    }
  }

 private:
  const json* node_ = nullptr;
  std::string name_;
  std::set<std::string> used_;
};

}  // namespace

json parse_toml(std::string_view text) { return TomlParser(text).parse(); }

void PipelineConfig::validate() const {
  if (out_dir.empty()) throw ValidationError("config: out_dir is required");
  for (const auto& [key, path] :
       {std::pair{"paths.labeled_corpus", &labeled_corpus},
        std::pair{"paths.documents", &documents}, std::pair{"paths.abbreviations", &abbreviations},
        std::pair{"paths.markers", &markers}, std::pair{"paths.prompts", &prompts}}) {
    if (path->empty()) throw ValidationError(std::string("config: ") + key + " is required");
  }
  if (label_map.empty()) throw ValidationError("config: [label_map] is empty");
  if (!(lower_frac >= 0.0 && upper_frac >= 0.0 && lower_frac + upper_frac < 1.0)) {
    throw ValidationError("config: filter fractions must be >= 0 and sum below 1");
  }
  base.validate();
  if (grid_trees.empty() || grid_depths.empty()) {
    throw ValidationError("config: hyperparameter grid is empty");
  }
  for (int t : grid_trees) {
    if (t < 1) throw ValidationError("config: grid tree counts must be >= 1");
  }
  for (int d : grid_depths) {
    if (d < 1) throw ValidationError("config: grid depths must be >= 1");
  }
  if (outer_k < 2 || inner_k < 2) throw ValidationError("config: CV k values must be >= 2");
  if (scorer != "gbdt" && scorer != "process" && scorer != "http") {
    throw ValidationError("config: classify.scorer must be gbdt, process or http");
  }
  if (scorer == "process" && scorer_command.empty()) {
    throw ValidationError("config: classify.command is required for the process scorer");
  }
  if (scorer == "http" && scorer_url.empty()) {
    throw ValidationError("config: classify.url is required for the http scorer");
  }
  if (const auto* f = std::get_if<selection::Fraction>(&size)) {
    if (!(f->value > 0.0 && f->value <= 1.0)) {
      throw ValidationError("config: select.fraction must be in (0, 1]");
    }
  } else if (std::get<selection::Count>(size).value == 0) {
    throw ValidationError("config: select.count must be >= 1");
  }
  if (lm_order < 1) throw ValidationError("config: lm.order must be >= 1");
  if (!(lm_discount > 0.0 && lm_discount < 1.0)) {
    throw ValidationError("config: lm.discount must be in (0, 1)");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ValidationError("config: lm.validation_fraction must be in [0, 1)");
  }
  sampler.validate();
  std::set<std::string> ids{"selected"};
  if (baseline) ids.insert("baseline");
  for (const auto& g : external_generators) {
    if (!ids.insert(g.model_id).second) {
      throw ValidationError("config: duplicate generator id '" + g.model_id + "'");
    }
  }
  if (ids.size() < 2) {
    throw ValidationError("config: blind evaluation needs at least two generators");
  }
  if (quorum == 0 || quorum > n_annotators || 2 * quorum <= n_annotators) {
    throw ValidationError("config: annotation.quorum must be a strict majority");
  }
}

namespace {

std::string target_name(corpus::LabelTarget t) {
  switch (t) {
    case corpus::LabelTarget::kPremise: return "premise";
    case corpus::LabelTarget::kNonPremise: return "non_premise";
    case corpus::LabelTarget::kExclude: return "exclude";
  }
  return "exclude";
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.empty() ? std::string() : p.lexically_relative(base).generic_string();
}

}  // namespace

json PipelineConfig::to_json() const {
  json label_rules = json::object();
  for (const auto& r : label_map) label_rules[r.source_label] = target_name(r.target);
  json external = json::array();
  for (const auto& g : external_generators) external.push_back(g.model_id + "@" + g.url);
  json select = {{"connective", connective}};
  if (const auto* f = std::get_if<selection::Fraction>(&size)) {
    select["fraction"] = f->value;
  } else {
    select["count"] = std::get<selection::Count>(size).value;
  }
  return {
      {"seed", seed},
      {"paths",
       {{"labeled_corpus", relative_to(labeled_corpus, config_dir)},
        {"documents", relative_to(documents, config_dir)},
        {"abbreviations", relative_to(abbreviations, config_dir)},
        {"markers", relative_to(markers, config_dir)},
        {"pos_lexicon", relative_to(pos_lexicon, config_dir)},
        {"prompts", relative_to(prompts, config_dir)},
        {"labels", labels ? relative_to(*labels, config_dir) : std::string()}}},
      {"label_map", label_rules},
      {"preprocess", {{"lower_frac", lower_frac}, {"upper_frac", upper_frac}}},
      {"features",
       {{"binary", binary},
        {"suffix_heuristics", suffix_heuristics},
        {"tagger_command", tagger_command}}},
      {"classifier",
       {{"learning_rate", base.learning_rate},
        {"min_samples_leaf", base.min_samples_leaf},
        {"l2_leaf_reg", base.l2_leaf_reg},
        {"grid_trees", grid_trees},
        {"grid_depths", grid_depths},
        {"outer_k", outer_k},
        {"inner_k", inner_k}}},
      {"classify", {{"scorer", scorer}, {"command", scorer_command}, {"url", scorer_url}}},
      {"select", select},
      {"lm",
       {{"order", lm_order},
        {"discount", lm_discount},
        {"validation_fraction", validation_fraction},
        {"baseline", baseline}}},
      {"generate",
       {{"top_k", sampler.top_k},
        {"top_p", sampler.top_p},
        {"num_samples", sampler.num_samples},
        {"max_tokens", sampler.max_tokens},
        {"external", external}}},
      {"annotation", {{"annotators", n_annotators}, {"quorum", quorum}}}};
}

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& config_dir) {
  if (!doc.is_object()) throw ValidationError("config: top level must be a table");
  PipelineConfig c;
  c.config_dir = config_dir;

  Section top(doc, "");
  std::int64_t seed = 0;
  top.get("seed", &seed);
  if (seed < 0) throw ValidationError("config: seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  top.get_path("out_dir", config_dir, &c.out_dir);
  top.finish({"paths", "label_map", "preprocess", "features", "classifier", "classify",
              "select", "lm", "generate", "annotation"});

  Section paths(doc, "paths");
  paths.get_path("labeled_corpus", config_dir, &c.labeled_corpus);
  paths.get_path("documents", config_dir, &c.documents);
  paths.get_path("abbreviations", config_dir, &c.abbreviations);
  paths.get_path("markers", config_dir, &c.markers);
  paths.get_path("pos_lexicon", config_dir, &c.pos_lexicon);
  paths.get_path("prompts", config_dir, &c.prompts);
  std::filesystem::path labels;
  paths.get_path("labels", config_dir, &labels);
  if (!labels.empty()) c.labels = labels;
  paths.finish();

  if (doc.contains("label_map")) {
    const auto& rules = doc.at("label_map");
    if (!rules.is_object()) throw ValidationError("config: [label_map] must be a table");
    for (const auto& [source, target] : rules.items()) {
      if (!target.is_string()) {
        throw ValidationError("config: label_map." + source + " must be a string");
      }
      c.label_map.push_back({source, corpus::parse_label_target(target.get<std::string>())});
    }
  }

  Section pre(doc, "preprocess");
  pre.get("lower_frac", &c.lower_frac);
  pre.get("upper_frac", &c.upper_frac);
  pre.finish();

  Section feat(doc, "features");
  feat.get("binary", &c.binary);
  feat.get("suffix_heuristics", &c.suffix_heuristics);
  feat.get("tagger_command", &c.tagger_command);
  feat.finish();

  Section cls(doc, "classifier");
  cls.get("learning_rate", &c.base.learning_rate);
  cls.get("min_samples_leaf", &c.base.min_samples_leaf);
  cls.get("l2_leaf_reg", &c.base.l2_leaf_reg);
  cls.get("grid_trees", &c.grid_trees);
  cls.get("grid_depths", &c.grid_depths);
  cls.get("outer_k", &c.outer_k);
  cls.get("inner_k", &c.inner_k);
  cls.finish();
  c.base.n_trees = c.grid_trees.empty() ? c.base.n_trees : c.grid_trees.front();
  c.base.max_depth = c.grid_depths.empty() ? c.base.max_depth : c.grid_depths.front();

  Section classify(doc, "classify");
  classify.get("scorer", &c.scorer);
  classify.get("command", &c.scorer_command);
  classify.get("url", &c.scorer_url);
  classify.finish();

  Section select(doc, "select");
  if (select.has("count") && select.has("fraction")) {
    throw ValidationError("config: set only one of select.count and select.fraction");
  }
  if (select.has("fraction")) {
    double f = 0.0;
    select.get("fraction", &f);
    c.size = selection::Fraction{f};
  } else {
    std::int64_t n = 3500;
    select.get("count", &n);
    if (n < 1) throw ValidationError("config: select.count must be >= 1");
    c.size = selection::Count{static_cast<std::size_t>(n)};
  }
  select.get("connective", &c.connective);
  select.finish();

  Section lm(doc, "lm");
  lm.get("order", &c.lm_order);
  lm.get("discount", &c.lm_discount);
  lm.get("validation_fraction", &c.validation_fraction);
  lm.get("baseline", &c.baseline);
  lm.finish();

  Section gen(doc, "generate");
  gen.get("top_k", &c.sampler.top_k);
  gen.get("top_p", &c.sampler.top_p);
  gen.get("num_samples", &c.sampler.num_samples);
  gen.get("max_tokens", &c.sampler.max_tokens);
  std::vector<std::string> external;
  gen.get("external", &external);
  for (const auto& spec : external) {
    const auto at = spec.find('@');
    if (at == std::string::npos || at == 0 || at + 1 == spec.size()) {
      throw ValidationError("config: generate.external entries look like 'id@http://host:port'");
    }
    c.external_generators.push_back({spec.substr(0, at), spec.substr(at + 1)});
  }
  gen.finish();

  Section ann(doc, "annotation");
  ann.get("annotators", &c.n_annotators);
  ann.get("quorum", &c.quorum);
  ann.finish();

  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  auto dir = std::filesystem::absolute(path).parent_path();
  auto config = config_from_json(parse_toml(text), dir.lexically_normal());
  for (const auto* p : {&config.labeled_corpus, &config.documents, &config.abbreviations,
                        &config.markers, &config.prompts}) {
    if (!std::filesystem::exists(*p)) throw MissingInputError(*p);
  }
  if (!config.pos_lexicon.empty() && !std::filesystem::exists(config.pos_lexicon)) {
    throw MissingInputError(config.pos_lexicon);
  }
  return config;
}

}  // namespace argforge::config
