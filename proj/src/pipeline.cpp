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

#include "argforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "argforge/corpus.hpp"
#include "argforge/evaluation.hpp"
#include "argforge/features.hpp"
#include "argforge/gbdt.hpp"
#include "argforge/generator.hpp"
#include "argforge/ngram.hpp"
#include "argforge/rng.hpp"
#include "argforge/scorer.hpp"
#include "argforge/selection.hpp"
#include "argforge/utf8.hpp"

namespace argforge::pipeline {

namespace fs = std::filesystem;
using config::PipelineConfig;

namespace {

// Tracks one stage's inputs and outputs and writes its manifest.
class Stage {
 public:
  Stage(const PipelineConfig& config, std::string name)
      : config_(config), name_(std::move(name)), seed_(stage_seed(config, name_)) {}

  std::uint64_t seed() const { return seed_; }
  const PipelineConfig& config() const { return config_; }

  // An artifact produced by an earlier stage.
  fs::path input(std::string_view rel) {
    const fs::path p = config_.out_dir / rel;
    record(&inputs_, p, "out", std::string(rel));
    return p;
  }

  // A file named by the config.
  fs::path external(const fs::path& p) {
    record(&inputs_, p, "config", p.lexically_relative(config_.config_dir).generic_string());
    return p;
  }

  void write(std::string_view rel, std::string_view contents) {
    const fs::path p = config_.out_dir / rel;
    write_file_atomic(p, contents);
    outputs_.push_back({{"path", std::string(rel)}, {"sha256", sha256_hex(contents)}});
  }

  void finish(json params) {
    json manifest = {{"stage", name_},
                     {"seed", seed_},
                     {"params", std::move(params)},
                     {"inputs", inputs_},
                     {"outputs", outputs_}};
    write_file_atomic(config_.out_dir / paths::kManifestDir / (name_ + ".json"),
                      manifest.dump(2) + "\n");
  }

 private:
  static void record(json* list, const fs::path& p, const char* root, std::string rel) {
    if (!fs::exists(p)) throw MissingInputError(p);
    list->push_back({{"path", std::move(rel)}, {"root", root}, {"sha256", sha256_file(p)}});
  }

  const PipelineConfig& config_;
  std::string name_;
  std::uint64_t seed_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

std::string dump_line(const json& j) { return j.dump() + "\n"; }

std::unique_ptr<features::PosTagger> make_tagger(Stage& stage) {
  const auto& c = stage.config();
  if (!c.tagger_command.empty()) {
    return std::make_unique<features::ExternalTagger>(c.tagger_command);
  }
  if (c.pos_lexicon.empty()) {
    return std::make_unique<features::LexiconTagger>(c.suffix_heuristics);
  }
  return std::make_unique<features::LexiconTagger>(
      features::LexiconTagger::load(stage.external(c.pos_lexicon), c.suffix_heuristics));
}

// Labeled examples joined from the sparse rows and the corpus gold labels.
std::vector<gbdt::Example> load_examples(Stage& stage) {
  const auto& c = stage.config();
  const auto lexicon = features::MarkerLexicon::load(stage.external(c.markers));
  const features::FeatureSchema schema(lexicon);
  const auto schema_path = stage.input(paths::kSchema);
  if (json::parse(read_file(schema_path)).at("schema_id") != schema.id()) {
    throw ValidationError("feature schema changed since featurize; rerun featurize");
  }
  const auto sentences = corpus::load_sentences(stage.input(paths::kLabeledCorpus));
  auto rows = features::parse_sparse_rows(read_file(stage.input(paths::kLabeledFeatures)),
                                          schema);
  if (rows.size() != sentences.size()) {
    throw ValidationError("labeled features and corpus have different lengths");
  }
  std::vector<gbdt::Example> examples;
  examples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].id != sentences[i].id) {
      throw ValidationError("feature row '" + rows[i].id + "' does not match sentence '" +
                            sentences[i].id + "'");
    }
    if (!sentences[i].gold_label) {
      throw ValidationError("sentence '" + sentences[i].id + "' has no gold label");
    }
    examples.push_back({std::move(rows[i].vector),
                        *sentences[i].gold_label == corpus::Label::kPremise ? 1 : 0});
  }
  return examples;
}

std::vector<gbdt::TrainConfig> grid_of(const PipelineConfig& c) {
  return evaluation::make_grid(c.grid_trees, c.grid_depths, c.base);
}

// ---------------------------------------------------------------------------

void ingest(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto labeled = corpus::load_labeled_corpus(stage.external(c.labeled_corpus), c.label_map);
  const auto abbrevs = corpus::load_abbreviations(stage.external(c.abbreviations));
  const auto documents = corpus::load_documents(stage.external(c.documents));

  std::vector<corpus::Sentence> segmented;
  for (const auto& d : documents) {
    for (auto& s : corpus::segment(d, abbrevs)) segmented.push_back(std::move(s));
  }
  const auto filtered = corpus::length_filter(segmented, c.lower_frac, c.upper_frac);
  const auto news = corpus::dedup(filtered);

  stage.write(paths::kLabeledCorpus, corpus::write_sentences_jsonl(labeled.sentences));
  stage.write(paths::kNewsCorpus, corpus::write_sentences_jsonl(news));
  const json stats = {
      {"labeled",
       {{"premise", labeled.premise_count},
        {"non_premise", labeled.non_premise_count},
        {"excluded", labeled.excluded_count}}},
      {"news",
       {{"documents", documents.size()},
        {"segmented", segmented.size()},
        {"after_length_filter", filtered.size()},
        {"after_dedup", news.size()}}}};
  stage.write(paths::kIngestStats, stats.dump(2) + "\n");
  stage.finish({{"label_map", c.to_json().at("label_map")},
                {"preprocess", c.to_json().at("preprocess")}});
  log << "ingest: " << labeled.sentences.size() << " labeled sentences ("
      << labeled.premise_count << " premise, " << labeled.non_premise_count
      << " non-premise, " << labeled.excluded_count << " excluded); " << news.size()
      << " news sentences from " << documents.size() << " documents\n";
}

void featurize(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto lexicon = features::MarkerLexicon::load(stage.external(c.markers));
  const features::FeatureSchema schema(lexicon);
  const auto tagger = make_tagger(stage);
  const features::FeaturizeOptions options{c.binary};

  for (const auto& [in, out] : {std::pair{paths::kLabeledCorpus, paths::kLabeledFeatures},
                                std::pair{paths::kNewsCorpus, paths::kNewsFeatures}}) {
    const auto sentences = corpus::load_sentences(stage.input(in));
    std::string rows;
    for (const auto& s : sentences) {
      rows += features::format_sparse_row(
          s.id, features::featurize(s, schema, lexicon, *tagger, options));
      rows += '\n';
    }
    stage.write(out, rows);
  }
  stage.write(paths::kSchema, schema.to_json().dump(2) + "\n");
  stage.finish(c.to_json().at("features"));
  log << "featurize: schema " << schema.id() << " with " << schema.dimension()
      << " features (" << schema.lexical_size() << " lexical)\n";
}

void train(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto examples = load_examples(stage);
  const auto grid = grid_of(c);
  const auto search = evaluation::nested_grid_search(examples, grid, c.inner_k, stage.seed());
  const auto result = gbdt::train_gbdt_traced(examples, search.best);

  stage.write(paths::kClassifier, result.model.serialize());
  json summary = {{"chosen", search.best.to_json()},
                  {"grid", json::array()},
                  {"inner_k", c.inner_k},
                  {"examples", examples.size()},
                  {"loss_history", result.loss_history}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json entry = grid[i].to_json();
    if (!search.mean_f1.empty()) entry["mean_inner_macro_f1"] = search.mean_f1[i];
    summary["grid"].push_back(entry);
  }
  stage.write(paths::kTrainingSummary, summary.dump(2) + "\n");
  stage.finish(c.to_json().at("classifier"));
  log << "train: " << search.best.n_trees << " trees, depth " << search.best.max_depth
      << ", final training loss " << result.loss_history.back() << "\n";
}

void cv_report(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto examples = load_examples(stage);
  const auto report =
      evaluation::cross_validate(examples, grid_of(c), c.outer_k, c.inner_k, stage.seed());
  stage.write(paths::kCvReport, report.to_json().dump(2) + "\n");
  stage.finish(c.to_json().at("classifier"));
  log << "cv-report: macro F1 " << report.macro_f1.mean << " ± " << report.macro_f1.std
      << ", accuracy " << report.accuracy.mean << " ± " << report.accuracy.std << "\n";
}

void classify(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto sentences = corpus::load_sentences(stage.input(paths::kNewsCorpus));
  std::vector<double> scores;
  if (c.scorer == "gbdt") {
    const features::FeatureSchema schema(
        features::MarkerLexicon::load(stage.external(c.markers)));
    const auto model = gbdt::TreeEnsemble::deserialize(read_file(stage.input(paths::kClassifier)));
    if (model.schema_id() != schema.id()) {
      throw ValidationError("classifier was trained on a different feature schema");
    }
    const auto rows =
        features::parse_sparse_rows(read_file(stage.input(paths::kNewsFeatures)), schema);
    if (rows.size() != sentences.size()) {
      throw ValidationError("news features and corpus have different lengths");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].id != sentences[i].id) {
        throw ValidationError("feature row '" + rows[i].id + "' does not match sentence '" +
                              sentences[i].id + "'");
      }
      scores.push_back(model.predict_proba(rows[i].vector));
    }
  } else if (c.scorer == "process") {
    scores = scoring::ProcessScorer(c.scorer_command).score(sentences);
  } else {
    scores = scoring::HttpScorer(c.scorer_url).score(sentences);
  }
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out += dump_line({{"id", sentences[i].id}, {"score", scores[i]}});
  }
  stage.write(paths::kScores, out);
  stage.finish(c.to_json().at("classify"));
  log << "classify: scored " << sentences.size() << " sentences with the " << c.scorer
      << " scorer\n";
}

void select(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto sentences = corpus::load_sentences(stage.input(paths::kNewsCorpus));
  std::vector<double> scores;
  std::size_t i = 0;
  for_each_jsonl(stage.input(paths::kScores), [&](const json& j, std::size_t line) {
    if (i >= sentences.size() || j.at("id") != sentences[i].id) {
      throw ValidationError("scores line " + std::to_string(line) +
                            " does not match the news corpus");
    }
    scores.push_back(j.at("score").get<double>());
    ++i;
  });
  if (scores.size() != sentences.size()) {
    throw ValidationError("scores file is shorter than the news corpus");
  }
  const auto ranked = selection::rank(sentences, scores);
  const auto chosen = selection::rank_and_select(ranked, c.size);

  std::string selected, lines;
  for (const auto& s : chosen) {
    selected += dump_line(selection::scored_to_json(s));
    lines += selection::make_training_line(s.text, c.connective) + "\n";
  }
  stage.write(paths::kSelected, selected);
  stage.write(paths::kTrainingLines, lines);
  stage.finish(c.to_json().at("select"));
  log << "select: kept " << chosen.size() << " of " << ranked.size() << " sentences\n";
}

std::vector<std::vector<std::string>> tokenize_lines(const std::vector<std::string>& lines) {
  std::vector<std::vector<std::string>> out;
  for (const auto& l : lines) {
    if (!utf8::trim(l).empty()) out.push_back(corpus::tokenize(l));
  }
  return out;
}

void train_lm(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  auto lines = tokenize_lines(split_lines(read_file(stage.input(paths::kTrainingLines))));
  Rng rng(stage.seed());
  rng.shuffle(lines);
  const auto n_valid =
      static_cast<std::size_t>(std::floor(c.validation_fraction * static_cast<double>(lines.size())));
  if (lines.size() - n_valid < 1) throw ValidationError("no training lines for the LM");
  const std::vector<std::vector<std::string>> valid(lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(n_valid));
  const std::vector<std::vector<std::string>> train_part(lines.begin() + static_cast<std::ptrdiff_t>(n_valid), lines.end());

  const auto model = lm::NgramModel::train(train_part, c.lm_order, c.lm_discount);
  stage.write(paths::kSelectedLm, model.serialize());
  json ppl = {{"selected",
               {{"train_lines", train_part.size()},
                {"validation_lines", valid.size()},
                {"train_perplexity", lm::perplexity(model, train_part)}}}};
  if (!valid.empty()) ppl["selected"]["validation_perplexity"] = lm::perplexity(model, valid);
  ppl["published_reference"] = {{"validation_perplexity", 9.66}};

  if (c.baseline) {
    std::vector<std::vector<std::string>> news;
    for (auto& s : corpus::load_sentences(stage.input(paths::kNewsCorpus))) {
      news.push_back(std::move(s.tokens));
    }
    const auto baseline = lm::NgramModel::train(news, c.lm_order, c.lm_discount);
    stage.write(paths::kBaselineLm, baseline.serialize());
    ppl["baseline"] = {{"train_lines", news.size()},
                       {"train_perplexity", lm::perplexity(baseline, news)}};
    if (!valid.empty()) {
      ppl["baseline"]["selected_validation_perplexity"] = lm::perplexity(baseline, valid);
    }
  }
  stage.write(paths::kPerplexity, ppl.dump(2) + "\n");
  stage.finish(c.to_json().at("lm"));
  log << "train-lm: order " << c.lm_order << ", " << model.vocabulary().size()
      << " vocabulary entries";
  if (!valid.empty()) log << ", validation perplexity " << ppl["selected"]["validation_perplexity"];
  log << "\n";
}

void generate(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto claims = selection::load_prompts(stage.external(c.prompts));
  std::vector<std::unique_ptr<lm::NgramModel>> models;
  std::vector<std::unique_ptr<lm::Generator>> generators;
  auto add_ngram = [&](std::string id, std::string_view rel) {
    models.push_back(std::make_unique<lm::NgramModel>(
        lm::NgramModel::deserialize(read_file(stage.input(rel)))));
    generators.push_back(std::make_unique<lm::NgramGenerator>(std::move(id), *models.back()));
  };
  add_ngram("selected", paths::kSelectedLm);
  if (c.baseline) add_ngram("baseline", paths::kBaselineLm);
  for (const auto& g : c.external_generators) {
    generators.push_back(std::make_unique<lm::HttpGenerator>(g.model_id, g.url));
  }

  // One job per (generator, claim); each gets its own derived seed.
  std::vector<std::future<std::vector<lm::GeneratedCandidate>>> jobs;
  for (auto& gen : generators) {
    for (const auto& claim : claims) {
      lm::SamplerConfig sc = c.sampler;
      sc.seed = derive_seed(stage.seed(), gen->model_id() + "/" + claim.id);
      const std::string prompt = selection::make_prompt({claim.text, c.connective});
      jobs.push_back(std::async(std::launch::async, [&gen, id = claim.id, prompt, sc] {
        return gen->generate(id, prompt, sc);
      }));
    }
  }
  std::string out;
  std::size_t n = 0;
  for (auto& job : jobs) {
    for (const auto& cand : job.get()) {
      out += dump_line(lm::candidate_to_json(cand));
      ++n;
    }
  }
  stage.write(paths::kCandidates, out);
  stage.finish(c.to_json().at("generate"));
  log << "generate: " << n << " candidates from " << generators.size() << " generators x "
      << claims.size() << " prompts\n";
}

void build_tasks(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  std::map<std::string, std::string> claims;
  for (const auto& claim : selection::load_prompts(stage.external(c.prompts))) {
    claims[claim.id] = claim.text;
  }
  std::vector<lm::GeneratedCandidate> candidates;
  for_each_jsonl(stage.input(paths::kCandidates), [&](const json& j, std::size_t line) {
    try {
      candidates.push_back(lm::candidate_from_json(j));
    } catch (const json::exception& e) {
      throw ValidationError("candidates line " + std::to_string(line) + ": " + e.what());
    }
  });
  const auto tasks = annotation::build_blind_tasks(candidates, claims, stage.seed());
  std::string view, key;
  for (const auto& t : tasks) {
    view += dump_line(annotation::annotator_view(t));
    key += dump_line(annotation::key_record(t));
  }
  stage.write(paths::kTasks, view);
  stage.write(paths::kTaskKey, key);
  stage.finish(json::object());
  log << "build-tasks: " << tasks.size() << " blind tasks\n";
}

fs::path labels_path(Stage& stage) {
  const auto& c = stage.config();
  if (!c.labels) throw ValidationError("config: paths.labels is not set");
  return stage.external(*c.labels);
}

void vote(Stage& stage, std::ostream& log) {
  const auto& c = stage.config();
  const auto tasks = annotation::load_tasks(stage.input(paths::kTasks));
  const auto labels = annotation::parse_labels_tsv(read_file(labels_path(stage)));
  const auto votes = annotation::vote_all(tasks, labels, c.n_annotators, c.quorum);
  std::string out;
  std::size_t assigned = 0;
  for (const auto& v : votes) {
    out += dump_line(v.to_json());
    if (v.final_label) ++assigned;
  }
  stage.write(paths::kVotes, out);
  stage.finish(c.to_json().at("annotation"));
  log << "vote: " << assigned << " of " << votes.size() << " tasks assigned\n";
}

void agree(Stage& stage, std::ostream& log) {
  const auto labels = annotation::parse_labels_tsv(read_file(labels_path(stage)));
  const auto result = annotation::agreement_from_labels(labels);
  stage.write(paths::kAgreement, result.to_json().dump(2) + "\n");
  stage.finish(json::object());
  log << "agree: alpha " << result.alpha << " (" << result.band << ") over "
      << result.n_units_used << " units";
  if (result.degenerate) log << "; all labels identical, alpha pinned to 1";
  log << "\n";
}

void report(Stage& stage, std::ostream& log) {
  const auto votes = load_votes(stage.input(paths::kVotes));
  const auto key = annotation::load_task_key(stage.input(paths::kTaskKey));
  const auto agreement = json::parse(read_file(stage.input(paths::kAgreement)));
  const auto accuracy = annotation::model_accuracy(votes, key);
  json out = accuracy.to_json();
  out["agreement"] = {{"alpha", agreement.at("alpha")},
                      {"D_o", agreement.at("D_o")},
                      {"D_e", agreement.at("D_e")},
                      {"band", agreement.at("band")}};
  stage.write(paths::kGenerationReport, out.dump(2) + "\n");
  stage.finish(json::object());
  for (const auto& row : accuracy.models) {
    log << "report: " << row.model_id << " premise " << row.premise << " / "
        << annotation::format_percent(row.premise_rate()) << " of " << row.assigned()
        << " assigned\n";
  }
}

using StageFn = void (*)(Stage&, std::ostream&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
  static const std::vector<std::pair<std::string, StageFn>> table = {
      {"ingest", ingest},   {"featurize", featurize},     {"train", train},
      {"cv-report", cv_report}, {"classify", classify},   {"select", select},
      {"train-lm", train_lm}, {"generate", generate},     {"build-tasks", build_tasks},
      {"vote", vote},       {"agree", agree},             {"report", report}};
  return table;
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : stage_table()) out.push_back(name);
    return out;
  }();
  return names;
}

bool is_stage(std::string_view name) {
  const auto& names = stage_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::uint64_t stage_seed(const PipelineConfig& config, std::string_view stage) {
  return derive_seed(config.seed, stage);
}

void run_stage(std::string_view name, const PipelineConfig& config, std::ostream& log) {
  for (const auto& [stage_name, fn] : stage_table()) {
    if (stage_name == name) {
      Stage stage(config, stage_name);
      fn(stage, log);
      return;
    }
  }
  throw ValidationError("unknown stage '" + std::string(name) + "'");
}

void run_all(const PipelineConfig& config, std::ostream& log) {
  const bool have_labels = config.labels && fs::exists(*config.labels);
  json chain = json::array();
  for (const auto& name : stage_names()) {
    if (!have_labels && (name == "vote" || name == "agree" || name == "report")) {
      log << name << ": skipped, no labels file\n";
      continue;
    }
    run_stage(name, config, log);
    const auto manifest = config.out_dir / paths::kManifestDir / (name + ".json");
    chain.push_back({{"stage", name}, {"manifest_sha256", sha256_file(manifest)}});
  }
  write_file_atomic(config.out_dir / paths::kManifestDir / "run-all.json",
                    json{{"seed", config.seed}, {"stages", chain}}.dump(2) + "\n");
}

std::vector<annotation::VoteResult> load_votes(const fs::path& path) {
  std::vector<annotation::VoteResult> votes;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    try {
      annotation::VoteResult v;
      v.task_id = j.at("task_id").get<std::string>();
      const auto label = j.at("final_label").get<std::string>();
      if (label != "unassigned") v.final_label = corpus::parse_label(label);
      v.premise_votes = j.at("votes").at("premise").get<std::size_t>();
      v.non_premise_votes = j.at("votes").at("non_premise").get<std::size_t>();
      v.quorum = j.at("quorum").get<std::size_t>();
      votes.push_back(std::move(v));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line) +
                            ": bad vote record: " + e.what());
    }
  });
  return votes;
}

}  // namespace argforge::pipeline
