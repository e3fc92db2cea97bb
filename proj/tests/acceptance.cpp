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

// Acceptance gate: one PASS/FAIL line per criterion, with its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "annotation_fixtures.hpp"
#include "argforge/annotation.hpp"
#include "argforge/corpus.hpp"
#include "argforge/evaluation.hpp"
#include "argforge/features.hpp"
#include "argforge/gbdt.hpp"
#include "argforge/generator.hpp"
#include "argforge/ngram.hpp"
#include "argforge/pipeline.hpp"
#include "argforge/rng.hpp"
#include "argforge/sampler.hpp"
#include "argforge/selection.hpp"
#include "argforge/utf8.hpp"
#include "gbdt_fixtures.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace argforge;
namespace fs = std::filesystem;

namespace {

// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) failures_.push_back(what);
  }
  std::size_t total() const { return total_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t total_ = 0;
  std::vector<std::string> failures_;
};

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

// ---------------------------------------------------------------------------

void schema_arithmetic(Check& c) {
  auto lexicon = [](std::size_t n) {
    std::vector<features::MarkerEntry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      entries.push_back({{"маркер" + std::to_string(i)}, "m" + std::to_string(i)});
    }
    return features::MarkerLexicon(std::move(entries));
  };
  const features::FeatureSchema empty(lexicon(0));
  c.expect(empty.dimension() - empty.posgram_offset() == 783, "morphosyntactic block != 783");
  c.expect(empty.verb_offset() - empty.posgram_offset() == 775, "posgram block != 775");
  c.expect(empty.dimension() - empty.verb_offset() == 8, "verb block != 8");
  c.expect(empty.posgram_offset() - empty.punct_offset() == 5, "punctuation block != 5");
  const features::FeatureSchema big(lexicon(255));
  c.expect(big.dimension() == 1043, "255-entry lexicon total " + std::to_string(big.dimension()));
  const auto shipped = features::MarkerLexicon::load(testutil::kSourceDir / "data/markers_ru.tsv");
  c.expect(features::FeatureSchema(shipped).dimension() == shipped.size() + 788,
           "shipped lexicon dimension");
}

corpus::Sentence with_tokens(std::size_t n, std::size_t id) {
  corpus::Sentence s;
  s.id = "s" + std::to_string(id);
  s.text = s.id;
  s.tokens.assign(n, "w");
  return s;
}

void preprocessing(Check& c) {
  Rng rng(1000);
  for (std::size_t n : {1000u, 999u, 1001u, 10u, 9u}) {
    std::vector<corpus::Sentence> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(with_tokens(1 + rng.below(30), i));
    const auto tail = static_cast<std::size_t>(std::floor(0.1 * static_cast<double>(n) + 1e-9));
    // Stable length order; the first and last `tail` entries go.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return s[a].tokens.size() < s[b].tokens.size();
    });
    std::set<std::size_t> dropped(order.begin(), order.begin() + tail);
    dropped.insert(order.end() - tail, order.end());
    std::vector<std::string> expected;
    for (std::size_t i = 0; i < n; ++i) {
      if (!dropped.contains(i)) expected.push_back(s[i].id);
    }
    std::vector<std::string> got;
    for (const auto& k : corpus::length_filter(s, 0.1, 0.1)) got.push_back(k.id);
    c.expect(got == expected, "length_filter on N=" + std::to_string(n) + " kept " +
                                  std::to_string(got.size()) + ", expected " +
                                  std::to_string(expected.size()));
  }

  const std::vector<std::string> pool = {"Рубль укрепился.", "рубль укрепился.",
                                         "Рубль  укрепился.", "Ставки растут.", "Да."};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<corpus::Sentence> s;
    for (std::size_t i = 0; i < 1000; ++i) {
      corpus::Sentence x;
      x.id = std::to_string(i);
      x.text = pool[rng.below(pool.size())];
      s.push_back(x);
    }
    const auto once = corpus::dedup(s);
    const auto twice = corpus::dedup(once);
    std::vector<std::string> a, b;
    for (const auto& x : once) a.push_back(x.id);
    for (const auto& x : twice) b.push_back(x.id);
    c.expect(a == b, "dedup is not idempotent");
    std::set<std::string> texts;
    for (const auto& x : once) texts.insert(x.text);
    c.expect(texts.size() == once.size(), "dedup left a duplicate");
  }

  const std::vector<std::string> pieces = {
      "ставки", "Банки", "рост", "т.е.", "г.", "7.5", "Москва", "!", "?", ".", "...",
      ",", "  ", "\n", " ", "Ёлка", "abc", "Да.", "«Цитата.»", "(скобка)"};
  const corpus::AbbreviationSet abbrevs{"т.е.", "г."};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto n = 1 + rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i) {
      text += pieces[rng.below(pieces.size())];
      if (rng.below(2) == 0) text += " ";
    }
    const auto sentences = corpus::segment({"d", text, "test", std::nullopt}, abbrevs);
    std::string joined;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (i) joined += " ";
      joined += sentences[i].text;
    }
    c.expect(utf8::collapse_whitespace(joined) == utf8::collapse_whitespace(text),
             "segmentation lost text in document " + std::to_string(trial));
  }
}

// ---------------------------------------------------------------------------

std::optional<oracles::StumpChoice> trained_stump(const std::vector<std::vector<int>>& rows,
                                                  const std::vector<int>& labels) {
  std::vector<gbdt::Example> examples;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    examples.push_back(testfix::make_example(std::vector<double>(rows[i].begin(), rows[i].end()),
                                             labels[i] == 1));
  }
  gbdt::TrainConfig config;
  config.n_trees = 1;
  config.max_depth = 1;
  config.learning_rate = 1.0;
  const auto model = gbdt::train_gbdt(examples, config);
  const auto& root = model.trees().at(0).nodes().at(0);
  if (root.is_leaf()) return std::nullopt;
  return oracles::StumpChoice{root.feature, root.threshold};
}

bool stump_matches(const std::vector<std::vector<int>>& rows, const std::vector<int>& labels,
                   int n_features) {
  const int pos = std::accumulate(labels.begin(), labels.end(), 0);
  if (pos == 0 || pos == static_cast<int>(labels.size())) return true;  // rejected input
  return trained_stump(rows, labels) == oracles::stump_oracle(rows, labels, n_features);
}

void gbdt_criterion(Check& c) {
  const auto data = testfix::synthetic_dataset(500, 20, 42);
  gbdt::TrainConfig config;
  config.n_trees = 200;
  config.max_depth = 3;
  config.learning_rate = 0.3;
  const auto trace = gbdt::train_gbdt_traced(data, config);
  c.expect(trace.loss_history.size() == 201, "loss history length");
  for (std::size_t i = 1; i < trace.loss_history.size(); ++i) {
    c.expect(trace.loss_history[i] <= trace.loss_history[i - 1] + 1e-9,
             "loss rose at round " + std::to_string(i));
  }

  // Every multiset of up to 8 rows over 3 binary features with a binary
  // label (16 row types).
  std::size_t instances = 0;
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<std::size_t> counts(16, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t type, std::size_t left) {
      if (type == 15) {
        counts[15] = left;
        std::vector<std::vector<int>> rows;
        std::vector<int> labels;
        for (std::size_t t = 0; t < 16; ++t) {
          for (std::size_t k = 0; k < counts[t]; ++k) {
            rows.push_back({static_cast<int>(t & 1), static_cast<int>((t >> 1) & 1),
                            static_cast<int>((t >> 2) & 1)});
            labels.push_back(static_cast<int>((t >> 3) & 1));
          }
        }
        c.expect(stump_matches(rows, labels, 3), "stump differs from oracle");
        ++instances;
        return;
      }
      for (std::size_t k = 0; k <= left; ++k) {
        counts[type] = k;
        rec(type + 1, left - k);
      }
    };
    rec(0, n);
  }
  // Random instances up to 20 rows, 1 to 3 features, binary or count values.
  Rng rng(2026);
  for (int trial = 0; trial < 20000; ++trial) {
    const auto n = 2 + rng.below(19);
    const int d = 1 + static_cast<int>(rng.below(3));
    const bool counts = trial % 4 == 0;
    std::vector<std::vector<int>> rows(n, std::vector<int>(static_cast<std::size_t>(d)));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : rows[i]) v = static_cast<int>(rng.below(counts ? 4 : 2));
      labels[i] = static_cast<int>(rng.below(2));
    }
    c.expect(stump_matches(rows, labels, d), "random stump differs from oracle");
    ++instances;
  }
  c.expect(instances > 500000, "too few stump instances: " + std::to_string(instances));

  std::vector<gbdt::Example> line;
  for (int v = 0; v < 40; ++v) line.push_back(testfix::make_example({1.0 * v}, v >= 23));
  gbdt::TrainConfig sep;
  sep.n_trees = 50;
  sep.max_depth = 2;
  sep.learning_rate = 0.5;
  const auto model = gbdt::train_gbdt(line, sep);
  std::size_t correct = 0;
  for (const auto& e : line) correct += model.predict(e.x) == (e.label == 1);
  c.expect(correct == line.size(), "separable 1D accuracy " + std::to_string(correct) + "/40");
}

// ---------------------------------------------------------------------------

void cv_metrics(Check& c) {
  Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const auto n = static_cast<std::size_t>(2 * k) + rng.below(300);
    std::vector<int> labels(n);
    const double rate = 0.1 + 0.8 * rng.uniform();
    for (auto& y : labels) y = rng.uniform() < rate ? 1 : 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
      labels[i] = 1;
      labels[n - 1 - i] = 0;
    }
    const auto plan = evaluation::stratified_kfold(labels, k, rng.next());
    std::vector<int> seen(n, 0);
    for (int f = 0; f < k; ++f) {
      for (auto i : plan.test_indices(f)) ++seen[i];
    }
    c.expect(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }),
             "folds are not a partition");
    for (int cls : {0, 1}) {
      const double share = static_cast<double>(std::count(labels.begin(), labels.end(), cls)) / k;
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == cls) ++counts[static_cast<std::size_t>(plan.assignments[i])];
      }
      for (int cnt : counts) {
        c.expect(std::abs(cnt - share) <= 1.0, "fold class count off by more than 1");
      }
    }
  }

  const std::vector<int> pred = {1, 1, 1, 0, 0, 0};
  const std::vector<int> gold = {1, 1, 0, 1, 0, 0};
  const auto m = evaluation::compute_metrics(pred, gold);
  c.expect(std::abs(m.macro_f1 - 2.0 / 3.0) <= 1e-15, "macro F1 " + num(m.macro_f1));
  c.expect(m.accuracy == 4.0 / 6.0, "accuracy " + num(m.accuracy));

  // XOR of two features: only depth-2 trees fit it.
  std::vector<gbdt::Example> data;
  for (int rep = 0; rep < 12; ++rep) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        data.push_back(testfix::make_example({1.0 * a, 1.0 * b, 1.0 * (rep % 3)}, (a ^ b) == 1));
      }
    }
  }
  gbdt::TrainConfig stumps;
  stumps.n_trees = 30;
  stumps.max_depth = 1;
  stumps.learning_rate = 0.5;
  gbdt::TrainConfig deep = stumps;
  deep.max_depth = 2;
  gbdt::TrainConfig few = stumps;
  few.n_trees = 5;
  const std::vector<gbdt::TrainConfig> grid = {stumps, deep, few};
  const auto result = evaluation::nested_grid_search(data, grid, 4, 11);
  c.expect(result.best_index == 1, "grid search chose index " + std::to_string(result.best_index));
}

// ---------------------------------------------------------------------------

void sampler(Check& c) {
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    oracles::for_each_composition(n, 10, [&](const std::vector<long>& units) {
      std::vector<double> dist(n);
      for (std::size_t i = 0; i < n; ++i) dist[i] = static_cast<double>(units[i]) / 10.0;
      for (int k = 1; k <= 6; ++k) {
        for (long p = 1; p <= 10; ++p) {
          const auto expected = oracles::nucleus_oracle(units, k, p);
          const auto got = lm::nucleus(dist, k, static_cast<double>(p) / 10.0);
          long mass = 0;
          for (const auto& e : expected) mass += e.second;
          bool same = got.size() == expected.size();
          for (std::size_t i = 0; same && i < got.size(); ++i) {
            same = got[i].token == expected[i].first &&
                   std::abs(got[i].prob - static_cast<double>(expected[i].second) /
                                              static_cast<double>(mass)) <= 1e-12;
          }
          c.expect(same, "nucleus differs from oracle");
          ++cases;
        }
      }
    });
  }
  c.expect(cases > 100000, "too few nucleus cases");

  const std::vector<double> dist = {0.5, 0.3, 0.15, 0.05};
  const int draws = 100000;
  for (const auto& [k, p] : {std::pair{4, 1.0}, std::pair{3, 0.8}, std::pair{2, 1.0}}) {
    lm::SamplerConfig config;
    config.top_k = k;
    config.top_p = p;
    std::vector<double> expected(dist.size(), 0.0);
    for (const auto& e : lm::nucleus(dist, k, p)) expected[static_cast<std::size_t>(e.token)] = e.prob;
    std::vector<int> counts(dist.size(), 0);
    Rng rng(2026);
    for (int i = 0; i < draws; ++i) {
      ++counts[static_cast<std::size_t>(lm::sample_topk_topp(dist, config, rng))];
    }
    for (std::size_t t = 0; t < dist.size(); ++t) {
      const double mean = draws * expected[t];
      const double sigma = std::sqrt(draws * expected[t] * (1.0 - expected[t]));
      c.expect(std::abs(counts[t] - mean) <= 3.0 * sigma,
               "token " + std::to_string(t) + " drawn " + std::to_string(counts[t]) +
                   " times, expected " + num(mean));
    }
  }

  Rng gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(8);
    for (auto& x : d) x = gen.uniform();
    const double total = std::accumulate(d.begin(), d.end(), 0.0);
    for (auto& x : d) x /= total;
    const int argmax = static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
    lm::SamplerConfig config;
    config.top_k = 1;
    config.top_p = 0.1 + 0.9 * gen.uniform();
    Rng rng(static_cast<std::uint64_t>(trial));
    for (int i = 0; i < 20; ++i) {
      c.expect(lm::sample_topk_topp(d, config, rng) == argmax, "K=1 did not pick the argmax");
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::string>> fixture_lines() {
  std::vector<std::vector<std::string>> lines;
  for (const auto& line :
       split_lines(read_file(testutil::kSourceDir / "data/fixture/news_truth.jsonl"))) {
    if (line.empty()) continue;
    lines.push_back(corpus::tokenize(json::parse(line).at("text").get<std::string>()));
  }
  return lines;
}

void language_model(Check& c) {
  const auto lines = fixture_lines();
  const auto model = lm::NgramModel::train(lines, 3);
  const auto v = static_cast<int>(model.vocabulary().size());
  Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> ctx(2);
    for (auto& t : ctx) t = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    if (trial % 3 == 0) ctx[0] = lm::kBos;
    if (trial % 7 == 0) {
      const auto& line = lines[rng.below(lines.size())];
      if (line.size() >= 2) ctx = model.encode({line[0], line[1]});
    }
    const auto dist = model.next_token_dist(ctx);
    const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
    c.expect(std::abs(sum - 1.0) <= 1e-9, "distribution sums to " + num(sum));
  }

  std::vector<std::string> tokens;
  for (std::size_t n = 1; n <= 1000; ++n) {
    tokens.push_back("t" + std::to_string(n));
    const lm::UniformModel uniform(tokens);
    const double size = static_cast<double>(uniform.support_size());
    const double ppl = lm::perplexity(uniform, {{"t1", "zz", "t1"}, {}, {"t" + std::to_string(n)}});
    c.expect(ppl == size, "uniform perplexity " + num(ppl) + " for V=" + num(size));
  }

  const std::size_t half = lines.size() / 2;
  const std::vector<std::vector<std::string>> train(lines.begin(), lines.begin() + half);
  const std::vector<std::vector<std::string>> held(lines.begin() + half, lines.end());
  for (int order : {1, 2, 3}) {
    const auto m = lm::NgramModel::train(train, order);
    const double a = lm::perplexity(m, train);
    const double b = lm::perplexity(m, held);
    c.expect(a <= b, "order " + std::to_string(order) + ": train " + num(a) + " > held-out " +
                         num(b));
  }
}

// ---------------------------------------------------------------------------

void agreement(Check& c) {
  std::size_t checked = 0;
  for (std::size_t annotators = 1; annotators <= 3; ++annotators) {
    for (std::size_t units = 1; units <= 4; ++units) {
      std::size_t combos = 1;
      for (std::size_t i = 0; i < annotators * units; ++i) combos *= 3;
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<std::vector<int>> raw(units, std::vector<int>(annotators));
        annotation::LabelMatrix matrix(units);
        std::size_t rest = code;
        for (std::size_t u = 0; u < units; ++u) {
          for (auto& v : raw[u]) {
            v = static_cast<int>(rest % 3) - 1;
            rest /= 3;
            matrix[u].push_back(v < 0 ? std::nullopt : std::optional<int>(v));
          }
        }
        const auto expected = oracles::alpha_pair_oracle(raw);
        if (!expected) {
          bool threw = false;
          try {
            annotation::krippendorff_alpha(matrix);
          } catch (const ValidationError&) {
            threw = true;
          }
          c.expect(threw, "unpairable matrix accepted");
          continue;
        }
        const auto got = annotation::krippendorff_alpha(matrix);
        c.expect(std::abs(got.alpha - expected->alpha) <= 1e-12,
                 "alpha " + num(got.alpha) + " vs oracle " + num(expected->alpha));
        ++checked;
      }
    }
  }
  c.expect(checked > 500000, "too few alpha matrices");

  const annotation::LabelMatrix perfect = {{1, 1, 1}, {0, 0, std::nullopt}, {1, 1, 1}};
  c.expect(annotation::krippendorff_alpha(perfect).alpha == 1.0, "perfect agreement alpha != 1");

  const auto set = testfix::published_accounting();
  const auto report = annotation::model_accuracy(set.votes, set.key);
  c.expect(report.overall.total() == 800, "task total");
  c.expect(report.overall.assigned() == 660, "assigned total");
  c.expect(annotation::format_percent(660.0 / 800.0) == "82.5%", "assigned share");
  const auto& ft = report.models.at(0);
  const auto& orig = report.models.at(1);
  c.expect(ft.assigned() == 321 && orig.assigned() == 339, "321/339 split");
  c.expect(ft.premise == 203 && annotation::format_percent(ft.premise_rate()) == "63.2%",
           "fine-tuned premise rate " + annotation::format_percent(ft.premise_rate()));
  c.expect(orig.premise == 144 && annotation::format_percent(orig.premise_rate()) == "42.5%",
           "original premise rate " + annotation::format_percent(orig.premise_rate()));
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
    }
  }
  return out;
}

const fs::path kFixtureConfig = testutil::kSourceDir / "configs/fixture.toml";

// Scratch space and the slowest single pipeline run.
struct FixtureRuns {
  testutil::TempDir dir{"accept"};
  double slowest_run = 0.0;
};

bool run_cli(const std::string& args, FixtureRuns& runs) {
  const auto start = std::chrono::steady_clock::now();
  const int status =
      testutil::run(testutil::kCli.string() + " " + args + " > /dev/null 2>&1");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  runs.slowest_run = std::max(runs.slowest_run, secs);
  return status == 0;
}

void determinism(Check& c, FixtureRuns& runs) {
  const std::string config = " --config " + kFixtureConfig.string();
  const auto a = runs.dir / "a";
  const auto b = runs.dir / "b";
  const auto s = runs.dir / "stages";
  c.expect(run_cli("run-all" + config + " --out " + a.string(), runs), "first run-all failed");
  c.expect(run_cli("run-all" + config + " --out " + b.string(), runs), "second run-all failed");
  if (!c.failures().empty()) return;
  const auto ta = tree(a);
  const auto tb = tree(b);
  c.expect(ta.size() == tb.size(), "artifact sets differ");
  for (const auto& [path, bytes] : ta) {
    c.expect(tb.contains(path) && tb.at(path) == bytes, "artifact differs: " + path);
  }

  const auto chain = json::parse(ta.at("manifests/run-all.json"));
  const auto start = std::chrono::steady_clock::now();
  for (const auto& link : chain.at("stages")) {
    const auto stage = link.at("stage").get<std::string>();
    c.expect(testutil::run(testutil::kCli.string() + " " + stage + config + " --out " +
                           s.string() + " > /dev/null 2>&1") == 0,
             "stage " + stage + " failed");
    c.expect(sha256_file(s / "manifests" / (stage + ".json")) == link.at("manifest_sha256"),
             "manifest of " + stage + " differs from run-all");
  }
  runs.slowest_run = std::max(
      runs.slowest_run,
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  c.expect(runs.slowest_run < 120.0, "fixture pipeline took " + num(runs.slowest_run) + " s");
}

void smoke(Check& c, FixtureRuns& runs) {
  const auto out = runs.dir / "smoke";
  c.expect(run_cli("run-all --config " + kFixtureConfig.string() + " --out " + out.string(), runs),
           "run-all failed");
  if (!c.failures().empty()) return;

  const auto cv = json::parse(read_file(out / pipeline::paths::kCvReport));
  const double f1 = cv.at("summary").at("macro_f1").at("mean").get<double>();
  c.expect(f1 >= 0.9, "CV macro F1 " + num(f1));

  std::map<std::string, bool> truth;
  for_each_jsonl(testutil::kSourceDir / "data/fixture/news_truth.jsonl",
                 [&](const json& j, std::size_t) {
                   truth[j.at("text").get<std::string>()] = j.at("premise").get<bool>();
                 });
  std::size_t selected = 0, planted = 0;
  for_each_jsonl(out / pipeline::paths::kSelected, [&](const json& j, std::size_t) {
    ++selected;
    const auto it = truth.find(j.at("text").get<std::string>());
    planted += it != truth.end() && it->second;
  });
  std::size_t scored = 0;
  for_each_jsonl(out / pipeline::paths::kScores, [&](const json&, std::size_t) { ++scored; });
  c.expect(selected == static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(scored))),
           "selected " + std::to_string(selected) + " of " + std::to_string(scored));
  c.expect(selected > 0 && planted * 10 >= selected * 9,
           std::to_string(planted) + " of " + std::to_string(selected) + " selections planted");

  std::map<std::string, std::string> prompts;
  for (const auto& claim : selection::load_prompts(testutil::kSourceDir / "data/prompts_ru.tsv")) {
    prompts[claim.id] = claim.text;
  }
  std::map<std::string, std::map<std::string, int>> per_model;
  for_each_jsonl(out / pipeline::paths::kCandidates, [&](const json& j, std::size_t) {
    const auto cand = lm::candidate_from_json(j);
    ++per_model[cand.model_id][cand.prompt_id];
    const auto& claim = prompts.at(cand.prompt_id);
    c.expect(cand.text.rfind(claim, 0) != 0, "candidate repeats its prompt");
    c.expect(cand.text.rfind("потому что", 0) != 0, "candidate repeats the connective");
  });
  c.expect(per_model.size() == 2, "expected two generators");
  for (const auto& [model, by_prompt] : per_model) {
    int total = 0;
    for (const auto& [prompt, n] : by_prompt) {
      total += n;
      c.expect(n == 20, model + "/" + prompt + " has " + std::to_string(n) + " candidates");
    }
    c.expect(by_prompt.size() == 20 && total == 400,
             model + " has " + std::to_string(total) + " candidates");
  }
}

struct Criterion {
  std::string name;
  double budget_s;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  FixtureRuns runs;
  const std::vector<Criterion> criteria = {
      {"feature schema arithmetic", 1.0, schema_arithmetic},
      {"preprocessing", 5.0, preprocessing},
      {"gbdt", 30.0, gbdt_criterion},
      {"cv and metrics", 10.0, cv_metrics},
      {"sampler", 60.0, sampler},
      {"language model", 30.0, language_model},
      {"agreement", 60.0, agreement},
      {"pipeline determinism", 360.0, [&](Check& c) { determinism(c, runs); }},
      {"end-to-end smoke", 180.0, [&](Check& c) { smoke(c, runs); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& crit = criteria[i];
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(secs < crit.budget_s, "over the time budget");
    const bool ok = check.failures().empty();
    if (!ok) ++failed;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << (i + 1) << "] " << std::left
              << std::setw(28) << crit.name << std::right << std::fixed << std::setprecision(2)
              << std::setw(8) << secs << " s (budget " << std::setprecision(0) << crit.budget_s
              << " s)  " << check.total() - check.failures().size() << "/" << check.total()
              << " checks\n";
    for (std::size_t f = 0; f < std::min<std::size_t>(5, check.failures().size()); ++f) {
      std::cout << "        " << check.failures()[f] << "\n";
    }
    std::cout.unsetf(std::ios::fixed);
    std::cout << std::setprecision(6);
  }
  std::cout << (failed ? "FAILED " : "PASSED ") << criteria.size() - failed << "/"
            << criteria.size() << " criteria\n";
  return failed ? 1 : 0;
}
