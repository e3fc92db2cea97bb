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

// Writes a synthetic Russian fixture with a planted premise signal:
//   labeled.jsonl    labeled sentences {id, text, label, topic, doc_id}
//   documents.jsonl  news documents {id, text, source, date}
//   news_truth.jsonl {doc_id, text, premise} for every generated news sentence
// Premise sentences open or join clauses with argumentative markers.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argforge/io.hpp"
#include "argforge/rng.hpp"

namespace {

using argforge::json;
using argforge::Rng;

const std::vector<std::string> kSubjects = {
    "центральный банк", "крупный инвестор", "министерство финансов", "российский рынок",
    "курс рубля", "ключевая ставка", "инфляция", "спрос на кредиты", "цена нефти",
    "фондовый индекс", "доходность облигаций", "объем вкладов", "ипотечный рынок",
    "частный бизнес", "экспорт зерна", "розничный банк", "страховая компания",
    "пенсионный фонд", "курс доллара", "рынок недвижимости", "золотовалютный резерв",
    "металлургический холдинг", "биржевой фонд", "региональный бюджет"};

const std::vector<std::string> kVerbs = {
    "повышает", "снижает", "поддерживает", "сокращает", "увеличивает", "ограничивает",
    "опубликовал", "пересмотрел", "изменил", "обсуждает", "сохранил", "укрепляет",
    "отражает", "стимулирует", "замедляет"};

const std::vector<std::string> kObjects = {
    "ключевую ставку", "прогноз на год", "отчет о прибыли", "спрос на валюту",
    "объем кредитования", "дивидендную политику", "инвестиционную программу",
    "стоимость заимствований", "доходы населения", "число сделок", "норматив резервов",
    "выпуск облигаций", "тарифы на услуги", "уровень сбережений", "цены на жилье",
    "оборот торговли"};

const std::vector<std::string> kTimes = {
    "в третьем квартале", "за прошлый месяц", "в начале года", "на этой неделе",
    "по итогам торгов", "во втором полугодии", "в понедельник", "к концу года",
    "с 2019 г. подряд", "в 2021 году"};

const std::vector<std::string> kSources = {"Интерфакс", "ТАСС", "РБК", "агентство Прайм"};

const std::vector<std::string> kTopics = {"deposits", "bonds", "stocks", "currency",
                                          "real_estate", "credit"};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(rng.below(items.size()))];
}

std::string capitalize(std::string s) {
  static const std::vector<std::pair<std::string, std::string>> upper = {
      {"а", "А"}, {"б", "Б"}, {"в", "В"}, {"г", "Г"}, {"д", "Д"}, {"е", "Е"},
      {"ж", "Ж"}, {"з", "З"}, {"и", "И"}, {"к", "К"}, {"л", "Л"}, {"м", "М"},
      {"н", "Н"}, {"о", "О"}, {"п", "П"}, {"р", "Р"}, {"с", "С"}, {"т", "Т"},
      {"у", "У"}, {"ф", "Ф"}, {"х", "Х"}, {"ц", "Ц"}, {"ч", "Ч"}, {"ш", "Ш"},
      {"э", "Э"}, {"ю", "Ю"}, {"я", "Я"}};
  for (const auto& [lo, up] : upper) {
    if (s.rfind(lo, 0) == 0) return up + s.substr(lo.size());
  }
  return s;
}

std::string clause(Rng& rng) {
  std::string c = pick(rng, kSubjects) + " " + pick(rng, kVerbs) + " " + pick(rng, kObjects);
  if (rng.below(2) == 0) c += " " + pick(rng, kTimes);
  return c;
}

std::string neutral_sentence(Rng& rng) {
  std::string s = capitalize(clause(rng));
  switch (rng.below(4)) {
    case 0: s += ", сообщает " + pick(rng, kSources); break;
    case 1: s += " и " + pick(rng, kVerbs) + " " + pick(rng, kObjects); break;
    default: break;
  }
  return s + ".";
}

std::string premise_sentence(Rng& rng) {
  switch (rng.below(9)) {
    case 0: return capitalize(clause(rng)) + ", потому что " + clause(rng) + ".";
    case 1: return "Поэтому " + clause(rng) + ".";
    case 2: return "Исследования показывают, что " + clause(rng) + ".";
    case 3: return "Например, " + clause(rng) + ".";
    case 4: return "По данным аналитиков, " + clause(rng) + ".";
    case 5: return "Следовательно, " + clause(rng) + ".";
    case 6: return "Так как " + clause(rng) + ", " + clause(rng) + ".";
    case 7: return capitalize(clause(rng)) + ", таким образом " + clause(rng) + ".";
    default: return "В результате " + clause(rng) + ".";
  }
}

std::string claim_sentence(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return "Очевидно, " + clause(rng) + ".";
    case 1: return "Безусловно, " + clause(rng) + ".";
    default: return "Несомненно, " + clause(rng) + ".";
  }
}

std::string major_claim_sentence(Rng& rng) {
  return capitalize(pick(rng, kSubjects)) + " должен " + "пересмотреть " +
         pick(rng, kObjects) + ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Writes the synthetic argforge fixture"};
  std::string out_dir;
  std::uint64_t seed = 2026;
  int n_labeled = 2000;
  int n_documents = 160;
  int sentences_per_doc = 12;
  double news_premise_rate = 0.10;
  double label_noise = 0.02;
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--labeled", n_labeled, "Labeled sentences");
  app.add_option("--documents", n_documents, "News documents");
  app.add_option("--sentences-per-doc", sentences_per_doc, "Sentences per news document");
  app.add_option("--premise-rate", news_premise_rate, "Share of planted news premises");
  app.add_option("--noise", label_noise, "Labeled-corpus label noise rate");
  CLI11_PARSE(app, argc, argv);

  Rng rng(seed);
  const std::filesystem::path out(out_dir);

  // Labeled corpus in two source styles: for/against/non-premise and
  // major_claim/claim/premise/neutral.
  std::vector<json> labeled;
  for (int i = 0; i < n_labeled; ++i) {
    const bool essay_style = rng.below(3) == 0;
    std::string text, label;
    bool premise = false;
    const auto roll = rng.below(100);
    if (essay_style) {
      if (roll < 6) {
        text = major_claim_sentence(rng);
        label = "major_claim";
      } else if (roll < 18) {
        text = claim_sentence(rng);
        label = "claim";
        premise = true;
      } else if (roll < 50) {
        text = premise_sentence(rng);
        label = "premise";
        premise = true;
      } else {
        text = neutral_sentence(rng);
        label = "neutral";
      }
    } else if (roll < 45) {
      text = premise_sentence(rng);
      label = rng.below(2) == 0 ? "for" : "against";
      premise = true;
    } else {
      text = neutral_sentence(rng);
      label = "non-premise";
    }
    // Label noise.
    if (label != "major_claim" && rng.uniform() < label_noise) {
      if (essay_style) label = premise ? "neutral" : "premise";
      else label = premise ? "non-premise" : "for";
    }
    char id[32];
    std::snprintf(id, sizeof(id), "%s-%04d", essay_style ? "ess" : "ukp", i + 1);
    char doc[32];
    std::snprintf(doc, sizeof(doc), "%s-d%03d", essay_style ? "ess" : "ukp", i / 8 + 1);
    labeled.push_back({{"id", id},
                       {"text", text},
                       {"label", label},
                       {"topic", pick(rng, kTopics)},
                       {"doc_id", doc}});
  }

  // News documents; some end with shared boilerplate that dedup removes.
  std::vector<json> documents;
  std::vector<json> truth;
  for (int d = 0; d < n_documents; ++d) {
    char id[32];
    std::snprintf(id, sizeof(id), "news-%04d", d + 1);
    std::string text;
    for (int s = 0; s < sentences_per_doc; ++s) {
      const bool premise = rng.uniform() < news_premise_rate;
      const std::string sentence = premise ? premise_sentence(rng) : neutral_sentence(rng);
      if (!text.empty()) text += rng.below(5) == 0 ? "\n" : " ";
      text += sentence;
      truth.push_back({{"doc_id", id}, {"text", sentence}, {"premise", premise}});
    }
    if (rng.below(3) == 0) {
      const std::string tail = "Подробности читайте на сайте издания.";
      text += " " + tail;
      truth.push_back({{"doc_id", id}, {"text", tail}, {"premise", false}});
    }
    char date[16];
    std::snprintf(date, sizeof(date), "2021-%02d-%02d", d % 12 + 1, d % 28 + 1);
    documents.push_back({{"id", id}, {"text", text}, {"source", pick(rng, kSources)},
                         {"date", date}});
  }

  argforge::write_file_atomic(out / "labeled.jsonl", argforge::to_jsonl(labeled));
  argforge::write_file_atomic(out / "documents.jsonl", argforge::to_jsonl(documents));
  argforge::write_file_atomic(out / "news_truth.jsonl", argforge::to_jsonl(truth));
  std::cout << "wrote " << labeled.size() << " labeled sentences, " << documents.size()
            << " documents (" << truth.size() << " news sentences) to " << out_dir << "\n";
  return 0;
}
