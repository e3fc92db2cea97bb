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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <chrono>
#include <thread>

#include "argforge/features.hpp"
#include "argforge/generator.hpp"
#include "argforge/scorer.hpp"
#include "argforge/subprocess.hpp"
#include "test_util.hpp"

using namespace argforge;
using namespace std::chrono_literals;

namespace {

std::vector<corpus::Sentence> sentences(const std::vector<std::string>& texts) {
  std::vector<corpus::Sentence> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out[i].id = "s" + std::to_string(i);
    out[i].text = texts[i];
  }
  return out;
}

// An httplib server on an ephemeral port, stopped on destruction.
class TestServer {
 public:
  TestServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("line process") {
  LineProcess cat("cat", 5s);
  CHECK(cat.request("привет мир") == "привет мир");
  CHECK(cat.request("") == "");
  LineProcess quiet("sleep 10", 200ms);
  CHECK_THROWS_AS(quiet.request("x"), SubprocessError);
  LineProcess gone("true", 2s);
  CHECK_THROWS_AS(gone.request("x"), SubprocessError);
}

TEST_CASE("external tagger") {
  // Tags every token NOUN except "бежит", which becomes a present-tense verb.
  features::ExternalTagger tagger(
      "while read -r line; do s=; for w in $line; do "
      "if [ \"$w\" = бежит ]; then t='VERB|tense=present,person=3,mood=indicative'; "
      "else t=NOUN; fi; s=\"$s $t\"; done; echo \"$s\"; done");
  const auto tags = tagger.tag({"собака", "бежит", "домой"});
  REQUIRE(tags.size() == 3);
  CHECK(tags[0].pos == features::Pos::kNoun);
  CHECK(tags[1].pos == features::Pos::kVerb);
  CHECK(tags[1].tense == features::Tense::kPresent);
  CHECK(tags[1].person == 3);
  CHECK(tags[1].mood == features::Mood::kIndicative);
  CHECK(tagger.tag({}).empty());

  features::ExternalTagger short_reply("while read -r l; do echo NOUN; done");
  CHECK_THROWS_AS(short_reply.tag({"а", "б"}), SubprocessError);
  features::ExternalTagger bad_tag("while read -r l; do echo BOGUS; done");
  CHECK_THROWS_AS(bad_tag.tag({"а"}), SubprocessError);
}

TEST_CASE("process scorer") {
  // Probability 1 when the line contains "потому", else 0.25.
  scoring::ProcessScorer scorer(
      "while read -r l; do case \"$l\" in *потому*) echo 1;; *) echo 0.25;; esac; done");
  const auto s = sentences({"Ставки растут, потому что инфляция.", "Погода хорошая.",
                            "строка\nс переносом потому"});
  const auto scores = scorer.score(s);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0] == 1.0);
  CHECK(scores[1] == 0.25);
  CHECK(scores[2] == 1.0);
  CHECK(scorer.score(s) == scores);

  scoring::ProcessScorer words("while read -r l; do echo high; done");
  CHECK_THROWS_AS(words.score(sentences({"x"})), ValidationError);
  scoring::ProcessScorer out_of_range("while read -r l; do echo 1.5; done");
  CHECK_THROWS_AS(out_of_range.score(sentences({"x"})), ValidationError);
  scoring::ProcessScorer slow("sleep 10", 200ms);
  CHECK_THROWS_AS(slow.score(sentences({"x"})), SubprocessError);
}

TEST_CASE("probability parsing") {
  CHECK(scoring::parse_probability("0.5") == 0.5);
  CHECK(scoring::parse_probability(" 1 ") == 1.0);
  CHECK(scoring::parse_probability("0") == 0.0);
  for (const char* bad : {"", "-0.1", "1.01", "nan", "inf", "0.5x", "0,5"}) {
    CHECK_THROWS_AS(scoring::parse_probability(bad), ValidationError);
  }
}

TEST_CASE("http scorer") {
  TestServer ts;
  std::vector<std::size_t> batch_sizes;
  ts.server().Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    std::string body;
    std::size_t n = 0;
    for (const auto& line : split_lines(req.body)) {
      if (line.empty()) continue;
      const auto j = json::parse(line);
      CHECK(j.contains("id"));
      const auto text = j.at("text").get<std::string>();
      CHECK(text.find('\n') == std::string::npos);
      body += (text.find("потому") != std::string::npos ? "0.9\n" : "0.1\n");
      ++n;
    }
    batch_sizes.push_back(n);
    res.set_content(body, "text/plain");
  });
  ts.server().Post("/short", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("0.5\n", "text/plain");
  });

  scoring::HttpScorer scorer(ts.url(), 5s, 2);
  const auto scores =
      scorer.score(sentences({"потому что", "нет", "а потому", "строка\nпотому", "б"}));
  CHECK(scores == std::vector<double>{0.9, 0.1, 0.9, 0.9, 0.1});
  CHECK(batch_sizes == std::vector<std::size_t>{2, 2, 1});
  CHECK(scorer.score({}).empty());

  scoring::HttpScorer missing(ts.url() + "/none", 5s);
  CHECK_THROWS_AS(missing.score(sentences({"x"})), ValidationError);
  scoring::HttpScorer unreachable("http://127.0.0.1:1", 500ms);
  CHECK_THROWS_AS(unreachable.score(sentences({"x"})), ValidationError);
}

TEST_CASE("generate wire format") {
  lm::SamplerConfig config;
  config.top_k = 7;
  config.top_p = 0.8;
  config.num_samples = 3;
  config.max_tokens = 12;
  config.seed = 99;
  const auto request = lm::make_generate_request("Ставки растут потому что", config);
  CHECK(request == json{{"prompt", "Ставки растут потому что"}, {"top_k", 7}, {"top_p", 0.8},
                        {"num_samples", 3}, {"max_tokens", 12}, {"seed", 99}});
  std::string prompt;
  const auto back = lm::parse_generate_request(request, &prompt);
  CHECK(prompt == "Ставки растут потому что");
  CHECK(back.top_k == 7);
  CHECK(back.top_p == 0.8);
  CHECK(back.num_samples == 3);
  CHECK(back.max_tokens == 12);
  CHECK(back.seed == 99);

  auto missing = request;
  missing.erase("seed");
  CHECK_THROWS_AS(lm::parse_generate_request(missing, &prompt), ValidationError);
  auto invalid = request;
  invalid["top_p"] = 0.0;
  CHECK_THROWS_AS(lm::parse_generate_request(invalid, &prompt), ValidationError);
  invalid = request;
  invalid["top_k"] = "many";
  CHECK_THROWS_AS(lm::parse_generate_request(invalid, &prompt), ValidationError);

  const auto model = lm::NgramModel::train(
      {{"ставки", "растут", "потому", "что", "инфляция", "высокая"},
       {"рубль", "падает", "потому", "что", "нефть", "дешевеет"}},
      2);
  lm::NgramGenerator generator("original", model);
  const auto response = lm::handle_generate_request(generator, request);
  REQUIRE(response["candidates"].size() == 3);
  const auto direct = generator.generate("", "Ставки растут потому что", back);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(response["candidates"][i]["text"] == direct[i].text);
    CHECK(response["candidates"][i]["seed_used"] == 99 + i);
    CHECK(direct[i].tokens.size() <= 12);
  }
}

TEST_CASE("http generator") {
  const auto model = lm::NgramModel::train(
      {{"ставки", "растут", "потому", "что", "инфляция", "высокая"},
       {"рубль", "падает", "потому", "что", "нефть", "дешевеет"}},
      2);
  lm::NgramGenerator local("fine_tuned", model);
  TestServer ts;
  ts.server().Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(lm::handle_generate_request(local, json::parse(req.body)).dump(),
                      "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    }
  });
  ts.server().Post("/bad/generate", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"candidates\": [{\"text\": \"a\"}]}", "application/json");
  });
  ts.server().Post("/garbage/generate", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "application/json");
  });

  lm::SamplerConfig config;
  config.num_samples = 4;
  config.seed = 11;
  lm::HttpGenerator remote("fine_tuned", ts.url(), 5s);
  CHECK(remote.model_id() == "fine_tuned");
  const auto got = remote.generate("p01", "Рубль падает потому что", config);
  const auto want = local.generate("p01", "Рубль падает потому что", config);
  REQUIRE(got.size() == 4);
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].prompt_id == "p01");
    CHECK(got[i].model_id == "fine_tuned");
    CHECK(got[i].text == want[i].text);
    CHECK(got[i].seed_used == 11 + i);
  }

  CHECK_THROWS_AS(lm::HttpGenerator("m", ts.url() + "/bad", 5s).generate("p", "x", config),
                  ValidationError);
  CHECK_THROWS_AS(
      lm::HttpGenerator("m", ts.url() + "/garbage", 5s).generate("p", "x", config),
      ValidationError);
  CHECK_THROWS_AS(
      lm::HttpGenerator("m", ts.url() + "/none", 5s).generate("p", "x", config),
      ValidationError);
  CHECK_THROWS_AS(lm::HttpGenerator("m", "http://127.0.0.1:1", 500ms).generate("p", "x", config),
                  ValidationError);
}
