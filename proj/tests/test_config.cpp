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

#include "argforge/config.hpp"
#include "test_util.hpp"

using namespace argforge;
using namespace argforge::config;

namespace {

const char* kMinimal = R"(
out_dir = "out"
[paths]
labeled_corpus = "l.jsonl"
documents = "d.jsonl"
abbreviations = "a.txt"
markers = "m.tsv"
prompts = "p.tsv"
[label_map]
for = "premise"
none = "non_premise"
)";

// Minimal config plus `extra` TOML appended.
PipelineConfig from_text(const std::string& extra) {
  return config_from_json(parse_toml(std::string(kMinimal) + extra), "/cfg");
}

}  // namespace

TEST_CASE("TOML values") {
  const auto j = parse_toml(R"(
# comment
a = 1
b = -2.5e1
c = true
d = "x # not a comment \"q\" \u0416\n"
e = 'C:\raw\path'
f = [1, 2,
     3,  # trailing comment
]
"quoted key" = "v"
[s.t]
g = ["a", 'b']
h = 7 # comment
)");
  CHECK(j["a"] == 1);
  CHECK(j["b"] == -25.0);
  CHECK(j["c"] == true);
  CHECK(j["d"] == "x # not a comment \"q\" Ж\n");
  CHECK(j["e"] == "C:\\raw\\path");
  CHECK(j["f"] == json::array({1, 2, 3}));
  CHECK(j["quoted key"] == "v");
  CHECK(j["s"]["t"]["g"] == json::array({"a", "b"}));
  CHECK(j["s"]["t"]["h"] == 7);
}

TEST_CASE("TOML errors") {
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("a = \n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("a = \"open\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("[[tables]]\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("[s\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("a = [1, 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("a = 1 b\n"), ValidationError);
  CHECK_THROWS_AS(parse_toml("[s]\n[s]\n"), ValidationError);
}

TEST_CASE("defaults") {
  const auto c = from_text("");
  CHECK(c.out_dir == "/cfg/out");
  CHECK(c.labeled_corpus == "/cfg/l.jsonl");
  CHECK(c.seed == 0);
  CHECK(c.lower_frac == 0.10);
  CHECK(c.grid_trees == std::vector<int>{50, 150, 500});
  CHECK(c.grid_depths == std::vector<int>{2, 8, 20, 30});
  CHECK(c.outer_k == 5);
  CHECK(c.inner_k == 4);
  CHECK(std::get<selection::Count>(c.size).value == 3500);
  CHECK(c.connective == "потому что");
  CHECK(c.sampler.top_k == 50);
  CHECK(c.sampler.top_p == 0.92);
  CHECK(c.sampler.num_samples == 20);
  CHECK(c.n_annotators == 4);
  CHECK(c.quorum == 3);
  CHECK(c.label_map.size() == 2);
  CHECK_FALSE(c.labels.has_value());
  CHECK_NOTHROW(c.validate());
  CHECK(c.to_json()["classifier"].is_object());
}

TEST_CASE("section overrides") {
  const auto c = from_text(R"(
[select]
fraction = 0.05
connective = ""
[generate]
top_k = 10
top_p = 0.5
external = ["gpt@http://127.0.0.1:9000"]
[lm]
order = 2
baseline = false
)");
  CHECK(std::get<selection::Fraction>(c.size).value == 0.05);
  CHECK(c.connective.empty());
  CHECK(c.sampler.top_k == 10);
  REQUIRE(c.external_generators.size() == 1);
  CHECK(c.external_generators[0].model_id == "gpt");
  CHECK(c.external_generators[0].url == "http://127.0.0.1:9000");
  CHECK(c.lm_order == 2);
  CHECK_FALSE(c.baseline);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(from_text("bogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[select]\ncount = 10\nfraction = 0.1\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[select]\ncount = 0\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[select]\nfraction = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[classifier]\ngrid_trees = []\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[classifier]\nouter_k = 1\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[preprocess]\nlower_frac = 0.6\nupper_frac = 0.5\n"),
                  ValidationError);
  CHECK_THROWS_AS(from_text("[lm]\nbaseline = false\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[lm]\ndiscount = 1.0\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[generate]\ntop_k = 0\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[generate]\nexternal = [\"nourl\"]\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[annotation]\nquorum = 2\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[classify]\nscorer = \"process\"\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[classify]\nscorer = \"magic\"\n"), ValidationError);
  CHECK_THROWS_AS(from_text("seed = -1\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[label_map]\nx = \"maybe\"\n"), ValidationError);
  CHECK_THROWS_AS(from_text("[paths]\nnot_a_path = \"x\"\n"), ValidationError);
}

TEST_CASE("shipped configs load") {
  const auto fixture = load_config(testutil::kSourceDir / "configs/fixture.toml");
  CHECK(fixture.seed == 7);
  CHECK(std::filesystem::exists(fixture.labeled_corpus));
  CHECK(std::get<selection::Fraction>(fixture.size).value == 0.05);
  CHECK(fixture.label_map.size() == 7);
}

TEST_CASE("missing files") {
  CHECK_THROWS_AS(load_config("/nonexistent/argforge.toml"), MissingInputError);
  testutil::TempDir dir("cfg");
  dir.write("l.jsonl", "");
  const auto path = dir.write("c.toml", kMinimal);
  CHECK_THROWS_AS(load_config(path), MissingInputError);
  for (const char* f : {"d.jsonl", "a.txt", "m.tsv", "p.tsv"}) dir.write(f, "");
  CHECK_NOTHROW(load_config(path));
  const auto with_lexicon = dir.write(
      "c2.toml", std::string(kMinimal).replace(std::string(kMinimal).find("prompts"), 0,
                                               "pos_lexicon = \"pos.tsv\"\n"));
  CHECK_THROWS_AS(load_config(with_lexicon), MissingInputError);
}
