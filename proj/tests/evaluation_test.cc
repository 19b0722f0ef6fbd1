// Copyright 2026 The setdesc Authors.
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

#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"
#include "setdesc/evaluation.h"

namespace setdesc {
namespace {

using nlohmann::json;

json Items(const std::string &prefix, int from, int to) {
  json a = json::array();
  for (int i = from; i < to; ++i) a.push_back(prefix + std::to_string(i));
  return a;
}

ScriptedOracle Proposer(json round1, json round2) {
  return ScriptedOracle(json{{"propose_differences",
                              {{{"match", {{"round", "1"}}}, {"reply", round1}},
                               {{"match", {{"round", "2"}}}, {"reply", round2}}}}});
}

TEST_CASE("two proposer rounds of fifteen") {
  auto distinct = Proposer(Items("more ", 0, 15), Items("more ", 15, 30));
  auto all = Propose("a", "b", distinct);
  CHECK(all.size() == 30);
  CHECK(all.front().round == 1);
  CHECK(all.back().round == 2);

  // Five second-round items repeat first-round ones up to case.
  json second = Items("MORE ", 10, 15);
  for (auto &x : Items("other ", 0, 10)) second.push_back(x);
  auto overlap = Proposer(Items("more ", 0, 15), second);
  CHECK(Propose("a", "b", overlap).size() == 25);

  // Long rounds are cut to fifteen.
  auto verbose = Proposer(Items("x", 0, 20), Items("y", 0, 20));
  CHECK(Propose("a", "b", verbose).size() == 30);

  auto empty = Proposer(json::array(), json::array({"  "}));
  CHECK_THROWS_AS(Propose("a", "b", empty), ProtocolError);
}

// Mean gap computed row by row rather than through centroids.
double BruteGap(const std::string &text, const EmbeddingStore &a,
                const EmbeddingStore &b, HashEmbeddingProvider &p) {
  auto t = Normalize(p.Vector("text:" + text));
  auto mean = [&](const EmbeddingStore &s) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) total += Dot(t, s.row(i));
    return total / static_cast<double>(s.size());
  };
  return mean(a) - mean(b);
}

TEST_CASE("ranking scores equal the brute-force mean gap") {
  HashEmbeddingProvider p(32);
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> ids_a, ids_b;
    auto ma = testing::RandomUnitRows(rng, 1 + rng.UniformIndex(40), 32);
    auto mb = testing::RandomUnitRows(rng, 1 + rng.UniformIndex(40), 32);
    for (std::size_t i = 0; i < ma.rows; ++i) ids_a.push_back("a" + std::to_string(i));
    for (std::size_t i = 0; i < mb.rows; ++i) ids_b.push_back("b" + std::to_string(i));
    EmbeddingStore a(ids_a, ma), b(ids_b, mb);
    std::vector<DifferenceProposal> props;
    for (int i = 0; i < 8; ++i) props.push_back({"term " + std::to_string(i), 1, 0});
    auto ranked = Rank(props, a, b, p);
    auto reversed = Rank(props, b, a, p);
    std::map<std::string, double> back;
    for (const auto &r : reversed.proposals) back[r.text] = r.score;
    for (std::size_t i = 0; i < ranked.proposals.size(); ++i) {
      const auto &r = ranked.proposals[i];
      CHECK(std::abs(r.score - BruteGap(r.text, a, b, p)) < 1e-6);
      CHECK(r.score == -back[r.text]);
      if (i > 0) CHECK(ranked.proposals[i - 1].score >= r.score);
    }
  }
}

TEST_CASE("ranking puts the distinguishing term first") {
  HashEmbeddingProvider p(128);
  auto gold = p.Vector("text:gold");
  auto red = p.Vector("text:red");
  auto a = testing::TwoClassStore(gold, red, 10, 10);
  auto b = testing::TwoClassStore(gold, red, 0, 10);
  auto ranked = Rank({{"red", 1, 0}, {"blue", 1, 0}, {"gold", 2, 0}}, a, b, p);
  CHECK(ranked.proposals.front().text == "gold");
  CHECK(ranked.proposals.back().text == "red");
  CHECK(ranked.Top(2).size() == 2);
  CHECK(ranked.Top(9).size() == 3);
  CHECK_THROWS_AS(Rank({}, a, EmbeddingStore(), p), InputError);
}

TEST_CASE("accuracy at k and judge failures") {
  RankedDiff ranked;
  for (int i = 0; i < 8; ++i) ranked.proposals.push_back({"d" + std::to_string(i), 1, 0});
  ScriptedOracle judge(json{{"judge_equivalence",
                             {{{"match", {{"candidate", "d3"}}}, {"reply", "True"}},
                              {{"match", {{"candidate", "d0"}}}, {"reply", "maybe"}},
                              {{"reply", false}}}}});
  CHECK_FALSE(AccAtK(ranked, "truth", 1, judge));
  CHECK(AccAtK(ranked, "truth", 5, judge));
  CHECK_FALSE(AccAtK(ranked, "truth", 3, judge));

  // A judge with no rules fails on every call.
  ScriptedOracle silent(json::object());
  CHECK_FALSE(AccAtK(ranked, "truth", 5, silent));

  // acc@1 implies acc@5 for any judge.
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    json rules = json::array();
    for (int i = 0; i < 8; ++i) {
      rules.push_back({{"match", {{"candidate", "d" + std::to_string(i)}}},
                       {"reply", rng.UniformIndex(4) == 0}});
    }
    ScriptedOracle random_judge(json{{"judge_equivalence", rules}});
    if (AccAtK(ranked, "truth", 1, random_judge)) {
      CHECK(AccAtK(ranked, "truth", 5, random_judge));
    }
  }
}

TEST_CASE("ROUGE-L on small sentences") {
  auto r = RougeL("the cat sat", "the cat ate");
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
  auto s = RougeL("The  Cat", "the cat sat on the mat");
  CHECK(s.precision == doctest::Approx(1.0));
  CHECK(s.recall == doctest::Approx(2.0 / 6.0));
  CHECK(s.f1 == doctest::Approx(2 * 1.0 * (1.0 / 3.0) / (1.0 + 1.0 / 3.0)));
  CHECK(RougeL("", "").f1 == 1.0);
  CHECK(RougeL("a", "").f1 == 0.0);
  CHECK(RougeL("a b", "c d").f1 == 0.0);
}

TEST_CASE("CLIPScore weight and clipping") {
  HashEmbeddingProvider p(64);
  auto gold = p.Vector("text:gold");
  std::vector<float> neg(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) neg[i] = -gold[i];
  auto same = testing::TwoClassStore(gold, neg, 4, 4);
  auto opposite = testing::TwoClassStore(gold, neg, 0, 4);
  auto half = testing::TwoClassStore(gold, neg, 2, 4);
  CHECK(ClipScore("gold", same, p) == doctest::Approx(kClipScoreWeight));
  CHECK(ClipScore("gold", opposite, p) == doctest::Approx(0.0));
  CHECK(ClipScore("gold", half, p) == doctest::Approx(1.25));
}

TEST_CASE("evaluation report serializes its fields") {
  EvaluationReport rep;
  rep.pair_id = "pair_7";
  rep.ranked.proposals.push_back({"more red", 2, 0.25});
  rep.acc5 = true;
  rep.rouge = RougeScore{1, 0.5, 2.0 / 3.0};
  auto j = rep.ToJson();
  CHECK(j["pair_id"] == "pair_7");
  CHECK(j["acc5"] == true);
  CHECK(j["acc1"] == false);
  CHECK(j.dump().find("more red") != std::string::npos);
}

}  // namespace
}  // namespace setdesc
