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

#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include "doctest.h"
#include "fixtures.h"
#include "httplib.h"
#include "json.hpp"
#include "setdesc/concept_graph.h"
#include "setdesc/oracle.h"

namespace setdesc {
namespace {

using nlohmann::json;

std::vector<SenseEntry> TwoSenses() {
  return {{"gold.n.01", "metal"}, {"gold.n.03", "a deep yellow color"}};
}

TEST_CASE("judge replies and yes/no detection") {
  CHECK(ParseJudgeReply("True"));
  CHECK(ParseJudgeReply("  true.\n"));
  CHECK_FALSE(ParseJudgeReply("FALSE"));
  CHECK_THROWS_AS(ParseJudgeReply("maybe"), ProtocolError);
  CHECK_THROWS_AS(ParseJudgeReply(""), ProtocolError);
  CHECK(LooksYesNo("Is the sand gold?"));
  CHECK(LooksYesNo("  does it rain"));
  CHECK_FALSE(LooksYesNo("What color is the sand?"));
  CHECK_FALSE(LooksYesNo("Island type?"));
}

TEST_CASE("scripted rules match on call fields and fill placeholders") {
  ScriptedOracle o(json::parse(R"({
    "next_question": [
      {"match": {"subject": "image", "predicate": "content"},
       "reply": {"QUESTION_EXPERT": "What is shown?",
                 "QUESTION_VQA": "What is in the picture?"}},
      {"reply": {"QUESTION_EXPERT": "{subject} {predicate}",
                 "QUESTION_VQA": "What {predicate} does the {subject} have ({asked})?"}}
    ],
    "vqa": [
      {"match": {"image": "bad"}, "reply": {"valid": false, "answer": ""}},
      {"match": {"image": "obj"}, "reply": {"answer": "dune"}},
      {"reply": "sand"}
    ],
    "formulate": [{"match": {"answers": "sand | dune"},
                   "reply": {"object": " sand ", "new_predicates": ["Color", "color", " ", "texture"]}}],
    "judge_equivalence": [{"match": {"candidate": "a"}, "reply": true},
                          {"reply": "False"}],
    "disambiguate_sense": [{"match": {"term": "gold"}, "reply": "gold.n.03"},
                           {"reply": "nonsense.n.01"}],
    "propose_differences": [{"reply": ["x", "y"]}],
    "captionize": [{"reply": "{description}!"}]
  })"));

  auto q = o.NextQuestion({"image", "content", "image.content?", "art", {}});
  CHECK(q.question_vqa == "What is in the picture?");
  QuestionRequest req{"desert", "color", "image.content.desert.color?", "art", {}};
  req.log.push_back({"shape", {"e", "earlier"}});
  CHECK(o.NextQuestion(req).question_vqa ==
        "What color does the desert have (1)?");

  CHECK(o.Vqa("img", "q").text == "sand");
  CHECK_FALSE(o.Vqa("img", "q").invalid);
  CHECK(o.Vqa("bad", "q").invalid);
  auto f = o.Formulate({{"sand", false}, {"", true}, {"dune", false}}, "desert",
                       "content");
  CHECK(f.object == "sand");
  CHECK(f.new_predicates == std::vector<std::string>{"Color", "texture"});
  CHECK_THROWS_AS(o.Formulate({{"x", true}}, "desert", "content"), InputError);

  CHECK(o.JudgeEquivalence("a", "b"));
  CHECK_FALSE(o.JudgeEquivalence("c", "b"));
  CHECK(o.DisambiguateSense("gold", {}, TwoSenses()) == "gold.n.03");
  CHECK_THROWS_AS(o.DisambiguateSense("other", {}, TwoSenses()),
                  SenseSelectionError);
  // A single candidate needs no call.
  std::size_t before = o.calls("disambiguate_sense");
  CHECK(o.DisambiguateSense("x", {}, {{"only.n.01", ""}}) == "only.n.01");
  CHECK(o.calls("disambiguate_sense") == before);
  CHECK_THROWS_AS(o.DisambiguateSense("x", {}, {}), InputError);

  CHECK(o.ProposeDifferences("a -> b", "c -> d", 1, 15, {}) ==
        std::vector<std::string>{"x", "y"});
  CHECK(o.Captionize("desert") == "desert!");
  CHECK(o.calls("vqa") == 3);

  CHECK_THROWS_AS(o.WriteDescription("image --content--> desert"),
                  ScriptedMissError);
  CHECK_THROWS_AS(o.NextQuestion({"", "p", "", "", {}}), InputError);
}

TEST_CASE("scripted oracle refuses to repeat a logged question") {
  ScriptedOracle o(json::parse(R"({"next_question": [{"reply":
      {"QUESTION_EXPERT": "e", "QUESTION_VQA": "same"}}]})"));
  QuestionRequest req{"s", "p", "s.p?", "x", {{"p", {"e", "same"}}}};
  CHECK_THROWS_AS(o.NextQuestion(req), ProtocolError);
}

std::string RenderOf(const std::vector<Triplet> &edges) {
  ConceptGraph g;
  for (const auto &t : edges) g.Commit(t, {});
  return g.Render();
}

TEST_CASE("scripted novelty uses rules first and added edges otherwise") {
  ScriptedOracle o(json::parse(R"({"novelty_check": [
      {"match": {"added": "image|background|sky"}, "reply": false}]})"));
  std::string old_render = RenderOf({{"image", "content", "desert"}});
  std::string with_sky = RenderOf(
      {{"image", "content", "desert"}, {"image", "background", "sky"}});
  std::string with_dune = RenderOf(
      {{"image", "content", "desert"}, {"desert", "shape", "dune"}});
  CHECK_FALSE(o.NoveltyCheck(old_render, with_sky));
  CHECK(o.NoveltyCheck(old_render, with_dune));
  CHECK_FALSE(o.NoveltyCheck(old_render, old_render));
}

TEST_CASE("fixture loading errors") {
  CHECK_THROWS_AS(ScriptedOracle(json::array()), InputError);
  CHECK_THROWS_AS(ScriptedOracle::Load("/no/such/fixture.json"), InputError);
  auto dir = testing::TempDir("fixture_test");
  {
    std::ofstream out(dir / "bad.json");
    out << "{ nope";
  }
  CHECK_THROWS_AS(ScriptedOracle::Load(dir / "bad.json"), InputError);
  CHECK_THROWS_AS(MakeOracle("gpt", {}), InputError);
  CHECK(MakeOracle("scripted:" + testing::DataPath("desert_fixture.json").string(),
                   {}) != nullptr);
}

// Minimal chat-completions endpoint that replays queued answers.
class StubChat {
 public:
  StubChat() {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request &req, httplib::Response &res) {
                   std::lock_guard lock(mu_);
                   bodies.push_back(json::parse(req.body));
                   auths.push_back(req.get_header_value("Authorization"));
                   auto [status, content] = replies.empty()
                                                ? std::pair{500, std::string()}
                                                : replies.front();
                   if (!replies.empty()) replies.pop_front();
                   res.status = status;
                   json body = {{"choices",
                                 {{{"message", {{"role", "assistant"},
                                                {"content", content}}}}}}};
                   res.set_content(body.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubChat() {
    server_.stop();
    thread_.join();
  }
  HttpOracleConfig Config() const {
    HttpOracleConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
    c.model = "stub-model";
    c.api_key = "k123";
    c.timeout_seconds = 10;
    return c;
  }
  void Queue(int status, std::string content) {
    std::lock_guard lock(mu_);
    replies.emplace_back(status, std::move(content));
  }

  std::mutex mu_;
  std::deque<std::pair<int, std::string>> replies;
  std::vector<json> bodies;
  std::vector<std::string> auths;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_CASE("http oracle sends one system and one user message") {
  StubChat chat;
  HttpOracle o(chat.Config());
  chat.Queue(200, R"({"QUESTION_EXPERT": "What hue?", "QUESTION_VQA": "What color is the sand?"})");
  auto q = o.NextQuestion({"desert", "color", "image.content.desert.color?",
                           "landscape photography", {}});
  CHECK(q.question_vqa == "What color is the sand?");
  REQUIRE(chat.bodies.size() == 1);
  const json &b = chat.bodies[0];
  CHECK(b["model"] == "stub-model");
  CHECK(b["response_format"]["type"] == "json_object");
  REQUIRE(b["messages"].size() == 2);
  CHECK(b["messages"][0]["role"] == "system");
  CHECK(b["messages"][1]["role"] == "user");
  CHECK(b["messages"][0]["content"].get<std::string>().find(
            "landscape photography") != std::string::npos);
  auto user = json::parse(b["messages"][1]["content"].get<std::string>());
  CHECK(user["KEY_POINT"] == "desert");
  CHECK(user["ATTRIBUTE"] == "color");
  CHECK(user["QUESTION_BRANCH"] == "image.content.desert.color?");
  CHECK(chat.auths[0] == "Bearer k123");
}

TEST_CASE("http oracle retries once, then gives up") {
  StubChat chat;
  HttpOracle o(chat.Config());
  chat.Queue(500, "");
  chat.Queue(200, R"({"OBJECT": "gold", "NEW_PREDICATES": ["shade"]})");
  auto f = o.Formulate({{"gold", false}}, "desert", "color");
  CHECK(f.object == "gold");
  CHECK(f.new_predicates == std::vector<std::string>{"shade"});
  CHECK(o.requests() == 2);

  chat.Queue(200, R"({"wrong": 1})");
  chat.Queue(200, R"({"still": "wrong"})");
  CHECK_THROWS_AS(o.Vqa("img_01", "What color?"), ProtocolError);
  CHECK(o.requests() == 4);

  chat.Queue(200, "not json at all");
  chat.Queue(200, R"({"answer": "gold"})");
  CHECK(o.Vqa("img_01", "What color?").text == "gold");
  CHECK(o.requests() == 6);
}

TEST_CASE("http oracle image content and plain-text operations") {
  StubChat chat;
  HttpOracle o(chat.Config());
  auto dir = testing::TempDir("vqa_image");
  {
    std::ofstream out(dir / "a.png", std::ios::binary);
    out << "abc";
  }
  chat.Queue(200, R"({"answer": "", "valid": false})");
  CHECK(o.Vqa((dir / "a.png").string(), "What?").invalid);
  chat.Queue(200, R"({"answer": "x"})");
  o.Vqa("img_07", "What?");
  {
    auto content = chat.bodies[0]["messages"][1]["content"];
    REQUIRE(content.is_array());
    CHECK(content[1]["image_url"]["url"] == "data:image/png;base64,YWJj");
    auto stand_in = chat.bodies[1]["messages"][1]["content"];
    CHECK(stand_in[1]["text"] == "IMAGE: img_07");
  }

  chat.Queue(200, "False.");
  CHECK_FALSE(o.JudgeEquivalence("a dog", "a cat"));
  CHECK_FALSE(chat.bodies[2].contains("response_format"));
  chat.Queue(200, "  Photographs of golden dunes.  ");
  CHECK(o.Captionize("Long text.") == "Photographs of golden dunes.");

  chat.Queue(200, R"({"SENSE": "gold.n.01"})");
  CHECK(o.DisambiguateSense("gold", {"yellow"}, TwoSenses()) == "gold.n.01");
  chat.Queue(200, R"({"SENSE": "gold.n.09"})");
  CHECK_THROWS_AS(o.DisambiguateSense("gold", {"yellow"}, TwoSenses()),
                  SenseSelectionError);
  chat.Queue(200, R"({"NEW_INFORMATION": true})");
  CHECK(o.NoveltyCheck("a --b--> c", "a --b--> c\na --d--> e"));
  chat.Queue(200, R"({"DESCRIPTION": "Dunes."})");
  CHECK(o.WriteDescription("a --b--> c") == "Dunes.");
  chat.Queue(200, R"({"DIFFERENCES": ["more red", 3, "less blue"]})");
  CHECK(o.ProposeDifferences("a", "b", 0, 15, {}) ==
        std::vector<std::string>{"more red", "less blue"});
}

TEST_CASE("http oracle rejects a base URL without a scheme") {
  HttpOracleConfig c;
  c.base_url = "localhost/v1";
  CHECK_THROWS_AS(HttpOracle{c}, InputError);
}

}  // namespace
}  // namespace setdesc
