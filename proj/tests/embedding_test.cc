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

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "fixtures.h"
#include "httplib.h"
#include "json.hpp"
#include "setdesc/embedding.h"
#include "setdesc/errors.h"

namespace setdesc {
namespace {

TEST_CASE("normalize and dot") {
  std::vector<float> v{3, 4};
  auto n = Normalize(v);
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
  CHECK(Dot(n, n) == doctest::Approx(1.0));
  std::vector<float> zero{0, 0};
  CHECK_THROWS_AS(Normalize(zero), InputError);
  std::vector<float> inf{INFINITY, 1};
  CHECK_THROWS_AS(Normalize(inf), InputError);
  std::vector<float> three{1, 2, 3};
  CHECK_THROWS_AS(Dot(v, three), InputError);
  CHECK_THROWS_AS(Matrix::FromRows({{1, 2}, {3}}), InputError);
}

TEST_CASE("hash provider is deterministic and spreads strings apart") {
  HashEmbeddingProvider p(512);
  std::vector<std::string> texts{"gold", "red", "gold"};
  auto v = p.EmbedTexts(texts);
  CHECK(v[0] == v[2]);
  auto a = Normalize(v[0]);
  auto b = Normalize(v[1]);
  CHECK(std::abs(Dot(a, b)) < 0.2);
  std::vector<std::string> refs{"gold"};
  CHECK(p.EmbedImages(refs)[0] != v[0]);
  CHECK(HashEmbeddingProvider(7).Vector("x").size() == 7);
}

TEST_CASE("table provider and the provider factory") {
  auto dir = testing::TempDir("table_test");
  {
    std::ofstream out(dir / "t.json");
    out << R"({"dim": 2, "texts": {"gold": [1, 0]}, "images": {"a": [0, 1]}})";
  }
  auto p = MakeEmbeddingProvider("table:" + (dir / "t.json").string());
  std::vector<std::string> t{"gold", "other"};
  auto tv = p->EmbedTexts(t);
  CHECK(tv[0] == std::vector<float>{1, 0});
  CHECK(tv[1].size() == 2);
  std::vector<std::string> imgs{"a"};
  CHECK(p->EmbedImages(imgs)[0] == std::vector<float>{0, 1});
  std::vector<std::string> missing{"b"};
  CHECK_THROWS_AS(p->EmbedImages(missing), InputError);

  TableEmbeddingProvider table(2);
  CHECK_THROWS_AS(table.SetText("x", {1, 2, 3}), InputError);

  CHECK(MakeEmbeddingProvider("hash:16")->dim() == 16);
  CHECK_THROWS_AS(MakeEmbeddingProvider("hash:0"), InputError);
  CHECK_THROWS_AS(MakeEmbeddingProvider("hash:x"), InputError);
  CHECK_THROWS_AS(MakeEmbeddingProvider("nope"), InputError);
  CHECK_THROWS_AS(MakeEmbeddingProvider("table:/no/such/file.json"),
                  InputError);
}

// Local stand-in for the embedding service.
class StubService {
 public:
  explicit StubService(std::size_t dim) : dim_(dim) {
    server_.Get("/info", [this](const httplib::Request &, httplib::Response &res) {
      res.set_content(nlohmann::json{{"dim", dim_}, {"model", "stub"}}.dump(),
                      "application/json");
    });
    auto embed = [this](const std::string &field) {
      return [this, field](const httplib::Request &req, httplib::Response &res) {
        auto body = nlohmann::json::parse(req.body);
        auto inputs = body.at(field).get<std::vector<std::string>>();
        ++posts_;
        max_batch_ = std::max(max_batch_.load(), inputs.size());
        if (inputs.size() == 1 && inputs[0] == "fail") {
          res.status = 500;
          return;
        }
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &s : inputs) {
          std::vector<float> v(dim_, 0.0f);
          v[s.size() % dim_] = 1.0f;
          rows.push_back(v);
        }
        if (inputs.size() == 1 && inputs[0] == "short") rows = {{1.0}};
        res.set_content(nlohmann::json{{"embeddings", rows}}.dump(),
                        "application/json");
      };
    };
    server_.Post("/embed_text", embed("texts"));
    server_.Post("/embed_image", embed("images_b64"));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubService() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<std::size_t> posts_{0};
  std::atomic<std::size_t> max_batch_{0};

 private:
  std::size_t dim_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_CASE("http provider talks to the embedding service") {
  StubService stub(8);
  HttpEmbeddingProvider p(stub.url());
  CHECK(p.dim() == 8);
  CHECK(p.model() == "stub");

  std::vector<std::string> texts;
  for (int i = 0; i < 600; ++i) texts.push_back(std::string(i % 5 + 1, 'a'));
  auto rows = p.EmbedTexts(texts);
  REQUIRE(rows.size() == 600);
  CHECK(rows[3][4] == 1.0f);
  CHECK(stub.posts_ == 3);
  CHECK(stub.max_batch_ == HttpEmbeddingProvider::kMaxBatch);

  auto dir = testing::TempDir("http_embed_test");
  {
    std::ofstream out(dir / "img.bin", std::ios::binary);
    out << "abc";
  }
  std::vector<std::string> images{(dir / "img.bin").string()};
  // base64("abc") is "YWJj", four characters.
  CHECK(p.EmbedImages(images)[0][4] == 1.0f);
  std::vector<std::string> missing{(dir / "none.bin").string()};
  CHECK_THROWS_AS(p.EmbedImages(missing), InputError);

  std::vector<std::string> fail{"fail"};
  CHECK_THROWS_AS(p.EmbedTexts(fail), ExternalError);
  std::vector<std::string> short_row{"short"};
  CHECK_THROWS_AS(p.EmbedTexts(short_row), ProtocolError);
}

TEST_CASE("http provider reports an unreachable service") {
  CHECK_THROWS_AS(HttpEmbeddingProvider("http://127.0.0.1:1"), ExternalError);
}

}  // namespace
}  // namespace setdesc
