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

#include <fstream>
#include <iterator>

#include "httplib.h"
#include "json.hpp"
#include "setdesc/embedding.h"
#include "setdesc/errors.h"

namespace setdesc {
namespace {

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read image " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url)
    : base_url_(std::move(base_url)) {
  httplib::Client client(base_url_);
  client.set_read_timeout(120);
  auto res = client.Get("/info");
  if (!res) {
    throw ExternalError("embedding service unreachable at " + base_url_ +
                        ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ExternalError("embedding service /info returned " +
                        std::to_string(res->status));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    dim_ = j.at("dim").get<std::size_t>();
    model_ = j.value("model", std::string());
  } catch (const nlohmann::json::exception &e) {
    throw ProtocolError(std::string("bad /info reply: ") + e.what());
  }
  if (dim_ == 0) throw ProtocolError("embedding service reports dim 0");
}

std::vector<std::vector<float>> HttpEmbeddingProvider::Post(
    const std::string &route, const std::string &field,
    std::span<const std::string> inputs) {
  std::vector<std::vector<float>> out;
  out.reserve(inputs.size());
  httplib::Client client(base_url_);
  client.set_read_timeout(600);
  for (std::size_t off = 0; off < inputs.size(); off += kMaxBatch) {
    auto chunk = inputs.subspan(off, std::min(kMaxBatch, inputs.size() - off));
    nlohmann::json body = {{field, std::vector<std::string>(chunk.begin(),
                                                            chunk.end())}};
    auto res = client.Post(route, body.dump(), "application/json");
    if (!res) {
      throw ExternalError("embedding request failed: " +
                          httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw ExternalError(route + " returned " + std::to_string(res->status));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      auto rows = j.at("embeddings").get<std::vector<std::vector<float>>>();
      if (rows.size() != chunk.size()) {
        throw ProtocolError(route + " returned " + std::to_string(rows.size()) +
                            " vectors for " + std::to_string(chunk.size()) +
                            " inputs");
      }
      for (auto &r : rows) {
        if (r.size() != dim_) throw ProtocolError(route + " dimension mismatch");
        out.push_back(std::move(r));
      }
    } catch (const nlohmann::json::exception &e) {
      throw ProtocolError(route + " reply malformed: " + e.what());
    }
  }
  return out;
}

std::vector<std::vector<float>> HttpEmbeddingProvider::EmbedTexts(
    std::span<const std::string> texts) {
  return Post("/embed_text", "texts", texts);
}

std::vector<std::vector<float>> HttpEmbeddingProvider::EmbedImages(
    std::span<const std::string> refs) {
  std::vector<std::string> encoded;
  encoded.reserve(refs.size());
  for (const auto &r : refs) {
    encoded.push_back(httplib::detail::base64_encode(ReadFileBytes(r)));
  }
  return Post("/embed_image", "images_b64", encoded);
}

}  // namespace setdesc
