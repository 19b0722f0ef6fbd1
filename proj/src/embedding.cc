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

#include "setdesc/embedding.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numbers>

#include "json.hpp"
#include "setdesc/errors.h"
#include "setdesc/hashing.h"
#include "setdesc/random.h"

namespace setdesc {

Matrix Matrix::FromRows(const std::vector<std::vector<float>> &rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  m.values.reserve(m.rows * m.cols);
  for (const auto &r : rows) {
    if (r.size() != m.cols) throw InputError("ragged embedding rows");
    m.values.insert(m.values.end(), r.begin(), r.end());
  }
  return m;
}

double Dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw InputError("dimension mismatch: " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

std::vector<float> Normalize(std::span<const float> v) {
  double norm = std::sqrt(Dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InputError("cannot normalize a zero or non-finite vector");
  }
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
  }
  return out;
}

std::vector<float> HashEmbeddingProvider::Vector(const std::string &key) const {
  Rng rng(Fnv1a64(key));
  std::vector<float> v(dim_);
  // Box-Muller on the portable uniform draws.
  for (std::size_t i = 0; i < dim_; i += 2) {
    double u1 = 1.0 - rng.UniformReal();
    double u2 = rng.UniformReal();
    double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = static_cast<float>(r * std::cos(2.0 * std::numbers::pi * u2));
    if (i + 1 < dim_) {
      v[i + 1] = static_cast<float>(r * std::sin(2.0 * std::numbers::pi * u2));
    }
  }
  return v;
}

std::vector<std::vector<float>> HashEmbeddingProvider::EmbedTexts(
    std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto &t : texts) out.push_back(Vector("text:" + t));
  return out;
}

std::vector<std::vector<float>> HashEmbeddingProvider::EmbedImages(
    std::span<const std::string> refs) {
  std::vector<std::vector<float>> out;
  out.reserve(refs.size());
  for (const auto &r : refs) out.push_back(Vector("image:" + r));
  return out;
}

std::unique_ptr<TableEmbeddingProvider> TableEmbeddingProvider::Load(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding table " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    auto table = std::make_unique<TableEmbeddingProvider>(
        j.at("dim").get<std::size_t>());
    const nlohmann::json texts = j.value("texts", nlohmann::json::object());
    const nlohmann::json images = j.value("images", nlohmann::json::object());
    for (const auto &[k, v] : texts.items()) {
      table->SetText(k, v.get<std::vector<float>>());
    }
    for (const auto &[k, v] : images.items()) {
      table->SetImage(k, v.get<std::vector<float>>());
    }
    return table;
  } catch (const nlohmann::json::exception &e) {
    throw InputError("malformed embedding table " + path.string() + ": " +
                     e.what());
  }
}

void TableEmbeddingProvider::SetText(const std::string &text,
                                     std::vector<float> v) {
  if (v.size() != dim_) throw InputError("table vector has wrong dimension");
  texts_[text] = std::move(v);
}

void TableEmbeddingProvider::SetImage(const std::string &ref,
                                      std::vector<float> v) {
  if (v.size() != dim_) throw InputError("table vector has wrong dimension");
  images_[ref] = std::move(v);
}

std::vector<std::vector<float>> TableEmbeddingProvider::EmbedTexts(
    std::span<const std::string> texts) {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto &t : texts) {
    auto it = texts_.find(t);
    out.push_back(it != texts_.end() ? it->second : hash_.Vector("text:" + t));
  }
  return out;
}

std::vector<std::vector<float>> TableEmbeddingProvider::EmbedImages(
    std::span<const std::string> refs) {
  std::vector<std::vector<float>> out;
  out.reserve(refs.size());
  for (const auto &r : refs) {
    auto it = images_.find(r);
    if (it == images_.end()) throw InputError("no table entry for image " + r);
    out.push_back(it->second);
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(
    const std::string &spec) {
  if (spec == "http") {
    const char *url = std::getenv("SETDESC_EMBED_URL");
    if (url == nullptr || *url == '\0') {
      throw InputError("SETDESC_EMBED_URL is not set");
    }
    return std::make_unique<HttpEmbeddingProvider>(url);
  }
  if (spec.starts_with("http://") || spec.starts_with("https://")) {
    return std::make_unique<HttpEmbeddingProvider>(spec);
  }
  if (spec.starts_with("hash:")) {
    std::size_t dim = 0;
    try {
      dim = std::stoul(spec.substr(5));
    } catch (const std::exception &) {
      throw InputError("bad embedding spec " + spec);
    }
    if (dim == 0) throw InputError("embedding dimension must be positive");
    return std::make_unique<HashEmbeddingProvider>(dim);
  }
  if (spec.starts_with("table:")) {
    return TableEmbeddingProvider::Load(spec.substr(6));
  }
  throw InputError("unknown embedding provider " + spec);
}

}  // namespace setdesc
