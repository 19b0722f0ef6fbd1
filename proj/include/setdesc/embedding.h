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

#ifndef SETDESC_EMBEDDING_H_
#define SETDESC_EMBEDDING_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace setdesc {

// Dense row-major float32 matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c) {}

  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * cols, cols};
  }
  std::span<float> row(std::size_t i) {
    return {values.data() + i * cols, cols};
  }

  static Matrix FromRows(const std::vector<std::vector<float>> &rows);
};

// L2-normalized copy. Throws InputError on a zero or non-finite norm.
std::vector<float> Normalize(std::span<const float> v);

double Dot(std::span<const float> a, std::span<const float> b);

// Source of raw (unnormalized) vectors for texts and images. Callers
// normalize. Implementations must be safe for concurrent calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<std::vector<float>> EmbedTexts(
      std::span<const std::string> texts) = 0;
  // `refs` are image paths or opaque image ids, depending on the provider.
  virtual std::vector<std::vector<float>> EmbedImages(
      std::span<const std::string> refs) = 0;
};

// Deterministic pseudo-random Gaussian vectors seeded by the input string.
// Distinct strings land on nearly orthogonal directions in high dimensions.
class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::vector<std::vector<float>> EmbedTexts(
      std::span<const std::string> texts) override;
  std::vector<std::vector<float>> EmbedImages(
      std::span<const std::string> refs) override;

  std::vector<float> Vector(const std::string &key) const;

 private:
  std::size_t dim_;
};

// Fixed lookup table, usually loaded from JSON:
//   {"dim": d, "texts": {"gold": [...]}, "images": {"img_0": [...]}}
// Unknown texts fall back to hashed vectors; unknown images are an error.
class TableEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(std::size_t dim) : dim_(dim), hash_(dim) {}
  static std::unique_ptr<TableEmbeddingProvider> Load(
      const std::filesystem::path &path);

  void SetText(const std::string &text, std::vector<float> v);
  void SetImage(const std::string &ref, std::vector<float> v);

  std::size_t dim() const override { return dim_; }
  std::vector<std::vector<float>> EmbedTexts(
      std::span<const std::string> texts) override;
  std::vector<std::vector<float>> EmbedImages(
      std::span<const std::string> refs) override;

 private:
  std::size_t dim_;
  HashEmbeddingProvider hash_;
  std::map<std::string, std::vector<float>> texts_;
  std::map<std::string, std::vector<float>> images_;
};

// Client for the embedding service: GET /info, POST /embed_text and
// POST /embed_image. Batches are split at 256 inputs.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  static constexpr std::size_t kMaxBatch = 256;

  // Queries /info for the dimension.
  explicit HttpEmbeddingProvider(std::string base_url);

  std::size_t dim() const override { return dim_; }
  const std::string &model() const { return model_; }
  std::vector<std::vector<float>> EmbedTexts(
      std::span<const std::string> texts) override;
  std::vector<std::vector<float>> EmbedImages(
      std::span<const std::string> refs) override;

 private:
  std::vector<std::vector<float>> Post(const std::string &route,
                                       const std::string &field,
                                       std::span<const std::string> inputs);

  std::string base_url_;
  std::size_t dim_ = 0;
  std::string model_;
};

// Parses "http", "hash:<dim>" or "table:<file.json>".
std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(
    const std::string &spec);

}  // namespace setdesc

#endif  // SETDESC_EMBEDDING_H_
