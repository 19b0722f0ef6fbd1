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

#ifndef SETDESC_VERIFIER_H_
#define SETDESC_VERIFIER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "setdesc/embedding.h"
#include "setdesc/hypothesis.h"

namespace setdesc {

// Immutable N x d matrix of L2-normalized image embeddings with ids.
class EmbeddingStore {
 public:
  static constexpr double kNormTolerance = 1e-4;

  EmbeddingStore() = default;
  // Takes ownership of already-normalized rows; validates the invariants.
  EmbeddingStore(std::vector<std::string> ids, Matrix matrix);

  // Fetches rows in batches of `batch`, normalizes, keeps input order.
  // Provider failures are retried up to `attempts` times per batch.
  static EmbeddingStore Build(const std::vector<std::string> &ids,
                              EmbeddingProvider &provider, std::size_t batch,
                              int attempts = 3);

  // Little-endian: "SDSC" | u32 version | u32 dim | u64 count |
  // ids (u32 len + bytes) | count*dim f32 | u32 CRC32 of the matrix bytes.
  void Save(const std::filesystem::path &path) const;
  static EmbeddingStore Load(const std::filesystem::path &path);
  std::string Serialize() const;
  static EmbeddingStore Deserialize(const std::string &bytes);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return matrix_.cols; }
  const std::vector<std::string> &ids() const { return ids_; }
  const Matrix &matrix() const { return matrix_; }
  std::span<const float> row(std::size_t i) const { return matrix_.row(i); }
  std::uint32_t checksum() const;

  // Rows for `ids`, in that order. Throws InputError on unknown ids.
  EmbeddingStore Subset(const std::vector<std::string> &ids) const;

 private:
  std::vector<std::string> ids_;
  Matrix matrix_;
};

// Weighted kNN over cosine similarity. Examples are the positive rows
// followed by the negative rows; each image takes its k most similar
// examples (ties in similarity go to the lower example index) and is
// positive iff the summed positive similarity strictly exceeds the summed
// negative similarity. Similarities accumulate in double.
std::vector<std::uint8_t> KnnClassify(const Matrix &images,
                                      const Matrix &positives,
                                      const Matrix &negatives, std::size_t k);

struct VerifyOptions {
  std::size_t k = 1;
  double alpha = 0.8;
  std::string text_template = "{term}";
};

// Embeds the label terms, classifies every store row and thresholds the
// positive rate at alpha (rate >= alpha accepts).
VerificationResult Verify(const EmbeddingStore &store, const LabelSets &labels,
                          EmbeddingProvider &provider,
                          const VerifyOptions &options);

VerificationResult MakeResult(std::size_t positives, std::size_t total,
                              double alpha);

// Replaces every "{term}" in the template.
std::string ApplyTemplate(const std::string &tmpl, const std::string &term);

struct CostEstimate {
  double embed_seconds = 0.0;
  double knn_seconds = 0.0;
};

// embed = n / rate; knn = 2 n c d / flops.
CostEstimate EstimateCost(double n, double c, double d, double flops,
                          double rate = 12.0);

// Five images per term. Each image goes to the more similar text (ties go
// to text_a); the pair is distinguishable when at least 8 of 10 match.
bool PairDistinguishable(const Matrix &images_a, const Matrix &images_b,
                         std::span<const float> text_a,
                         std::span<const float> text_b);

enum class OvergenericRule {
  kBelow,    // indistinguishable fraction < phi (formula as printed)
  kAtLeast,  // indistinguishable fraction >= phi
};

bool Overgeneric(const std::vector<bool> &pair_distinguishable, double phi,
                 OvergenericRule rule = OvergenericRule::kBelow);

}  // namespace setdesc

#endif  // SETDESC_VERIFIER_H_
