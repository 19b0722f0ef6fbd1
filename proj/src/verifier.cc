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

#include "setdesc/verifier.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "setdesc/errors.h"
#include "setdesc/hashing.h"

namespace setdesc {
namespace {

constexpr char kMagic[4] = {'S', 'D', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void PutLE(std::string &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >>
                                     (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view Take(std::size_t n) {
    Need(n);
    std::string_view out(bytes_.data() + pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw InputError("store file truncated");
  }

  const std::string &bytes_;
  std::size_t pos_ = 0;
};

void CheckRows(const std::vector<std::string> &ids, const Matrix &m) {
  if (ids.size() != m.rows) {
    throw InvariantError("store id count does not match row count");
  }
  std::unordered_set<std::string> seen;
  for (const auto &id : ids) {
    if (!seen.insert(id).second) throw InputError("duplicate store id " + id);
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    double norm = std::sqrt(Dot(m.row(i), m.row(i)));
    if (std::abs(norm - 1.0) > EmbeddingStore::kNormTolerance) {
      throw InputError("store row " + ids[i] + " is not unit length");
    }
  }
}

Matrix EmbedTerms(const std::vector<std::string> &terms,
                  EmbeddingProvider &provider, const std::string &tmpl) {
  std::vector<std::string> texts;
  texts.reserve(terms.size());
  for (const auto &t : terms) texts.push_back(ApplyTemplate(tmpl, t));
  auto raw = provider.EmbedTexts(texts);
  if (raw.size() != texts.size()) {
    throw ExternalError("provider returned the wrong number of vectors");
  }
  std::vector<std::vector<float>> rows;
  rows.reserve(raw.size());
  for (const auto &r : raw) rows.push_back(Normalize(r));
  return Matrix::FromRows(rows);
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::vector<std::string> ids, Matrix matrix)
    : ids_(std::move(ids)), matrix_(std::move(matrix)) {
  CheckRows(ids_, matrix_);
}

EmbeddingStore EmbeddingStore::Build(const std::vector<std::string> &ids,
                                     EmbeddingProvider &provider,
                                     std::size_t batch, int attempts) {
  if (ids.empty()) throw InputError("cannot build a store from no ids");
  if (batch == 0) throw InputError("batch size must be positive");
  const std::size_t dim = provider.dim();
  Matrix m(ids.size(), dim);
  for (std::size_t off = 0; off < ids.size(); off += batch) {
    std::span<const std::string> chunk(ids.data() + off,
                                       std::min(batch, ids.size() - off));
    std::vector<std::vector<float>> rows;
    for (int attempt = 1;; ++attempt) {
      try {
        rows = provider.EmbedImages(chunk);
        break;
      } catch (const ExternalError &e) {
        if (attempt >= attempts) throw;
        spdlog::warn("embedding batch at {} failed ({}), retrying", off,
                     e.what());
      }
    }
    if (rows.size() != chunk.size()) {
      throw ExternalError("provider returned the wrong number of vectors");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != dim) {
        throw InputError("dimension mismatch for " + chunk[i] + ": got " +
                         std::to_string(rows[i].size()) + ", expected " +
                         std::to_string(dim));
      }
      std::vector<float> unit;
      try {
        unit = Normalize(rows[i]);
      } catch (const InputError &) {
        throw InputError("zero-norm embedding for " + chunk[i]);
      }
      std::copy(unit.begin(), unit.end(), m.row(off + i).begin());
    }
  }
  return EmbeddingStore(ids, std::move(m));
}

std::string EmbeddingStore::Serialize() const {
  std::string out(kMagic, 4);
  PutLE<std::uint32_t>(out, kVersion);
  PutLE<std::uint32_t>(out, static_cast<std::uint32_t>(dim()));
  PutLE<std::uint64_t>(out, size());
  for (const auto &id : ids_) {
    PutLE<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out += id;
  }
  const std::size_t matrix_start = out.size();
  out.reserve(out.size() + matrix_.values.size() * 4 + 4);
  for (float f : matrix_.values) {
    PutLE<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  }
  std::span<const unsigned char> section(
      reinterpret_cast<const unsigned char *>(out.data()) + matrix_start,
      out.size() - matrix_start);
  PutLE<std::uint32_t>(out, Crc32(section));
  return out;
}

EmbeddingStore EmbeddingStore::Deserialize(const std::string &bytes) {
  Reader r(bytes);
  if (r.Take(4) != std::string_view(kMagic, 4)) {
    throw InputError("not a store file (bad magic)");
  }
  if (auto v = r.Get<std::uint32_t>(); v != kVersion) {
    throw InputError("unsupported store version " + std::to_string(v));
  }
  const std::size_t dim = r.Get<std::uint32_t>();
  const std::uint64_t count = r.Get<std::uint64_t>();
  std::vector<std::string> ids;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto len = r.Get<std::uint32_t>();
    ids.emplace_back(r.Take(len));
  }
  if (count * dim > r.remaining() / 4) throw InputError("store file truncated");
  auto section = r.Take(count * dim * 4);
  Matrix m(count, dim);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(
                  static_cast<unsigned char>(section[i * 4 + b]))
              << (8 * b);
    }
    m.values[i] = std::bit_cast<float>(bits);
  }
  const std::uint32_t stored = r.Get<std::uint32_t>();
  if (r.remaining() != 0) throw InputError("trailing bytes after store");
  std::span<const unsigned char> raw(
      reinterpret_cast<const unsigned char *>(section.data()), section.size());
  if (Crc32(raw) != stored) throw InputError("store checksum mismatch");
  return EmbeddingStore(std::move(ids), std::move(m));
}

void EmbeddingStore::Save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write store " + path.string());
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

EmbeddingStore EmbeddingStore::Load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open store " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>()};
  return Deserialize(bytes);
}

std::uint32_t EmbeddingStore::checksum() const {
  std::string section;
  section.reserve(matrix_.values.size() * 4);
  for (float f : matrix_.values) {
    PutLE<std::uint32_t>(section, std::bit_cast<std::uint32_t>(f));
  }
  return Crc32({reinterpret_cast<const unsigned char *>(section.data()),
                section.size()});
}

EmbeddingStore EmbeddingStore::Subset(
    const std::vector<std::string> &ids) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids_.size(); ++i) index.emplace(ids_[i], i);
  Matrix m(ids.size(), dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = index.find(ids[i]);
    if (it == index.end()) throw InputError("image not in store: " + ids[i]);
    auto src = matrix_.row(it->second);
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  EmbeddingStore out;
  out.ids_ = ids;
  out.matrix_ = std::move(m);
  CheckRows(out.ids_, out.matrix_);
  return out;
}

std::vector<std::uint8_t> KnnClassify(const Matrix &images,
                                      const Matrix &positives,
                                      const Matrix &negatives, std::size_t k) {
  if (k == 0) throw InputError("k must be at least 1");
  if (positives.rows == 0 || negatives.rows == 0) {
    throw InputError("kNN needs at least one positive and one negative");
  }
  if (positives.cols != images.cols || negatives.cols != images.cols) {
    throw InputError("dimension mismatch between images and examples");
  }
  const std::size_t num_pos = positives.rows;
  const std::size_t num_examples = num_pos + negatives.rows;
  const std::size_t kk = std::min(k, num_examples);
  auto example = [&](std::size_t c) {
    return c < num_pos ? positives.row(c) : negatives.row(c - num_pos);
  };

  std::vector<std::uint8_t> labels(images.rows, 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> sims(num_examples);
    std::vector<std::size_t> order(num_examples);
    for (std::size_t i = begin; i < end; ++i) {
      auto img = images.row(i);
      for (std::size_t c = 0; c < num_examples; ++c) {
        sims[c] = Dot(img, example(c));
      }
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          return sims[a] != sims[b] ? sims[a] > sims[b]
                                                    : a < b;
                        });
      double margin = 0.0;
      for (std::size_t j = 0; j < kk; ++j) {
        std::size_t c = order[j];
        margin += c < num_pos ? sims[c] : -sims[c];
      }
      labels[i] = margin > 0.0 ? 1 : 0;
    }
  };

  constexpr std::size_t kBlock = 512;
  const std::size_t blocks = (images.rows + kBlock - 1) / kBlock;
  const std::size_t workers = std::min<std::size_t>(
      std::max(1u, std::thread::hardware_concurrency()), blocks);
  if (workers <= 1) {
    work(0, images.rows);
    return labels;
  }
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) {
        work(b * kBlock, std::min(images.rows, (b + 1) * kBlock));
      }
    });
  }
  threads.clear();  // joins
  return labels;
}

std::string ApplyTemplate(const std::string &tmpl, const std::string &term) {
  static const std::string kSlot = "{term}";
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto hit = tmpl.find(kSlot, pos);
    out.append(tmpl, pos, hit == std::string::npos ? std::string::npos
                                                   : hit - pos);
    if (hit == std::string::npos) break;
    out += term;
    pos = hit + kSlot.size();
  }
  return out;
}

VerificationResult MakeResult(std::size_t positives, std::size_t total,
                              double alpha) {
  VerificationResult r;
  r.positive_count = positives;
  r.total = total;
  r.alpha = alpha;
  r.rate = total == 0 ? 0.0
                      : static_cast<double>(positives) /
                            static_cast<double>(total);
  r.accepted = total > 0 && r.rate >= alpha;
  return r;
}

VerificationResult Verify(const EmbeddingStore &store, const LabelSets &labels,
                          EmbeddingProvider &provider,
                          const VerifyOptions &options) {
  if (labels.positives.empty()) throw InputError("no positive label terms");
  if (labels.negatives.empty()) {
    throw InputError("no negative label terms: hypothesis is unfalsifiable");
  }
  Matrix pos = EmbedTerms(labels.positives, provider, options.text_template);
  Matrix neg = EmbedTerms(labels.negatives, provider, options.text_template);
  auto result = KnnClassify(store.matrix(), pos, neg, options.k);
  std::size_t count = std::count(result.begin(), result.end(), 1);
  return MakeResult(count, store.size(), options.alpha);
}

CostEstimate EstimateCost(double n, double c, double d, double flops,
                          double rate) {
  if (!(n > 0) || !(c > 0) || !(d > 0) || !(flops > 0) || !(rate > 0)) {
    throw InputError("cost model inputs must be strictly positive");
  }
  return {n / rate, 2.0 * n * c * d / flops};
}

bool PairDistinguishable(const Matrix &images_a, const Matrix &images_b,
                         std::span<const float> text_a,
                         std::span<const float> text_b) {
  if (images_a.rows != 5 || images_b.rows != 5) {
    throw InputError("distinguishability probe needs 5 images per term");
  }
  int correct = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    if (Dot(images_a.row(i), text_a) >= Dot(images_a.row(i), text_b)) ++correct;
    if (Dot(images_b.row(i), text_b) > Dot(images_b.row(i), text_a)) ++correct;
  }
  return correct >= 8;
}

bool Overgeneric(const std::vector<bool> &pair_distinguishable, double phi,
                 OvergenericRule rule) {
  if (pair_distinguishable.empty()) {
    throw InputError("overgeneric test needs at least one hyponym pair");
  }
  auto dist = std::count(pair_distinguishable.begin(),
                         pair_distinguishable.end(), true);
  double indist = static_cast<double>(pair_distinguishable.size() - dist) /
                  static_cast<double>(pair_distinguishable.size());
  return rule == OvergenericRule::kBelow ? indist < phi : indist >= phi;
}

}  // namespace setdesc
