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

#include "fixtures.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace setdesc::testing {

std::filesystem::path DataPath(const std::string &name) {
  return std::filesystem::path(SETDESC_TEST_DATA) / name;
}

std::filesystem::path TempDir(const std::string &tag) {
  auto dir = std::filesystem::temp_directory_path() / ("setdesc_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Lexicon ToyLexicon() { return Lexicon::Load(DataPath("toy_lexicon.jsonl")); }

EmbeddingStore DesertStore() {
  HashEmbeddingProvider provider(kDesertDim);
  auto text = [&](const std::string &t) {
    return Normalize(provider.Vector("text:" + t));
  };
  const auto desert = text("desert");
  const auto sky = text("sky");
  const auto photo = text("photograph");
  const auto gold = text("gold");
  const auto red = text("red");
  Rng rng(7);
  std::vector<std::string> ids;
  Matrix m(kDesertImages, kDesertDim);
  for (std::size_t i = 0; i < kDesertImages; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "img_%02zu", i);
    ids.push_back(id);
    const auto &hue = i < kDesertGoldImages ? gold : red;
    std::vector<float> v(kDesertDim);
    for (std::size_t j = 0; j < kDesertDim; ++j) {
      // Small uniform noise keeps rows distinct.
      double noise = (rng.UniformReal() - 0.5) * 0.05;
      v[j] = static_cast<float>(desert[j] + sky[j] + photo[j] + hue[j] + noise);
    }
    auto n = Normalize(v);
    std::copy(n.begin(), n.end(), m.row(i).begin());
  }
  return EmbeddingStore(std::move(ids), std::move(m));
}

Matrix RandomUnitRows(Rng &rng, std::size_t rows, std::size_t dim) {
  Matrix m(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<float> v(dim);
    for (auto &x : v) x = static_cast<float>(rng.UniformReal() * 2.0 - 1.0);
    auto n = Normalize(v);
    std::copy(n.begin(), n.end(), m.row(i).begin());
  }
  return m;
}

EmbeddingStore TwoClassStore(const std::vector<float> &pos_text,
                             const std::vector<float> &neg_text,
                             std::size_t positive, std::size_t total) {
  auto p = Normalize(pos_text);
  auto q = Normalize(neg_text);
  Matrix m(total, p.size());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < total; ++i) {
    ids.push_back("row_" + std::to_string(i));
    const auto &src = i < positive ? p : q;
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return EmbeddingStore(std::move(ids), std::move(m));
}

std::string Slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace setdesc::testing
