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

// Shared test data: the toy lexicon, the synthetic desert image store and
// helpers to build stores with known classification outcomes.

#ifndef SETDESC_TESTS_FIXTURES_H_
#define SETDESC_TESTS_FIXTURES_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "setdesc/embedding.h"
#include "setdesc/engine.h"
#include "setdesc/lexicon.h"
#include "setdesc/random.h"
#include "setdesc/verifier.h"

namespace setdesc::testing {

std::filesystem::path DataPath(const std::string &name);

// Fresh empty directory under the system temp dir.
std::filesystem::path TempDir(const std::string &tag);

Lexicon ToyLexicon();

inline constexpr std::size_t kDesertDim = 256;
inline constexpr std::size_t kDesertImages = 64;
inline constexpr std::size_t kDesertGoldImages = 60;

// 64 images that all show a desert, sky and a photograph; the first 60
// are gold and the rest red. Built from the hash provider's text vectors
// so that HashEmbeddingProvider(kDesertDim) verifies against it.
EmbeddingStore DesertStore();

// Random unit vectors, one row each.
Matrix RandomUnitRows(Rng &rng, std::size_t rows, std::size_t dim);

// Store of `total` rows, the first `positive` equal to `pos_text` and the
// rest equal to `neg_text` (both normalized first).
EmbeddingStore TwoClassStore(const std::vector<float> &pos_text,
                             const std::vector<float> &neg_text,
                             std::size_t positive, std::size_t total);

// Reads a whole file.
std::string Slurp(const std::filesystem::path &path);

}  // namespace setdesc::testing

#endif  // SETDESC_TESTS_FIXTURES_H_
