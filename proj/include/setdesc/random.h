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

#ifndef SETDESC_RANDOM_H_
#define SETDESC_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace setdesc {

// Seeded generator whose draws are identical across standard libraries.
// The std distributions are implementation defined, so bounded integers
// are drawn by rejection from the raw 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  std::size_t UniformIndex(std::size_t n);

  // Uniform in [0, 1).
  double UniformReal();

  // m distinct indices from [0, n) in draw order; m is clamped to n.
  std::vector<std::size_t> Sample(std::size_t n, std::size_t m);

  // Engine state as text, for trace checkpoints.
  std::string State() const;
  void Restore(const std::string &state);

 private:
  std::mt19937_64 engine_;
};

}  // namespace setdesc

#endif  // SETDESC_RANDOM_H_
