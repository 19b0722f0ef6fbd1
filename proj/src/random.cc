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

#include "setdesc/random.h"

#include <limits>
#include <numeric>
#include <sstream>

#include "setdesc/errors.h"

namespace setdesc {

std::size_t Rng::UniformIndex(std::size_t n) {
  if (n == 0) throw InvariantError("UniformIndex over an empty range");
  const std::uint64_t bound = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double Rng::UniformReal() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> Rng::Sample(std::size_t n, std::size_t m) {
  if (m > n) m = n;
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + UniformIndex(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  return pool;
}

std::string Rng::State() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::Restore(const std::string &state) {
  std::istringstream in(state);
  in >> engine_;
  if (!in) throw InputError("malformed generator state");
}

}  // namespace setdesc
