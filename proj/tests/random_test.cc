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

#include <set>

#include "doctest.h"
#include "setdesc/errors.h"
#include "setdesc/random.h"

namespace setdesc {
namespace {

TEST_CASE("same seed gives the same draws") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    auto x = a.Next();
    CHECK(x == b.Next());
    (void)c.Next();
  }
  CHECK(Rng(42).Next() != Rng(43).Next());
}

TEST_CASE("sample draws distinct in-range indices and clamps") {
  Rng rng(1);
  for (std::size_t n = 1; n < 40; ++n) {
    for (std::size_t m : {std::size_t{1}, std::size_t{5}, n, n + 7}) {
      auto s = rng.Sample(n, m);
      CHECK(s.size() == std::min(n, m));
      std::set<std::size_t> unique(s.begin(), s.end());
      CHECK(unique.size() == s.size());
      for (auto i : s) CHECK(i < n);
    }
  }
  CHECK(rng.Sample(0, 3).empty());
}

TEST_CASE("uniform index covers the range evenly") {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[rng.UniformIndex(7)];
  for (int c : counts) CHECK(std::abs(c - draws / 7) < 600);
  for (int i = 0; i < 1000; ++i) {
    double x = rng.UniformReal();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("state round-trips through text") {
  Rng rng(5);
  for (int i = 0; i < 17; ++i) rng.Next();
  std::string state = rng.State();
  auto expected = rng.Sample(100, 10);
  Rng other(999);
  other.Restore(state);
  CHECK(other.Sample(100, 10) == expected);
  CHECK_THROWS_AS(other.Restore("garbage"), InputError);
}

}  // namespace
}  // namespace setdesc
