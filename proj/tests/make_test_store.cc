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

// Writes the synthetic desert store used by the CLI tests.

#include <iostream>

#include "fixtures.h"

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_test_store <out.setdesc>\n";
    return 1;
  }
  setdesc::testing::DesertStore().Save(argv[1]);
  return 0;
}
