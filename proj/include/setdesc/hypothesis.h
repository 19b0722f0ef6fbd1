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

#ifndef SETDESC_HYPOTHESIS_H_
#define SETDESC_HYPOTHESIS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "setdesc/concept_graph.h"
#include "setdesc/lexicon.h"

namespace setdesc {

struct Hypothesis {
  Triplet triplet;
  std::optional<SynsetId> synset;  // nullopt: object not in the lexicon
  std::size_t level = 0;
};

// h_0 (most specific) first, h_k (most general) last.
struct HypothesisChain {
  std::vector<Hypothesis> items;
  std::size_t delta_used = 0;
};

// Object terms for one-vs-all verification. positives[0] is always the
// hypothesis' own object.
struct LabelSets {
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

struct VerificationResult {
  std::size_t positive_count = 0;
  std::size_t total = 0;
  double rate = 0.0;
  bool accepted = false;
  double alpha = 0.0;
};

// Generalizes h0 by walking up to `delta` hypernym steps.
HypothesisChain Expand(const Hypothesis &h0, const Lexicon &lex,
                       std::size_t delta);

// Positives: the object plus breadth-first hyponym names (at most
// max_examples of them). Negatives: sibling names minus positives, at most
// max_examples. An unresolved hypothesis yields {[object], []}.
LabelSets BuildLabelSets(const Hypothesis &h, const Lexicon &lex,
                         std::size_t max_examples);

using VerifierFn =
    std::function<VerificationResult(const Hypothesis &, const LabelSets &)>;

struct LevelVerification {
  std::size_t level = 0;
  LabelSets labels;
  // nullopt when the level had no negatives and was rejected unevaluated.
  std::optional<VerificationResult> result;
};

struct ChainVerification {
  std::optional<Hypothesis> verified;  // most specific accepted level
  std::vector<LevelVerification> levels;  // in evaluation order (k down)
};

// General-to-specific walk. Stops at the first rejected level; levels below
// it are never evaluated. A level with no negative terms counts as rejected
// without calling `verify`, since it cannot be falsified.
ChainVerification VerifyChain(const HypothesisChain &chain,
                              const VerifierFn &verify, const Lexicon &lex,
                              std::size_t max_examples);

}  // namespace setdesc

#endif  // SETDESC_HYPOTHESIS_H_
