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

#include "setdesc/hypothesis.h"

#include <algorithm>
#include <set>

#include "setdesc/errors.h"

namespace setdesc {

HypothesisChain Expand(const Hypothesis &h0, const Lexicon &lex,
                       std::size_t delta) {
  HypothesisChain chain;
  Hypothesis first = h0;
  first.level = 0;
  if (first.synset && !lex.Contains(*first.synset)) first.synset.reset();
  chain.items.push_back(first);
  if (!first.synset) return chain;

  for (const auto &parent : lex.Ancestors(*first.synset, delta)) {
    Hypothesis h;
    h.triplet = first.triplet;
    h.triplet.object = lex.Get(parent).DisplayName();
    h.synset = parent;
    h.level = chain.items.size();
    chain.items.push_back(std::move(h));
  }
  chain.delta_used = chain.items.size() - 1;
  return chain;
}

LabelSets BuildLabelSets(const Hypothesis &h, const Lexicon &lex,
                         std::size_t max_examples) {
  LabelSets sets;
  sets.positives.push_back(h.triplet.object);
  if (!h.synset || !lex.Contains(*h.synset)) return sets;

  std::set<std::string> seen{h.triplet.object};
  for (const auto &id : lex.Hyponyms(*h.synset, /*transitive=*/true)) {
    if (sets.positives.size() > max_examples) break;
    std::string name = lex.Get(id).DisplayName();
    if (seen.insert(name).second) sets.positives.push_back(std::move(name));
  }
  for (const auto &id : lex.Siblings(*h.synset)) {
    if (sets.negatives.size() >= max_examples) break;
    std::string name = lex.Get(id).DisplayName();
    if (seen.insert(name).second) sets.negatives.push_back(std::move(name));
  }
  return sets;
}

ChainVerification VerifyChain(const HypothesisChain &chain,
                              const VerifierFn &verify, const Lexicon &lex,
                              std::size_t max_examples) {
  if (chain.items.empty()) throw InputError("empty hypothesis chain");
  ChainVerification out;
  for (auto it = chain.items.rbegin(); it != chain.items.rend(); ++it) {
    LevelVerification level{it->level, BuildLabelSets(*it, lex, max_examples),
                            std::nullopt};
    bool accepted = false;
    if (!level.labels.negatives.empty()) {
      level.result = verify(*it, level.labels);
      accepted = level.result->accepted;
    }
    out.levels.push_back(std::move(level));
    if (!accepted) break;
    out.verified = *it;
  }
  return out;
}

}  // namespace setdesc
