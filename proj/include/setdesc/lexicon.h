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

#ifndef SETDESC_LEXICON_H_
#define SETDESC_LEXICON_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace setdesc {

using SynsetId = std::string;

struct Synset {
  SynsetId id;
  std::vector<std::string> lemmas;
  std::string gloss;
  std::vector<SynsetId> hypernyms;  // stored order matters: see Ancestors()
  std::string pos;

  // First lemma with underscores turned into spaces ("chromatic color").
  std::string DisplayName() const;
};

struct SenseEntry {
  SynsetId id;
  std::string gloss;
};

struct AuditReport {
  std::size_t intersection_leaves = 0;
  std::size_t intersection_roots = 0;
  std::size_t non_leaf = 0;
  double ratio = 0.0;
  std::vector<SynsetId> roots;  // sorted
};

// Lowercase, trim, spaces to underscores.
std::string NormalizeLemma(std::string_view lemma);

// Immutable hypernym/hyponym graph over synsets. All queries are const and
// safe to call from many threads once loading has finished.
class Lexicon {
 public:
  // Reads the flat format: one JSON object per line, '#' lines ignored.
  // Throws InputError on parse errors (with line number), dangling hypernym
  // ids, self loops and hypernym cycles.
  static Lexicon Load(const std::filesystem::path &path);
  static Lexicon Parse(std::istream &in);
  static Lexicon FromSynsets(std::vector<Synset> synsets);

  std::size_t size() const { return synsets_.size(); }
  bool Contains(std::string_view id) const;
  const Synset &Get(std::string_view id) const;

  // Up to `steps` successive parents, following the first listed hypernym
  // at every hop.
  std::vector<SynsetId> Ancestors(std::string_view id,
                                  std::size_t steps) const;

  // Direct children, or all descendants in breadth-first order when
  // transitive. Never contains `id` itself.
  std::vector<SynsetId> Hyponyms(std::string_view id, bool transitive) const;

  // Children of any parent of `id`, minus `id`. Sorted by id.
  std::vector<SynsetId> Siblings(std::string_view id) const;

  // Synsets whose lemma list contains the normalized lemma, sorted by id.
  std::vector<SenseEntry> Senses(std::string_view lemma) const;

  AuditReport IntersectionAudit() const;

 private:
  void BuildIndices();
  void CheckAcyclic() const;
  const std::vector<SynsetId> &Children(const SynsetId &id) const;

  std::unordered_map<SynsetId, Synset> synsets_;
  std::unordered_map<SynsetId, std::vector<SynsetId>> hyponym_index_;
  std::unordered_map<std::string, std::vector<SynsetId>> lemma_index_;
};

}  // namespace setdesc

#endif  // SETDESC_LEXICON_H_
