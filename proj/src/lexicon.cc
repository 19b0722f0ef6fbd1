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

#include "setdesc/lexicon.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"

#include "setdesc/errors.h"

namespace setdesc {
namespace {

// Upward BFS distances from `start` (inclusive, start has distance 0).
std::unordered_map<SynsetId, std::size_t> UpwardDistances(
    const std::unordered_map<SynsetId, Synset> &synsets,
    const SynsetId &start) {
  std::unordered_map<SynsetId, std::size_t> dist{{start, 0}};
  std::deque<SynsetId> queue{start};
  while (!queue.empty()) {
    SynsetId cur = std::move(queue.front());
    queue.pop_front();
    std::size_t d = dist[cur];
    for (const auto &parent : synsets.at(cur).hypernyms) {
      if (dist.emplace(parent, d + 1).second) queue.push_back(parent);
    }
  }
  return dist;
}

}  // namespace

std::string Synset::DisplayName() const {
  std::string name = lemmas.empty() ? id : lemmas.front();
  std::replace(name.begin(), name.end(), '_', ' ');
  return name;
}

std::string NormalizeLemma(std::string_view lemma) {
  auto begin = lemma.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = lemma.find_last_not_of(" \t\r\n");
  std::string out;
  out.reserve(end - begin + 1);
  for (char c : lemma.substr(begin, end - begin + 1)) {
    if (c == ' ') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

Lexicon Lexicon::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon file " + path.string());
  return Parse(in);
}

Lexicon Lexicon::Parse(std::istream &in) {
  std::vector<Synset> synsets;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    Synset s;
    try {
      auto j = nlohmann::json::parse(line);
      s.id = j.at("id").get<std::string>();
      s.lemmas = j.at("lemmas").get<std::vector<std::string>>();
      s.gloss = j.value("gloss", std::string());
      s.hypernyms =
          j.value("hypernyms", std::vector<std::string>());
      s.pos = j.value("pos", std::string("n"));
    } catch (const nlohmann::json::exception &e) {
      throw InputError("lexicon line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    if (s.id.empty()) {
      throw InputError("lexicon line " + std::to_string(lineno) +
                       ": empty id");
    }
    if (s.lemmas.empty()) {
      throw InputError("lexicon line " + std::to_string(lineno) +
                       ": synset " + s.id + " has no lemmas");
    }
    for (auto &lemma : s.lemmas) lemma = NormalizeLemma(lemma);
    synsets.push_back(std::move(s));
  }
  return FromSynsets(std::move(synsets));
}

Lexicon Lexicon::FromSynsets(std::vector<Synset> synsets) {
  Lexicon lex;
  for (auto &s : synsets) {
    if (s.lemmas.empty()) {
      throw InputError("synset " + s.id + " has no lemmas");
    }
    SynsetId id = s.id;
    if (!lex.synsets_.emplace(id, std::move(s)).second) {
      throw InputError("duplicate synset id " + id);
    }
  }
  for (const auto &[id, s] : lex.synsets_) {
    for (const auto &parent : s.hypernyms) {
      if (parent == id) {
        throw InputError("hypernym cycle through " + id + " (self loop)");
      }
      if (!lex.synsets_.contains(parent)) {
        throw InputError("synset " + id + " has dangling hypernym " +
                         parent);
      }
    }
  }
  lex.CheckAcyclic();
  lex.BuildIndices();
  return lex;
}

void Lexicon::CheckAcyclic() const {
  // Kahn's algorithm over child->parent edges.
  std::unordered_map<SynsetId, std::size_t> pending;
  for (const auto &[id, s] : synsets_) pending[id] = s.hypernyms.size();
  std::unordered_map<SynsetId, std::vector<SynsetId>> children;
  for (const auto &[id, s] : synsets_) {
    for (const auto &parent : s.hypernyms) children[parent].push_back(id);
  }
  std::deque<SynsetId> ready;
  for (const auto &[id, n] : pending) {
    if (n == 0) ready.push_back(id);
  }
  std::size_t done = 0;
  while (!ready.empty()) {
    SynsetId cur = std::move(ready.front());
    ready.pop_front();
    ++done;
    auto it = children.find(cur);
    if (it == children.end()) continue;
    for (const auto &child : it->second) {
      if (--pending[child] == 0) ready.push_back(child);
    }
  }
  if (done == synsets_.size()) return;

  // Walk parents among unresolved nodes until one repeats.
  SynsetId start;
  for (const auto &[id, n] : pending) {
    if (n > 0 && (start.empty() || id < start)) start = id;
  }
  std::set<SynsetId> seen;
  SynsetId cur = start;
  while (seen.insert(cur).second) {
    for (const auto &parent : synsets_.at(cur).hypernyms) {
      if (pending.at(parent) > 0) {
        cur = parent;
        break;
      }
    }
  }
  throw InputError("hypernym cycle through " + cur);
}

void Lexicon::BuildIndices() {
  for (const auto &[id, s] : synsets_) {
    for (const auto &parent : s.hypernyms) hyponym_index_[parent].push_back(id);
    for (const auto &lemma : s.lemmas) lemma_index_[lemma].push_back(id);
  }
  for (auto &[id, kids] : hyponym_index_) {
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  }
  for (auto &[lemma, ids] : lemma_index_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
}

bool Lexicon::Contains(std::string_view id) const {
  return synsets_.contains(SynsetId(id));
}

const Synset &Lexicon::Get(std::string_view id) const {
  auto it = synsets_.find(SynsetId(id));
  if (it == synsets_.end()) {
    throw InputError("unknown synset " + std::string(id));
  }
  return it->second;
}

const std::vector<SynsetId> &Lexicon::Children(const SynsetId &id) const {
  static const std::vector<SynsetId> kNone;
  auto it = hyponym_index_.find(id);
  return it == hyponym_index_.end() ? kNone : it->second;
}

std::vector<SynsetId> Lexicon::Ancestors(std::string_view id,
                                         std::size_t steps) const {
  std::vector<SynsetId> out;
  const Synset *cur = &Get(id);
  while (out.size() < steps && !cur->hypernyms.empty()) {
    out.push_back(cur->hypernyms.front());
    cur = &Get(out.back());
  }
  return out;
}

std::vector<SynsetId> Lexicon::Hyponyms(std::string_view id,
                                        bool transitive) const {
  const Synset &root = Get(id);
  if (!transitive) return Children(root.id);
  std::vector<SynsetId> out;
  std::unordered_set<SynsetId> seen{root.id};
  std::deque<SynsetId> queue{root.id};
  while (!queue.empty()) {
    SynsetId cur = std::move(queue.front());
    queue.pop_front();
    for (const auto &child : Children(cur)) {
      if (seen.insert(child).second) {
        out.push_back(child);
        queue.push_back(child);
      }
    }
  }
  return out;
}

std::vector<SynsetId> Lexicon::Siblings(std::string_view id) const {
  const Synset &node = Get(id);
  std::set<SynsetId> out;
  for (const auto &parent : node.hypernyms) {
    for (const auto &child : Children(parent)) {
      if (child != node.id) out.insert(child);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<SenseEntry> Lexicon::Senses(std::string_view lemma) const {
  std::vector<SenseEntry> out;
  auto it = lemma_index_.find(NormalizeLemma(lemma));
  if (it == lemma_index_.end()) return out;
  for (const auto &id : it->second) {
    out.push_back({id, synsets_.at(id).gloss});
  }
  return out;
}

AuditReport Lexicon::IntersectionAudit() const {
  AuditReport report;
  std::set<SynsetId> roots;
  for (const auto &[id, s] : synsets_) {
    if (!Children(id).empty()) ++report.non_leaf;
    if (s.hypernyms.size() < 2) continue;
    ++report.intersection_leaves;
    for (std::size_t i = 0; i < s.hypernyms.size(); ++i) {
      auto da = UpwardDistances(synsets_, s.hypernyms[i]);
      for (std::size_t j = i + 1; j < s.hypernyms.size(); ++j) {
        auto db = UpwardDistances(synsets_, s.hypernyms[j]);
        // Lowest common ancestor: minimal summed distance, then id.
        const SynsetId *best = nullptr;
        std::size_t best_cost = std::numeric_limits<std::size_t>::max();
        for (const auto &[anc, d1] : da) {
          auto it = db.find(anc);
          if (it == db.end()) continue;
          std::size_t cost = d1 + it->second;
          if (cost < best_cost || (cost == best_cost && anc < *best)) {
            best = &anc;
            best_cost = cost;
          }
        }
        if (best != nullptr) roots.insert(*best);
      }
    }
  }
  report.intersection_roots = roots.size();
  report.roots.assign(roots.begin(), roots.end());
  report.ratio = report.non_leaf == 0
                     ? 0.0
                     : static_cast<double>(roots.size()) /
                           static_cast<double>(report.non_leaf);
  return report;
}

}  // namespace setdesc
