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

#ifndef SETDESC_CONCEPT_GRAPH_H_
#define SETDESC_CONCEPT_GRAPH_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "setdesc/random.h"

namespace setdesc {

struct Triplet {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const Triplet &) const = default;
};

struct GraphStats {
  std::size_t num_nodes = 1;
  std::size_t depth = 0;
};

// A (subject, predicate) pair picked for the next iteration.
struct Frontier {
  std::string subject;
  std::string predicate;

  bool operator==(const Frontier &) const = default;
};

// Rooted graph of verified triplets. The root is always "image" and starts
// with three pending predicates. Node identity is the object string, so two
// triplets with the same object share a node. Cycles are rejected.
class ConceptGraph {
 public:
  static constexpr std::string_view kRoot = "image";

  ConceptGraph();

  // Picks the shallowest node (breadth-first, children in insertion order)
  // that still has pending predicates, and one of those predicates
  // uniformly at random. The pair stays pending but is marked in flight.
  // Returns nullopt when nothing is left to explore.
  std::optional<Frontier> SelectFrontier(Rng &rng);

  // Puts the in-flight pair back: it may be selected again.
  void Release();
  // Retires the in-flight pair without adding an edge.
  void Consume();
  // Retires a given pair; used when replaying a trace.
  void Retire(const std::string &subject, const std::string &predicate);

  // Appends an edge. Returns false (and leaves the graph untouched) if the
  // triple already exists. Throws InputError if the subject is unknown, a
  // field is empty or malformed, or the edge would close a cycle.
  bool Commit(const Triplet &t, const std::vector<std::string> &new_predicates);

  bool WouldCreateCycle(const Triplet &t) const;

  // Clears every pending predicate list.
  void DropPending();

  bool HasNode(std::string_view node) const;
  bool HasPending() const;
  const std::vector<std::string> &nodes() const { return nodes_; }
  const std::vector<Triplet> &edges() const { return edges_; }
  std::vector<std::string> Pending(std::string_view node) const;
  std::vector<std::string> Explored(std::string_view node) const;
  const std::optional<Frontier> &in_flight() const { return in_flight_; }

  // Shortest-path depth of every node, root = 0.
  std::map<std::string, std::size_t> Depths() const;
  // Nodes from the root down to `node` along a shortest path.
  std::vector<std::string> PathTo(std::string_view node) const;

  // Network-text rendering, lines joined by '\n' with no trailing newline.
  std::string Render() const;
  GraphStats Stats() const;

  // {"nodes": [...], "edges": [[s, p, o], ...]}
  nlohmann::json ToJson() const;
  static ConceptGraph FromJson(const nlohmann::json &j);

 private:
  std::vector<const Triplet *> Children(const std::string &node) const;
  void RenderFrom(const std::string &node, std::size_t level,
                  std::string &out) const;

  std::vector<std::string> nodes_;
  std::vector<Triplet> edges_;
  std::map<std::string, std::vector<std::string>> explored_;
  std::map<std::string, std::vector<std::string>> pending_;
  std::optional<Frontier> in_flight_;
};

// Parses the network-text format back into triplets in line order.
// Throws InputError on malformed input.
std::vector<Triplet> ParseNetworkText(std::string_view text);

}  // namespace setdesc

#endif  // SETDESC_CONCEPT_GRAPH_H_
