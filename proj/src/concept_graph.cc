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

#include "setdesc/concept_graph.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include <spdlog/spdlog.h>

#include "setdesc/errors.h"

namespace setdesc {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool ContainsCaseless(const std::vector<std::string> &list,
                      std::string_view value) {
  const std::string key = Lower(value);
  return std::any_of(list.begin(), list.end(),
                     [&](const std::string &s) { return Lower(s) == key; });
}

void CheckField(const std::string &value, const char *name) {
  if (value.empty()) {
    throw InputError(std::string("triplet ") + name + " is empty");
  }
  if (value.find('\n') != std::string::npos ||
      value.find("', '") != std::string::npos ||
      value.find("')") != std::string::npos) {
    throw InputError(std::string("triplet ") + name +
                     " cannot be rendered: " + value);
  }
}

std::string Quote(std::string_view s) {
  std::string out = "'";
  out += s;
  out += "'";
  return out;
}

}  // namespace

ConceptGraph::ConceptGraph() {
  nodes_.emplace_back(kRoot);
  pending_[std::string(kRoot)] = {"content", "background", "style"};
}

bool ConceptGraph::HasNode(std::string_view node) const {
  return std::find(nodes_.begin(), nodes_.end(), node) != nodes_.end();
}

bool ConceptGraph::HasPending() const {
  return std::any_of(pending_.begin(), pending_.end(),
                     [](const auto &kv) { return !kv.second.empty(); });
}

std::vector<std::string> ConceptGraph::Pending(std::string_view node) const {
  auto it = pending_.find(std::string(node));
  return it == pending_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> ConceptGraph::Explored(std::string_view node) const {
  auto it = explored_.find(std::string(node));
  return it == explored_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<const Triplet *> ConceptGraph::Children(
    const std::string &node) const {
  std::vector<const Triplet *> out;
  for (const auto &e : edges_) {
    if (e.subject == node) out.push_back(&e);
  }
  return out;
}

std::map<std::string, std::size_t> ConceptGraph::Depths() const {
  std::map<std::string, std::size_t> depth{{std::string(kRoot), 0}};
  std::deque<std::string> queue{std::string(kRoot)};
  while (!queue.empty()) {
    std::string cur = std::move(queue.front());
    queue.pop_front();
    for (const Triplet *e : Children(cur)) {
      if (depth.emplace(e->object, depth[cur] + 1).second) {
        queue.push_back(e->object);
      }
    }
  }
  return depth;
}

std::vector<std::string> ConceptGraph::PathTo(std::string_view node) const {
  std::map<std::string, std::string> parent;
  std::set<std::string> seen{std::string(kRoot)};
  std::deque<std::string> queue{std::string(kRoot)};
  while (!queue.empty()) {
    std::string cur = std::move(queue.front());
    queue.pop_front();
    if (cur == node) break;
    for (const Triplet *e : Children(cur)) {
      if (seen.insert(e->object).second) {
        parent[e->object] = cur;
        queue.push_back(e->object);
      }
    }
  }
  if (!seen.contains(std::string(node))) {
    throw InputError("node not in graph: " + std::string(node));
  }
  std::vector<std::string> path{std::string(node)};
  while (path.back() != kRoot) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<Frontier> ConceptGraph::SelectFrontier(Rng &rng) {
  std::set<std::string> seen{std::string(kRoot)};
  std::deque<std::string> queue{std::string(kRoot)};
  while (!queue.empty()) {
    std::string cur = std::move(queue.front());
    queue.pop_front();
    auto it = pending_.find(cur);
    if (it != pending_.end() && !it->second.empty()) {
      const auto &list = it->second;
      in_flight_ = Frontier{cur, list[rng.UniformIndex(list.size())]};
      return in_flight_;
    }
    for (const Triplet *e : Children(cur)) {
      if (seen.insert(e->object).second) queue.push_back(e->object);
    }
  }
  in_flight_.reset();
  return std::nullopt;
}

void ConceptGraph::Release() { in_flight_.reset(); }

void ConceptGraph::Consume() {
  if (!in_flight_) return;
  Frontier f = *in_flight_;
  Retire(f.subject, f.predicate);
}

void ConceptGraph::Retire(const std::string &subject,
                          const std::string &predicate) {
  auto &list = pending_[subject];
  list.erase(std::remove(list.begin(), list.end(), predicate), list.end());
  auto &done = explored_[subject];
  if (std::find(done.begin(), done.end(), predicate) == done.end()) {
    done.push_back(predicate);
  }
  if (in_flight_ && in_flight_->subject == subject &&
      in_flight_->predicate == predicate) {
    in_flight_.reset();
  }
}

bool ConceptGraph::WouldCreateCycle(const Triplet &t) const {
  if (t.object == t.subject) return true;
  if (!HasNode(t.object)) return false;
  // Cycle iff subject is reachable from object.
  std::set<std::string> seen{t.object};
  std::deque<std::string> queue{t.object};
  while (!queue.empty()) {
    std::string cur = std::move(queue.front());
    queue.pop_front();
    if (cur == t.subject) return true;
    for (const Triplet *e : Children(cur)) {
      if (seen.insert(e->object).second) queue.push_back(e->object);
    }
  }
  return false;
}

bool ConceptGraph::Commit(const Triplet &t,
                          const std::vector<std::string> &new_predicates) {
  CheckField(t.subject, "subject");
  CheckField(t.predicate, "predicate");
  CheckField(t.object, "object");
  if (!HasNode(t.subject)) {
    throw InputError("subject not in graph: " + t.subject);
  }
  if (std::find(edges_.begin(), edges_.end(), t) != edges_.end()) {
    spdlog::debug("duplicate triple ('{}', '{}', '{}') ignored", t.subject,
                  t.predicate, t.object);
    return false;
  }
  if (WouldCreateCycle(t)) {
    throw InputError("edge would create a cycle: " + t.subject + " -> " +
                     t.object);
  }
  edges_.push_back(t);
  if (!HasNode(t.object)) nodes_.push_back(t.object);
  auto &pending = pending_[t.object];
  const auto explored = Explored(t.object);
  for (const auto &p : new_predicates) {
    if (p.empty() || ContainsCaseless(pending, p) ||
        ContainsCaseless(explored, p)) {
      continue;
    }
    CheckField(p, "predicate");
    pending.push_back(p);
  }
  Retire(t.subject, t.predicate);
  return true;
}

void ConceptGraph::DropPending() {
  pending_.clear();
  in_flight_.reset();
}

void ConceptGraph::RenderFrom(const std::string &node, std::size_t level,
                              std::string &out) const {
  for (const Triplet *e : Children(node)) {
    out += '\n';
    for (std::size_t i = 0; i < level; ++i) out += "|   ";
    out += "|-> (" + Quote(e->subject) + ", " + Quote(e->predicate) + ", " +
           Quote(e->object) + ")";
    RenderFrom(e->object, level + 1, out);
  }
}

std::string ConceptGraph::Render() const {
  std::string out = "-- ('entity', " + Quote(kRoot) + ")";
  RenderFrom(std::string(kRoot), 0, out);
  return out;
}

GraphStats ConceptGraph::Stats() const {
  GraphStats stats;
  stats.num_nodes = nodes_.size();
  for (const auto &[node, d] : Depths()) stats.depth = std::max(stats.depth, d);
  return stats;
}

nlohmann::json ConceptGraph::ToJson() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto &e : edges_) {
    edges.push_back({e.subject, e.predicate, e.object});
  }
  return {{"nodes", nodes_}, {"edges", std::move(edges)}};
}

ConceptGraph ConceptGraph::FromJson(const nlohmann::json &j) {
  ConceptGraph g;
  try {
    for (const auto &e : j.at("edges")) {
      g.Commit({e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                e.at(2).get<std::string>()},
               {});
    }
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("malformed graph json: ") + e.what());
  }
  g.DropPending();
  return g;
}

std::vector<Triplet> ParseNetworkText(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty() || lines.front() != "-- ('entity', 'image')") {
    throw InputError("network text must start with the root line");
  }
  std::vector<Triplet> out;
  // Object at each open depth; index 0 is the root.
  std::vector<std::string> stack{std::string(ConceptGraph::kRoot)};
  for (std::size_t n = 1; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    auto fail = [&](const char *why) {
      return InputError("network text line " + std::to_string(n + 1) + ": " +
                        why);
    };
    std::size_t level = 0;
    while (line.starts_with("|   ")) {
      line.remove_prefix(4);
      ++level;
    }
    if (!line.starts_with("|-> ")) throw fail("missing edge marker");
    line.remove_prefix(4);
    if (!line.starts_with("('") || !line.ends_with("')")) {
      throw fail("malformed tuple");
    }
    line = line.substr(2, line.size() - 4);
    std::vector<std::string> fields;
    while (true) {
      auto sep = line.find("', '");
      fields.emplace_back(line.substr(0, sep));
      if (sep == std::string_view::npos) break;
      line.remove_prefix(sep + 4);
    }
    if (fields.size() != 3) throw fail("expected three fields");
    if (level + 1 > stack.size()) throw fail("indentation skips a level");
    stack.resize(level + 1);
    if (fields[0] != stack.back()) throw fail("subject does not match parent");
    stack.push_back(fields[2]);
    out.push_back({fields[0], fields[1], fields[2]});
  }
  return out;
}

}  // namespace setdesc
