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

#include "setdesc/evaluation.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "setdesc/errors.h"

namespace setdesc {
namespace {

std::string Lower(std::string s) {
  for (char &c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::vector<std::string> Tokens(const std::string &s) {
  std::istringstream in(Lower(s));
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::size_t Lcs(const std::vector<std::string> &a,
                const std::vector<std::string> &b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<float> EmbedOne(const std::string &text,
                            EmbeddingProvider &provider) {
  std::vector<std::string> in{text};
  auto raw = provider.EmbedTexts(in);
  if (raw.size() != 1 || raw[0].size() != provider.dim()) {
    throw ExternalError("embedding provider returned a malformed vector");
  }
  return Normalize(raw[0]);
}

// Mean of the rows, so that dot(text, centroid) is the mean similarity.
std::vector<double> Centroid(const EmbeddingStore &store) {
  std::vector<double> c(store.dim(), 0.0);
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto row = store.row(i);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += row[j];
  }
  for (double &x : c) x /= static_cast<double>(store.size());
  return c;
}

}  // namespace

std::vector<DifferenceProposal> RankedDiff::Top(std::size_t k) const {
  k = std::min(k, proposals.size());
  return {proposals.begin(), proposals.begin() + k};
}

std::vector<DifferenceProposal> Propose(const std::string &render_a,
                                        const std::string &render_b,
                                        Oracle &oracle) {
  std::vector<DifferenceProposal> out;
  std::set<std::string> seen;
  std::vector<std::string> previous;
  for (int round = 1; round <= 2; ++round) {
    auto items = oracle.ProposeDifferences(render_a, render_b, round,
                                           kProposalsPerRound, previous);
    if (items.size() != kProposalsPerRound) {
      spdlog::warn("proposer round {} returned {} differences, expected {}",
                   round, items.size(), kProposalsPerRound);
    }
    if (items.size() > kProposalsPerRound) items.resize(kProposalsPerRound);
    for (auto &text : items) {
      auto b = text.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) continue;
      text = text.substr(b, text.find_last_not_of(" \t\r\n") - b + 1);
      previous.push_back(text);
      if (seen.insert(Lower(text)).second) {
        out.push_back({text, round, 0.0});
      }
    }
  }
  if (out.empty()) throw ProtocolError("proposer returned no differences");
  return out;
}

RankedDiff Rank(std::vector<DifferenceProposal> proposals,
                const EmbeddingStore &a, const EmbeddingStore &b,
                EmbeddingProvider &provider,
                const std::string &text_template) {
  if (a.size() == 0 || b.size() == 0) {
    throw InputError("ranking needs two non-empty stores");
  }
  if (a.dim() != b.dim() || a.dim() != provider.dim()) {
    throw InputError("ranking stores and provider disagree on dimension");
  }
  auto ca = Centroid(a);
  auto cb = Centroid(b);
  for (auto &p : proposals) {
    auto t = EmbedOne(ApplyTemplate(text_template, p.text), provider);
    double sa = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      sa += t[j] * ca[j];
      sb += t[j] * cb[j];
    }
    p.score = sa - sb;
  }
  std::stable_sort(proposals.begin(), proposals.end(),
                   [](const DifferenceProposal &x,
                      const DifferenceProposal &y) { return x.score > y.score; });
  return {std::move(proposals)};
}

bool AccAtK(const RankedDiff &ranked, const std::string &ground_truth,
            std::size_t k, Oracle &judge) {
  if (k < 1) throw InputError("acc@k needs k >= 1");
  for (const auto &p : ranked.Top(k)) {
    try {
      if (judge.JudgeEquivalence(p.text, ground_truth)) return true;
    } catch (const ExternalError &e) {
      spdlog::warn("judge failed on '{}': {}", p.text, e.what());
    }
  }
  return false;
}

RougeScore RougeL(const std::string &candidate, const std::string &reference) {
  auto c = Tokens(candidate);
  auto r = Tokens(reference);
  if (c.empty() && r.empty()) return {1.0, 1.0, 1.0};
  if (c.empty() || r.empty()) return {};
  double lcs = static_cast<double>(Lcs(c, r));
  RougeScore s;
  s.precision = lcs / static_cast<double>(c.size());
  s.recall = lcs / static_cast<double>(r.size());
  if (lcs > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

double ClipScore(const std::string &caption, const EmbeddingStore &store,
                 EmbeddingProvider &provider) {
  if (store.size() == 0) throw InputError("CLIPScore needs images");
  if (store.dim() != provider.dim()) {
    throw InputError("store and provider disagree on dimension");
  }
  auto t = EmbedOne(caption, provider);
  double total = 0.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    total += kClipScoreWeight * std::max(0.0, Dot(t, store.row(i)));
  }
  return total / static_cast<double>(store.size());
}

nlohmann::json EvaluationReport::ToJson() const {
  nlohmann::json proposals = nlohmann::json::array();
  nlohmann::json scores = nlohmann::json::array();
  for (const auto &p : ranked.proposals) {
    proposals.push_back({{"text", p.text}, {"round", p.round}});
    scores.push_back(p.score);
  }
  nlohmann::json j = {{"pair_id", pair_id},   {"proposals", proposals},
                      {"scores", scores},     {"acc1", acc1},
                      {"acc5", acc5},         {"rouge", nullptr},
                      {"clipscore", nullptr}};
  if (rouge) {
    j["rouge"] = {{"precision", rouge->precision},
                  {"recall", rouge->recall},
                  {"f1", rouge->f1}};
  }
  if (clipscore) j["clipscore"] = *clipscore;
  return j;
}

}  // namespace setdesc
