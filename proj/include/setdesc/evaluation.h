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

#ifndef SETDESC_EVALUATION_H_
#define SETDESC_EVALUATION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "setdesc/embedding.h"
#include "setdesc/oracle.h"
#include "setdesc/verifier.h"

namespace setdesc {

struct DifferenceProposal {
  std::string text;
  int round = 1;
  double score = 0.0;
};

struct RankedDiff {
  std::vector<DifferenceProposal> proposals;  // score descending

  std::vector<DifferenceProposal> Top(std::size_t k) const;
};

inline constexpr std::size_t kProposalsPerRound = 15;

// Two proposer rounds of 15 differences each. The second round sees the
// first round's output. Case-insensitive duplicates are dropped, keeping
// the first occurrence. Throws ProtocolError if nothing survives.
std::vector<DifferenceProposal> Propose(const std::string &render_a,
                                        const std::string &render_b,
                                        Oracle &oracle);

// Mean cosine similarity of each proposal to the rows of `a` minus the same
// mean over `b`. Stable sort, highest score first.
RankedDiff Rank(std::vector<DifferenceProposal> proposals,
                const EmbeddingStore &a, const EmbeddingStore &b,
                EmbeddingProvider &provider,
                const std::string &text_template = "{term}");

// True iff one of the first k proposals is judged equivalent to the ground
// truth. A judge failure counts as "not equivalent".
bool AccAtK(const RankedDiff &ranked, const std::string &ground_truth,
            std::size_t k, Oracle &judge);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Longest-common-subsequence overlap of lowercase whitespace tokens.
RougeScore RougeL(const std::string &candidate, const std::string &reference);

inline constexpr double kClipScoreWeight = 2.5;

// Mean over images of 2.5 * max(0, cos(caption, image)).
double ClipScore(const std::string &caption, const EmbeddingStore &store,
                 EmbeddingProvider &provider);

struct EvaluationReport {
  std::string pair_id;
  RankedDiff ranked;
  bool acc1 = false;
  bool acc5 = false;
  std::optional<RougeScore> rouge;
  std::optional<double> clipscore;

  nlohmann::json ToJson() const;
};

}  // namespace setdesc

#endif  // SETDESC_EVALUATION_H_
