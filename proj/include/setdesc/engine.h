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

#ifndef SETDESC_ENGINE_H_
#define SETDESC_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "setdesc/concept_graph.h"
#include "setdesc/embedding.h"
#include "setdesc/hypothesis.h"
#include "setdesc/lexicon.h"
#include "setdesc/oracle.h"
#include "setdesc/verifier.h"

namespace setdesc {

struct EngineConfig {
  std::size_t subset_size = 10;         // images per iteration
  double alpha = 0.8;                   // acceptance rate
  std::size_t k = 1;                    // neighbours per image
  std::size_t invalid_threshold = 10;   // invalid answers that discard
  std::size_t max_generalization = 2;   // hypernym steps
  std::size_t max_consecutive_discards = 5;
  std::size_t max_examples = 50;        // label terms per side
  std::uint64_t seed = 0;
  std::string expertise = "visual content analysis";
  std::string text_template = "{term}";

  // Throws InputError on out-of-range values.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are an error.
  static EngineConfig FromJson(const nlohmann::json &j);
  static EngineConfig Load(const std::filesystem::path &path);
  // FNV-1a of the canonical JSON dump.
  std::string Hash() const;
};

enum class Outcome {
  kCommitted,
  kDiscardedInvalid,
  kDiscardedUnverified,
  kDiscardedNoNovelty,
};
std::string OutcomeName(Outcome o);

enum class StopReason { kExhausted, kEpsilonDiscards };
std::string StopReasonName(StopReason r);

struct IterationRecord {
  std::size_t index = 0;  // 1-based
  std::vector<std::string> sampled_ids;
  std::string subject;
  std::string predicate;
  QuestionPair question;
  std::vector<VqaAnswer> answers;
  std::optional<Formulation> formulation;
  std::optional<SynsetId> synset;
  HypothesisChain chain;
  std::vector<LevelVerification> levels;
  Outcome outcome = Outcome::kDiscardedInvalid;
  std::optional<Triplet> triplet;  // present iff committed
  std::string note;                // why a discard happened, if not obvious
  std::string rng_state;           // after this iteration's draws

  nlohmann::json ToJson() const;
  static IterationRecord FromJson(const nlohmann::json &j);
};

struct RunResult {
  std::string description;
  ConceptGraph graph;
  std::vector<IterationRecord> trace;
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::kExhausted;

  nlohmann::json ToJson() const;
};

// Everything a run reads besides its configuration.
struct EngineInputs {
  const std::vector<std::string> &image_ids;
  const EmbeddingStore &store;
  Oracle &oracle;
  const Lexicon &lex;
  EmbeddingProvider &provider;
};

// Runs the hypothesize/verify loop until no predicate is pending or
// max_consecutive_discards discards happen in a row, then writes the
// description. When `trace_path` is non-empty the trace is written there
// as JSON lines: a header, one line per iteration (flushed as it is
// produced) and a closing result line.
RunResult Describe(const EngineInputs &in, const EngineConfig &cfg,
                   const std::filesystem::path &trace_path = {});

// Continues a trace written by Describe. The configuration comes from the
// trace header; the inputs must match the ones recorded there. A trace that
// already has a result line is returned as stored.
RunResult Resume(const std::filesystem::path &trace_path,
                 const EngineInputs &in);

// Re-runs verification for every evaluated level in `records` from the
// recorded label sets and returns the indices of iterations whose results
// differ. `store` must hold exactly the rows the run verified against.
std::vector<std::size_t> ReplayVerification(
    const std::vector<IterationRecord> &records, const EmbeddingStore &store,
    EmbeddingProvider &provider, const EngineConfig &cfg);

}  // namespace setdesc

#endif  // SETDESC_ENGINE_H_
