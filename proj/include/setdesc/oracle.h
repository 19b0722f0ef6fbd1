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

#ifndef SETDESC_ORACLE_H_
#define SETDESC_ORACLE_H_

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "json.hpp"
#include "setdesc/errors.h"
#include "setdesc/lexicon.h"

namespace setdesc {

struct QuestionPair {
  std::string question_expert;
  std::string question_vqa;
};

struct AskedQuestion {
  std::string attribute;
  QuestionPair pair;
};

struct QuestionRequest {
  std::string subject;
  std::string predicate;
  std::string branch;  // e.g. "image.wedding.couple.body language?"
  std::string expertise = "visual content analysis";
  std::vector<AskedQuestion> log;
};

struct VqaAnswer {
  std::string text;
  bool invalid = false;
};

struct Formulation {
  std::string object;
  std::vector<std::string> new_predicates;
};

// The disambiguation reply named no candidate.
class SenseSelectionError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// True for questions that open like a yes/no question (is/are/do/does...).
bool LooksYesNo(const std::string &question);

// Parses "True"/"False" (case-insensitive, surrounding whitespace and a
// trailing period allowed). Throws ProtocolError otherwise.
bool ParseJudgeReply(const std::string &reply);

// Language and vision model calls used by the pipeline. The public methods
// check pre- and postconditions and delegate to the Do* hooks, so every
// implementation gets the same contract. Implementations must tolerate
// concurrent Vqa calls.
class Oracle {
 public:
  virtual ~Oracle() = default;

  QuestionPair NextQuestion(const QuestionRequest &request);
  VqaAnswer Vqa(const std::string &image_ref, const std::string &question);
  // Uses only the valid answers; throws InputError when there are none.
  Formulation Formulate(const std::vector<VqaAnswer> &answers,
                        const std::string &subject,
                        const std::string &predicate);
  bool NoveltyCheck(const std::string &old_render,
                    const std::string &new_render);
  std::string WriteDescription(const std::string &render);
  std::string Captionize(const std::string &description);
  bool JudgeEquivalence(const std::string &candidate,
                        const std::string &reference);
  // A single candidate is returned without a model call. Throws
  // SenseSelectionError when the reply is not one of the candidates.
  SynsetId DisambiguateSense(const std::string &term,
                             const std::vector<std::string> &context,
                             const std::vector<SenseEntry> &candidates);
  std::vector<std::string> ProposeDifferences(
      const std::string &render_a, const std::string &render_b, int round,
      std::size_t count, const std::vector<std::string> &previous);

 protected:
  virtual QuestionPair DoNextQuestion(const QuestionRequest &request) = 0;
  virtual VqaAnswer DoVqa(const std::string &image_ref,
                          const std::string &question) = 0;
  virtual Formulation DoFormulate(const std::vector<std::string> &answers,
                                  const std::string &subject,
                                  const std::string &predicate) = 0;
  virtual bool DoNoveltyCheck(const std::string &old_render,
                              const std::string &new_render) = 0;
  virtual std::string DoWriteDescription(const std::string &render) = 0;
  virtual std::string DoCaptionize(const std::string &description) = 0;
  virtual bool DoJudgeEquivalence(const std::string &candidate,
                                  const std::string &reference) = 0;
  virtual SynsetId DoDisambiguateSense(
      const std::string &term, const std::vector<std::string> &context,
      const std::vector<SenseEntry> &candidates) = 0;
  virtual std::vector<std::string> DoProposeDifferences(
      const std::string &render_a, const std::string &render_b, int round,
      std::size_t count, const std::vector<std::string> &previous) = 0;
};

// Deterministic oracle driven by a JSON fixture. Each operation maps to a
// list of rules {"match": {field: value}, "reply": ...}; the first rule
// whose match fields all equal the call's fields wins, and "{field}"
// placeholders in reply strings are filled from the call. Replies depend
// only on the call, never on call history. A call without a matching rule
// throws ScriptedMissError, except novelty_check, which falls back to
// "the new render has an edge the old one lacks".
//
// Call fields per operation:
//   next_question:      subject, predicate, branch, expertise, asked
//   vqa:                image, question
//   formulate:          subject, predicate, answers (joined by " | ")
//   novelty_check:      old_render, new_render, added (new edges as
//                       "s|p|o", sorted, joined by ";")
//   write_description:  render, render_hash
//   captionize:         description
//   judge_equivalence:  candidate, reference
//   disambiguate_sense: term, context, candidates (ids joined by ",")
//   propose_differences: round, count, render_a_hash, render_b_hash
class ScriptedOracle : public Oracle {
 public:
  explicit ScriptedOracle(nlohmann::json fixture);
  static std::unique_ptr<ScriptedOracle> Load(
      const std::filesystem::path &path);

  // Number of Do* invocations for `op` so far.
  std::size_t calls(const std::string &op) const;

 protected:
  QuestionPair DoNextQuestion(const QuestionRequest &request) override;
  VqaAnswer DoVqa(const std::string &image_ref,
                  const std::string &question) override;
  Formulation DoFormulate(const std::vector<std::string> &answers,
                          const std::string &subject,
                          const std::string &predicate) override;
  bool DoNoveltyCheck(const std::string &old_render,
                      const std::string &new_render) override;
  std::string DoWriteDescription(const std::string &render) override;
  std::string DoCaptionize(const std::string &description) override;
  bool DoJudgeEquivalence(const std::string &candidate,
                          const std::string &reference) override;
  SynsetId DoDisambiguateSense(
      const std::string &term, const std::vector<std::string> &context,
      const std::vector<SenseEntry> &candidates) override;
  std::vector<std::string> DoProposeDifferences(
      const std::string &render_a, const std::string &render_b, int round,
      std::size_t count, const std::vector<std::string> &previous) override;

 private:
  using Fields = std::map<std::string, std::string>;
  nlohmann::json Reply(const std::string &op, const Fields &fields);
  const nlohmann::json *Match(const std::string &op, const Fields &fields);

  nlohmann::json fixture_;
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> calls_;
};

struct HttpOracleConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key;  // from SETDESC_API_KEY when empty
  int max_inflight = 8;
  int timeout_seconds = 120;
};

// Chat-completions client. Every call sends a system prompt and exactly one
// user message and retries once on transport or schema failure. Replies are
// requested as JSON objects except for captionize and judge, whose prompts
// ask for plain text.
class HttpOracle : public Oracle {
 public:
  explicit HttpOracle(HttpOracleConfig config);

  std::size_t requests() const { return requests_.load(); }

 protected:
  QuestionPair DoNextQuestion(const QuestionRequest &request) override;
  VqaAnswer DoVqa(const std::string &image_ref,
                  const std::string &question) override;
  Formulation DoFormulate(const std::vector<std::string> &answers,
                          const std::string &subject,
                          const std::string &predicate) override;
  bool DoNoveltyCheck(const std::string &old_render,
                      const std::string &new_render) override;
  std::string DoWriteDescription(const std::string &render) override;
  std::string DoCaptionize(const std::string &description) override;
  bool DoJudgeEquivalence(const std::string &candidate,
                          const std::string &reference) override;
  SynsetId DoDisambiguateSense(
      const std::string &term, const std::vector<std::string> &context,
      const std::vector<SenseEntry> &candidates) override;
  std::vector<std::string> DoProposeDifferences(
      const std::string &render_a, const std::string &render_b, int round,
      std::size_t count, const std::vector<std::string> &previous) override;

 private:
  // Sends one chat request; `parse` gets the reply content (a parsed object
  // in JSON mode, a string otherwise) and throws ProtocolError on schema
  // violations.
  template <typename Parse>
  auto Call(const std::string &system, const nlohmann::json &user_content,
            bool json_mode, Parse parse) -> decltype(parse(nlohmann::json()));
  nlohmann::json Send(const std::string &system,
                      const nlohmann::json &user_content, bool json_mode);

  HttpOracleConfig config_;
  std::string origin_;
  std::string path_prefix_;
  std::counting_semaphore<64> slots_;
  std::atomic<std::size_t> requests_{0};
};

// "scripted:<fixture.json>" or "http".
std::unique_ptr<Oracle> MakeOracle(const std::string &spec,
                                   const HttpOracleConfig &http_config);

}  // namespace setdesc

#endif  // SETDESC_ORACLE_H_
