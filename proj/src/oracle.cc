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

#include "setdesc/oracle.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "setdesc/concept_graph.h"
#include "setdesc/hashing.h"

namespace setdesc {
namespace {

std::string Lower(std::string s) {
  for (char &c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::string Trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string Join(const std::vector<std::string> &parts,
                 const std::string &sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void Require(bool ok, const std::string &what) {
  if (!ok) throw InputError(what);
}

}  // namespace

bool LooksYesNo(const std::string &question) {
  static const char *kOpeners[] = {"is ",    "are ",  "do ",    "does ",
                                   "did ",   "can ",  "was ",   "were ",
                                   "has ",   "have ", "will ",  "could "};
  std::string q = Lower(Trim(question));
  return std::any_of(std::begin(kOpeners), std::end(kOpeners),
                     [&](const char *p) { return q.starts_with(p); });
}

bool ParseJudgeReply(const std::string &reply) {
  std::string r = Lower(Trim(reply));
  if (!r.empty() && r.back() == '.') r.pop_back();
  if (r == "true") return true;
  if (r == "false") return false;
  throw ProtocolError("judge reply is neither True nor False: " + reply);
}

QuestionPair Oracle::NextQuestion(const QuestionRequest &request) {
  Require(!request.subject.empty() && !request.predicate.empty(),
          "next_question needs a subject and a predicate");
  QuestionPair q = DoNextQuestion(request);
  if (Trim(q.question_expert).empty() || Trim(q.question_vqa).empty()) {
    throw ProtocolError("next_question returned an empty question");
  }
  if (LooksYesNo(q.question_vqa)) {
    spdlog::warn("VQA question looks like a yes/no question: {}",
                 q.question_vqa);
  }
  return q;
}

VqaAnswer Oracle::Vqa(const std::string &image_ref,
                      const std::string &question) {
  Require(!image_ref.empty(), "vqa needs an image");
  Require(!question.empty(), "vqa needs a question");
  return DoVqa(image_ref, question);
}

Formulation Oracle::Formulate(const std::vector<VqaAnswer> &answers,
                              const std::string &subject,
                              const std::string &predicate) {
  std::vector<std::string> valid;
  for (const auto &a : answers) {
    if (!a.invalid && !Trim(a.text).empty()) valid.push_back(a.text);
  }
  Require(!valid.empty(), "formulate needs at least one valid answer");
  Formulation f = DoFormulate(valid, subject, predicate);
  f.object = Trim(f.object);
  if (f.object.empty()) throw ProtocolError("formulate returned no object");
  std::vector<std::string> preds;
  std::set<std::string> seen;
  for (const auto &p : f.new_predicates) {
    std::string t = Trim(p);
    if (!t.empty() && seen.insert(Lower(t)).second) preds.push_back(t);
  }
  f.new_predicates = std::move(preds);
  return f;
}

bool Oracle::NoveltyCheck(const std::string &old_render,
                          const std::string &new_render) {
  Require(!old_render.empty() && !new_render.empty(),
          "novelty_check needs two renders");
  return DoNoveltyCheck(old_render, new_render);
}

std::string Oracle::WriteDescription(const std::string &render) {
  Require(!render.empty(), "write_description needs a render");
  std::string d = Trim(DoWriteDescription(render));
  if (d.empty()) throw ProtocolError("write_description returned nothing");
  return d;
}

std::string Oracle::Captionize(const std::string &description) {
  Require(!Trim(description).empty(), "captionize needs a description");
  std::string c = Trim(DoCaptionize(description));
  if (c.empty()) throw ProtocolError("captionize returned nothing");
  return c;
}

bool Oracle::JudgeEquivalence(const std::string &candidate,
                              const std::string &reference) {
  Require(!candidate.empty() && !reference.empty(),
          "judge needs two captions");
  return DoJudgeEquivalence(candidate, reference);
}

SynsetId Oracle::DisambiguateSense(const std::string &term,
                                   const std::vector<std::string> &context,
                                   const std::vector<SenseEntry> &candidates) {
  Require(!candidates.empty(), "disambiguate_sense needs candidates");
  if (candidates.size() == 1) return candidates.front().id;
  SynsetId pick = Trim(DoDisambiguateSense(term, context, candidates));
  for (const auto &c : candidates) {
    if (c.id == pick) return pick;
  }
  throw SenseSelectionError("sense '" + pick + "' is not a candidate for " +
                            term);
}

std::vector<std::string> Oracle::ProposeDifferences(
    const std::string &render_a, const std::string &render_b, int round,
    std::size_t count, const std::vector<std::string> &previous) {
  Require(!render_a.empty() && !render_b.empty(),
          "propose needs two renders");
  return DoProposeDifferences(render_a, render_b, round, count, previous);
}

// ---------------------------------------------------------------------------
// ScriptedOracle

namespace {

void Fill(nlohmann::json &value, const std::map<std::string, std::string> &f) {
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    for (const auto &[k, v] : f) {
      const std::string slot = "{" + k + "}";
      for (auto pos = s.find(slot); pos != std::string::npos;
           pos = s.find(slot, pos + v.size())) {
        s.replace(pos, slot.size(), v);
      }
    }
    value = s;
  } else if (value.is_array() || value.is_object()) {
    for (auto &child : value) Fill(child, f);
  }
}

std::string Describe(const std::map<std::string, std::string> &fields) {
  std::string out;
  for (const auto &[k, v] : fields) {
    if (!out.empty()) out += ", ";
    out += k + "=" + (v.size() > 80 ? v.substr(0, 77) + "..." : v);
  }
  return out;
}

}  // namespace

ScriptedOracle::ScriptedOracle(nlohmann::json fixture)
    : fixture_(std::move(fixture)) {
  if (!fixture_.is_object()) throw InputError("oracle fixture must be an object");
}

std::unique_ptr<ScriptedOracle> ScriptedOracle::Load(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open oracle fixture " + path.string());
  try {
    return std::make_unique<ScriptedOracle>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception &e) {
    throw InputError("malformed oracle fixture " + path.string() + ": " +
                     e.what());
  }
}

std::size_t ScriptedOracle::calls(const std::string &op) const {
  std::lock_guard lock(mu_);
  auto it = calls_.find(op);
  return it == calls_.end() ? 0 : it->second;
}

const nlohmann::json *ScriptedOracle::Match(const std::string &op,
                                           const Fields &fields) {
  {
    std::lock_guard lock(mu_);
    ++calls_[op];
  }
  auto rules = fixture_.find(op);
  if (rules == fixture_.end()) return nullptr;
  for (const auto &rule : *rules) {
    bool hit = true;
    const nlohmann::json match = rule.value("match", nlohmann::json::object());
    for (const auto &[key, want] : match.items()) {
      auto it = fields.find(key);
      const std::string expected =
          want.is_string() ? want.get<std::string>() : want.dump();
      if (it == fields.end() || it->second != expected) {
        hit = false;
        break;
      }
    }
    if (!hit) continue;
    if (!rule.contains("reply")) {
      throw InputError("scripted rule for " + op + " has no reply");
    }
    return &rule.at("reply");
  }
  return nullptr;
}

nlohmann::json ScriptedOracle::Reply(const std::string &op,
                                     const Fields &fields) {
  const nlohmann::json *rule = Match(op, fields);
  if (rule == nullptr) {
    throw ScriptedMissError("scripted oracle has no rule for " + op + " (" +
                            Describe(fields) + ")");
  }
  nlohmann::json reply = *rule;
  Fill(reply, fields);
  return reply;
}

QuestionPair ScriptedOracle::DoNextQuestion(const QuestionRequest &request) {
  auto r = Reply("next_question",
                 {{"subject", request.subject},
                  {"predicate", request.predicate},
                  {"branch", request.branch},
                  {"expertise", request.expertise},
                  {"asked", std::to_string(request.log.size())}});
  QuestionPair q;
  try {
    q.question_expert = r.at("QUESTION_EXPERT").get<std::string>();
    q.question_vqa = r.at("QUESTION_VQA").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw ProtocolError(std::string("scripted next_question reply: ") +
                        e.what());
  }
  for (const auto &asked : request.log) {
    if (asked.pair.question_vqa == q.question_vqa) {
      throw ProtocolError("scripted next_question repeats a logged question: " +
                          q.question_vqa);
    }
  }
  return q;
}

VqaAnswer ScriptedOracle::DoVqa(const std::string &image_ref,
                                const std::string &question) {
  auto r = Reply("vqa", {{"image", image_ref}, {"question", question}});
  if (r.is_string()) return {r.get<std::string>(), false};
  if (!r.is_object() || !r.contains("answer")) {
    throw ProtocolError("vqa reply has no answer field");
  }
  return {r.at("answer").get<std::string>(), !r.value("valid", true)};
}

Formulation ScriptedOracle::DoFormulate(const std::vector<std::string> &answers,
                                        const std::string &subject,
                                        const std::string &predicate) {
  auto r = Reply("formulate", {{"subject", subject},
                               {"predicate", predicate},
                               {"answers", Join(answers, " | ")}});
  try {
    return {r.at("object").get<std::string>(),
            r.value("new_predicates", std::vector<std::string>())};
  } catch (const nlohmann::json::exception &e) {
    throw ProtocolError(std::string("scripted formulate reply: ") + e.what());
  }
}

bool ScriptedOracle::DoNoveltyCheck(const std::string &old_render,
                                    const std::string &new_render) {
  auto old_edges = ParseNetworkText(old_render);
  std::set<Triplet> known(old_edges.begin(), old_edges.end());
  std::set<std::string> added;
  for (const auto &t : ParseNetworkText(new_render)) {
    if (!known.contains(t)) {
      added.insert(t.subject + "|" + t.predicate + "|" + t.object);
    }
  }
  std::string joined;
  for (const auto &e : added) joined += (joined.empty() ? "" : ";") + e;
  const nlohmann::json *rule = Match("novelty_check", {{"old_render", old_render},
                                                       {"new_render", new_render},
                                                       {"added", joined}});
  if (rule == nullptr) return !added.empty();
  if (!rule->is_boolean()) throw ProtocolError("novelty reply must be a bool");
  return rule->get<bool>();
}

std::string ScriptedOracle::DoWriteDescription(const std::string &render) {
  auto r = Reply("write_description",
                 {{"render", render}, {"render_hash", HashHex(render)}});
  if (!r.is_string()) throw ProtocolError("description reply must be a string");
  return r.get<std::string>();
}

std::string ScriptedOracle::DoCaptionize(const std::string &description) {
  auto r = Reply("captionize", {{"description", description}});
  if (!r.is_string()) throw ProtocolError("caption reply must be a string");
  return r.get<std::string>();
}

bool ScriptedOracle::DoJudgeEquivalence(const std::string &candidate,
                                        const std::string &reference) {
  auto r = Reply("judge_equivalence",
                 {{"candidate", candidate}, {"reference", reference}});
  if (r.is_boolean()) return r.get<bool>();
  if (r.is_string()) return ParseJudgeReply(r.get<std::string>());
  throw ProtocolError("judge reply must be a bool or a string");
}

SynsetId ScriptedOracle::DoDisambiguateSense(
    const std::string &term, const std::vector<std::string> &context,
    const std::vector<SenseEntry> &candidates) {
  std::vector<std::string> ids;
  for (const auto &c : candidates) ids.push_back(c.id);
  auto r = Reply("disambiguate_sense", {{"term", term},
                                        {"context", Join(context, " | ")},
                                        {"candidates", Join(ids, ",")}});
  if (!r.is_string()) throw ProtocolError("sense reply must be a string");
  return r.get<std::string>();
}

std::vector<std::string> ScriptedOracle::DoProposeDifferences(
    const std::string &render_a, const std::string &render_b, int round,
    std::size_t count, const std::vector<std::string> &previous) {
  (void)previous;
  auto r = Reply("propose_differences",
                 {{"round", std::to_string(round)},
                  {"count", std::to_string(count)},
                  {"render_a_hash", HashHex(render_a)},
                  {"render_b_hash", HashHex(render_b)}});
  try {
    return r.get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw ProtocolError(std::string("scripted proposals: ") + e.what());
  }
}

std::unique_ptr<Oracle> MakeOracle(const std::string &spec,
                                   const HttpOracleConfig &http_config) {
  if (spec.starts_with("scripted:")) {
    return ScriptedOracle::Load(spec.substr(9));
  }
  if (spec == "http") return std::make_unique<HttpOracle>(http_config);
  throw InputError("unknown oracle " + spec +
                   " (expected scripted:<fixture.json> or http)");
}

}  // namespace setdesc
