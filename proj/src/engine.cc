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

#include "setdesc/engine.h"

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "setdesc/errors.h"
#include "setdesc/hashing.h"
#include "setdesc/prompts.h"

namespace setdesc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

void EngineConfig::Validate() const {
  auto fail = [](const std::string &m) { throw InputError("config: " + m); };
  if (subset_size < 1) fail("subset_size must be at least 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must be in (0, 1]");
  if (k < 1) fail("k must be at least 1");
  if (invalid_threshold < 1) fail("invalid_threshold must be at least 1");
  if (invalid_threshold > subset_size) {
    fail("invalid_threshold must not exceed subset_size");
  }
  if (max_consecutive_discards < 1) {
    fail("max_consecutive_discards must be at least 1");
  }
  if (max_examples < 1) fail("max_examples must be at least 1");
  if (text_template.find("{term}") == std::string::npos) {
    fail("text_template must contain {term}");
  }
}

json EngineConfig::ToJson() const {
  return {{"subset_size", subset_size},
          {"alpha", alpha},
          {"k", k},
          {"invalid_threshold", invalid_threshold},
          {"max_generalization", max_generalization},
          {"max_consecutive_discards", max_consecutive_discards},
          {"max_examples", max_examples},
          {"seed", seed},
          {"expertise", expertise},
          {"text_template", text_template}};
}

EngineConfig EngineConfig::FromJson(const json &j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  EngineConfig c;
  try {
    for (const auto &[key, v] : j.items()) {
      if (key == "subset_size") v.get_to(c.subset_size);
      else if (key == "alpha") v.get_to(c.alpha);
      else if (key == "k") v.get_to(c.k);
      else if (key == "invalid_threshold") v.get_to(c.invalid_threshold);
      else if (key == "max_generalization") v.get_to(c.max_generalization);
      else if (key == "max_consecutive_discards")
        v.get_to(c.max_consecutive_discards);
      else if (key == "max_examples") v.get_to(c.max_examples);
      else if (key == "seed") v.get_to(c.seed);
      else if (key == "expertise") v.get_to(c.expertise);
      else if (key == "text_template") v.get_to(c.text_template);
      else throw InputError("config: unknown key " + key);
    }
  } catch (const json::exception &e) {
    throw InputError(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

EngineConfig EngineConfig::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  try {
    return FromJson(json::parse(in));
  } catch (const json::parse_error &e) {
    throw InputError("malformed config " + path.string() + ": " + e.what());
  }
}

std::string EngineConfig::Hash() const { return HashHex(ToJson().dump()); }

std::string OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kCommitted: return "committed";
    case Outcome::kDiscardedInvalid: return "discarded_invalid";
    case Outcome::kDiscardedUnverified: return "discarded_unverified";
    case Outcome::kDiscardedNoNovelty: return "discarded_no_novelty";
  }
  throw InvariantError("bad outcome");
}

static Outcome ParseOutcome(const std::string &s) {
  for (Outcome o : {Outcome::kCommitted, Outcome::kDiscardedInvalid,
                    Outcome::kDiscardedUnverified,
                    Outcome::kDiscardedNoNovelty}) {
    if (OutcomeName(o) == s) return o;
  }
  throw InputError("trace: unknown outcome " + s);
}

std::string StopReasonName(StopReason r) {
  return r == StopReason::kExhausted ? "exhausted" : "epsilon_discards";
}

// ---------------------------------------------------------------------------
// Records

namespace {

json TripletJson(const Triplet &t) {
  return json::array({t.subject, t.predicate, t.object});
}

Triplet TripletFrom(const json &j) {
  return {j.at(0).get<std::string>(), j.at(1).get<std::string>(),
          j.at(2).get<std::string>()};
}

json ResultJson(const VerificationResult &r) {
  return {{"positive_count", r.positive_count},
          {"total", r.total},
          {"rate", r.rate},
          {"accepted", r.accepted},
          {"alpha", r.alpha}};
}

VerificationResult ResultFrom(const json &j) {
  VerificationResult r;
  j.at("positive_count").get_to(r.positive_count);
  j.at("total").get_to(r.total);
  j.at("rate").get_to(r.rate);
  j.at("accepted").get_to(r.accepted);
  j.at("alpha").get_to(r.alpha);
  return r;
}

json OptionalString(const std::optional<std::string> &s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> OptionalStringFrom(const json &j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

}  // namespace

json IterationRecord::ToJson() const {
  json answers_j = json::array();
  for (const auto &a : answers) {
    answers_j.push_back({{"text", a.text}, {"invalid", a.invalid}});
  }
  json chain_j = json::array();
  for (const auto &h : chain.items) {
    chain_j.push_back({{"level", h.level},
                       {"triplet", TripletJson(h.triplet)},
                       {"synset", OptionalString(h.synset)}});
  }
  json levels_j = json::array();
  for (const auto &l : levels) {
    levels_j.push_back({{"level", l.level},
                        {"positives", l.labels.positives},
                        {"negatives", l.labels.negatives},
                        {"result", l.result ? ResultJson(*l.result)
                                            : json(nullptr)}});
  }
  json j = {{"type", "iteration"},
            {"index", index},
            {"sampled_ids", sampled_ids},
            {"subject", subject},
            {"predicate", predicate},
            {"question",
             {{"question_expert", question.question_expert},
              {"question_vqa", question.question_vqa}}},
            {"answers", answers_j},
            {"formulation", nullptr},
            {"synset", OptionalString(synset)},
            {"chain", chain_j},
            {"delta_used", chain.delta_used},
            {"levels", levels_j},
            {"outcome", OutcomeName(outcome)},
            {"triplet", triplet ? TripletJson(*triplet) : json(nullptr)},
            {"note", note},
            {"rng_state", rng_state}};
  if (formulation) {
    j["formulation"] = {{"object", formulation->object},
                        {"new_predicates", formulation->new_predicates}};
  }
  return j;
}

IterationRecord IterationRecord::FromJson(const json &j) {
  IterationRecord r;
  try {
    j.at("index").get_to(r.index);
    j.at("sampled_ids").get_to(r.sampled_ids);
    j.at("subject").get_to(r.subject);
    j.at("predicate").get_to(r.predicate);
    j.at("question").at("question_expert").get_to(r.question.question_expert);
    j.at("question").at("question_vqa").get_to(r.question.question_vqa);
    for (const auto &a : j.at("answers")) {
      r.answers.push_back(
          {a.at("text").get<std::string>(), a.at("invalid").get<bool>()});
    }
    if (!j.at("formulation").is_null()) {
      const json &f = j.at("formulation");
      r.formulation = Formulation{
          f.at("object").get<std::string>(),
          f.at("new_predicates").get<std::vector<std::string>>()};
    }
    r.synset = OptionalStringFrom(j.at("synset"));
    for (const auto &h : j.at("chain")) {
      r.chain.items.push_back({TripletFrom(h.at("triplet")),
                               OptionalStringFrom(h.at("synset")),
                               h.at("level").get<std::size_t>()});
    }
    j.at("delta_used").get_to(r.chain.delta_used);
    for (const auto &l : j.at("levels")) {
      LevelVerification lv;
      l.at("level").get_to(lv.level);
      l.at("positives").get_to(lv.labels.positives);
      l.at("negatives").get_to(lv.labels.negatives);
      if (!l.at("result").is_null()) lv.result = ResultFrom(l.at("result"));
      r.levels.push_back(std::move(lv));
    }
    r.outcome = ParseOutcome(j.at("outcome").get<std::string>());
    if (!j.at("triplet").is_null()) r.triplet = TripletFrom(j.at("triplet"));
    j.at("note").get_to(r.note);
    j.at("rng_state").get_to(r.rng_state);
  } catch (const json::exception &e) {
    throw InputError(std::string("trace: malformed iteration record: ") +
                     e.what());
  }
  if ((r.outcome == Outcome::kCommitted) != r.triplet.has_value()) {
    throw InputError("trace: committed outcome and triplet disagree");
  }
  return r;
}

json RunResult::ToJson() const {
  return {{"type", "result"},
          {"description", description},
          {"graph", graph.ToJson()},
          {"iterations", iterations},
          {"stop_reason", StopReasonName(stop_reason)}};
}

// ---------------------------------------------------------------------------
// The loop

namespace {

std::string IdsHash(const std::vector<std::string> &ids) {
  std::string joined;
  for (const auto &id : ids) {
    joined += id;
    joined.push_back('\n');
  }
  return HashHex(joined);
}

json Header(const EngineInputs &in, const EngineConfig &cfg) {
  std::ostringstream crc;
  crc << std::hex << in.store.checksum();
  return {{"type", "header"},
          {"config", cfg.ToJson()},
          {"config_hash", cfg.Hash()},
          {"seed", cfg.seed},
          {"store_checksum", crc.str()},
          {"image_count", in.image_ids.size()},
          {"image_ids_hash", IdsHash(in.image_ids)},
          {"prompt_hashes", PromptHashes()}};
}

class TraceWriter {
 public:
  TraceWriter() = default;
  TraceWriter(const std::filesystem::path &path, bool append) {
    if (path.empty()) return;
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw InputError("cannot write trace " + path.string());
  }
  void Write(const json &line) {
    if (!out_.is_open()) return;
    out_ << line.dump() << '\n';
    out_.flush();
    if (!out_) throw ExternalError("trace write failed");
  }

 private:
  std::ofstream out_;
};

class Run {
 public:
  Run(const EngineInputs &in, const EngineConfig &cfg, TraceWriter &writer)
      : in_(in),
        cfg_(cfg),
        writer_(writer),
        rng_(cfg.seed),
        verify_store_(in.store.Subset(in.image_ids)) {
    options_.k = cfg.k;
    options_.alpha = cfg.alpha;
    options_.text_template = cfg.text_template;
  }

  // Rebuilds state from a recorded iteration without calling the oracle.
  void Replay(const IterationRecord &r) {
    if (r.index != trace_.size() + 1) {
      throw InputError("trace: iteration index out of sequence");
    }
    auto pending = graph_.Pending(r.subject);
    if (std::find(pending.begin(), pending.end(), r.predicate) ==
        pending.end()) {
      throw InputError("trace: iteration " + std::to_string(r.index) +
                       " explores a pair that is not pending");
    }
    log_[r.subject].push_back({r.predicate, r.question});
    switch (r.outcome) {
      case Outcome::kCommitted:
        if (!r.formulation) throw InputError("trace: commit without object");
        graph_.Commit(*r.triplet, r.formulation->new_predicates);
        break;
      case Outcome::kDiscardedNoNovelty:
        graph_.Retire(r.subject, r.predicate);
        break;
      default:
        break;
    }
    Count(r.outcome);
    rng_.Restore(r.rng_state);
    trace_.push_back(r);
  }

  RunResult Finish() {
    StopReason reason = StopReason::kExhausted;
    while (true) {
      if (discards_ >= cfg_.max_consecutive_discards) {
        reason = StopReason::kEpsilonDiscards;
        break;
      }
      if (!graph_.HasPending()) break;
      Step();
    }
    graph_.DropPending();
    RunResult result;
    result.graph = graph_;
    result.description = in_.oracle.WriteDescription(graph_.Render());
    result.trace = trace_;
    result.iterations = trace_.size();
    result.stop_reason = reason;
    writer_.Write(result.ToJson());
    return result;
  }

 private:
  void Count(Outcome o) {
    discards_ = o == Outcome::kCommitted ? 0 : discards_ + 1;
  }

  void Step() {
    IterationRecord r;
    r.index = trace_.size() + 1;
    for (std::size_t i :
         rng_.Sample(in_.image_ids.size(), cfg_.subset_size)) {
      r.sampled_ids.push_back(in_.image_ids[i]);
    }
    auto frontier = graph_.SelectFrontier(rng_);
    if (!frontier) throw InvariantError("no frontier while predicates pend");
    r.subject = frontier->subject;
    r.predicate = frontier->predicate;
    r.rng_state = rng_.State();

    Decide(r);
    switch (r.outcome) {
      case Outcome::kCommitted:
        break;  // Commit already retired the pair.
      case Outcome::kDiscardedNoNovelty:
        graph_.Consume();
        break;
      default:
        graph_.Release();
    }
    Count(r.outcome);
    spdlog::info("iteration {}: ({}, {}) -> {}", r.index, r.subject,
                 r.predicate, OutcomeName(r.outcome));
    writer_.Write(r.ToJson());
    trace_.push_back(std::move(r));
  }

  void Decide(IterationRecord &r) {
    QuestionRequest req;
    req.subject = r.subject;
    req.predicate = r.predicate;
    req.expertise = cfg_.expertise;
    req.log = log_[r.subject];
    std::string branch;
    for (const auto &node : graph_.PathTo(r.subject)) {
      branch += node + ".";
    }
    req.branch = branch + r.predicate + "?";
    r.question = in_.oracle.NextQuestion(req);
    log_[r.subject].push_back({r.predicate, r.question});

    std::vector<std::future<VqaAnswer>> pending;
    for (const auto &id : r.sampled_ids) {
      pending.push_back(std::async(std::launch::async, [this, &id, &r] {
        return in_.oracle.Vqa(id, r.question.question_vqa);
      }));
    }
    std::size_t invalid = 0;
    for (auto &f : pending) {
      r.answers.push_back(f.get());
      if (r.answers.back().invalid) ++invalid;
    }
    // A sample smaller than the threshold can still be entirely invalid.
    std::size_t threshold =
        std::min(cfg_.invalid_threshold, r.sampled_ids.size());
    if (invalid >= threshold) {
      r.outcome = Outcome::kDiscardedInvalid;
      return;
    }

    r.formulation = in_.oracle.Formulate(r.answers, r.subject, r.predicate);
    const std::string &object = r.formulation->object;
    auto senses = in_.lex.Senses(object);
    if (!senses.empty()) {
      std::vector<std::string> context;
      for (const auto &a : r.answers) {
        if (!a.invalid) context.push_back(a.text);
      }
      try {
        r.synset = in_.oracle.DisambiguateSense(object, context, senses);
      } catch (const SenseSelectionError &e) {
        r.outcome = Outcome::kDiscardedUnverified;
        r.note = e.what();
        return;
      }
    }

    Hypothesis h0{{r.subject, r.predicate, object}, r.synset, 0};
    r.chain = Expand(h0, in_.lex, cfg_.max_generalization);
    auto verified = VerifyChain(
        r.chain,
        [this](const Hypothesis &, const LabelSets &labels) {
          return Verify(verify_store_, labels, in_.provider, options_);
        },
        in_.lex, cfg_.max_examples);
    r.levels = verified.levels;
    if (!verified.verified) {
      r.outcome = Outcome::kDiscardedUnverified;
      if (!r.synset) r.note = "object not in the lexicon";
      return;
    }

    const Triplet &t = verified.verified->triplet;
    if (graph_.WouldCreateCycle(t)) {
      r.outcome = Outcome::kDiscardedNoNovelty;
      r.note = "edge would close a cycle";
      return;
    }
    ConceptGraph tentative = graph_;
    if (!tentative.Commit(t, r.formulation->new_predicates)) {
      r.outcome = Outcome::kDiscardedNoNovelty;
      r.note = "triplet already present";
      return;
    }
    if (!in_.oracle.NoveltyCheck(graph_.Render(), tentative.Render())) {
      r.outcome = Outcome::kDiscardedNoNovelty;
      return;
    }
    graph_ = std::move(tentative);
    r.outcome = Outcome::kCommitted;
    r.triplet = t;
  }

  const EngineInputs &in_;
  const EngineConfig &cfg_;
  TraceWriter &writer_;
  Rng rng_;
  EmbeddingStore verify_store_;
  VerifyOptions options_;
  ConceptGraph graph_;
  std::map<std::string, std::vector<AskedQuestion>> log_;
  std::vector<IterationRecord> trace_;
  std::size_t discards_ = 0;
};

void CheckInputs(const EngineInputs &in) {
  if (in.image_ids.empty()) throw InputError("no images to describe");
  std::set<std::string> unique(in.image_ids.begin(), in.image_ids.end());
  if (unique.size() != in.image_ids.size()) {
    throw InputError("image ids contain duplicates");
  }
}

}  // namespace

RunResult Describe(const EngineInputs &in, const EngineConfig &cfg,
                   const std::filesystem::path &trace_path) {
  cfg.Validate();
  CheckInputs(in);
  TraceWriter writer(trace_path, /*append=*/false);
  Run run(in, cfg, writer);
  writer.Write(Header(in, cfg));
  return run.Finish();
}

RunResult Resume(const std::filesystem::path &trace_path,
                 const EngineInputs &in) {
  CheckInputs(in);
  std::ifstream file(trace_path);
  if (!file) throw InputError("cannot open trace " + trace_path.string());
  std::vector<json> lines;
  std::string line;
  for (std::size_t n = 1; std::getline(file, line); ++n) {
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::parse_error &) {
      throw InputError("trace: corrupt line " + std::to_string(n));
    }
  }
  file.close();
  if (lines.empty() || lines[0].value("type", "") != "header") {
    throw InputError("trace: missing header");
  }
  const json &header = lines[0];
  EngineConfig cfg;
  try {
    cfg = EngineConfig::FromJson(header.at("config"));
    if (header.at("config_hash").get<std::string>() != cfg.Hash()) {
      throw InputError("trace: config hash mismatch");
    }
  } catch (const json::exception &e) {
    throw InputError(std::string("trace: malformed header: ") + e.what());
  }
  json expected = Header(in, cfg);
  for (const char *key : {"store_checksum", "image_ids_hash"}) {
    if (header.value(key, json()) != expected.at(key)) {
      throw InputError(std::string("trace: ") + key +
                       " does not match the inputs");
    }
  }
  if (header.value("prompt_hashes", json()) != expected.at("prompt_hashes")) {
    throw InputError("trace: prompt templates changed since the trace");
  }

  std::vector<IterationRecord> records;
  std::optional<json> stored;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string type = lines[i].value("type", "");
    if (stored) throw InputError("trace: lines after the result");
    if (type == "iteration") {
      records.push_back(IterationRecord::FromJson(lines[i]));
    } else if (type == "result") {
      stored = lines[i];
    } else {
      throw InputError("trace: unknown line type " + type);
    }
  }

  TraceWriter writer;
  if (!stored) writer = TraceWriter(trace_path, /*append=*/true);
  Run run(in, cfg, writer);
  for (const auto &r : records) run.Replay(r);
  if (!stored) return run.Finish();

  RunResult result;
  try {
    result.description = stored->at("description").get<std::string>();
    result.graph = ConceptGraph::FromJson(stored->at("graph"));
    result.iterations = stored->at("iterations").get<std::size_t>();
    result.stop_reason =
        stored->at("stop_reason").get<std::string>() == "exhausted"
            ? StopReason::kExhausted
            : StopReason::kEpsilonDiscards;
  } catch (const json::exception &e) {
    throw InputError(std::string("trace: malformed result: ") + e.what());
  }
  result.trace = std::move(records);
  if (result.iterations != result.trace.size()) {
    throw InputError("trace: result iteration count disagrees with records");
  }
  return result;
}

std::vector<std::size_t> ReplayVerification(
    const std::vector<IterationRecord> &records, const EmbeddingStore &store,
    EmbeddingProvider &provider, const EngineConfig &cfg) {
  VerifyOptions options{cfg.k, cfg.alpha, cfg.text_template};
  std::vector<std::size_t> mismatched;
  for (const auto &r : records) {
    bool same = true;
    for (const auto &level : r.levels) {
      if (!level.result) continue;
      VerificationResult again = Verify(store, level.labels, provider, options);
      const VerificationResult &was = *level.result;
      if (again.positive_count != was.positive_count ||
          again.total != was.total || again.rate != was.rate ||
          again.accepted != was.accepted) {
        same = false;
      }
    }
    if (!same) mismatched.push_back(r.index);
  }
  return mismatched;
}

}  // namespace setdesc
