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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "setdesc/oracle.h"
#include "setdesc/prompts.h"

namespace setdesc {
namespace {

using nlohmann::json;

std::string Prompt(std::string_view name,
                   const std::map<std::string, std::string> &values = {}) {
  return FormatPrompt(PromptTemplate(name), values);
}

std::string MimeFor(const std::filesystem::path &p) {
  std::string ext = p.extension().string();
  for (char &c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".png") return "image/png";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  return "image/jpeg";
}

std::string StringField(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    throw ProtocolError(std::string("reply lacks string field ") + key);
  }
  return j.at(key).get<std::string>();
}

}  // namespace

HttpOracle::HttpOracle(HttpOracleConfig config)
    : config_(std::move(config)),
      slots_(std::clamp(config_.max_inflight, 1, 64)) {
  if (config_.api_key.empty()) {
    if (const char *key = std::getenv("SETDESC_API_KEY")) config_.api_key = key;
  }
  // Split "https://host[:port]/v1" into origin and path prefix.
  const std::string &url = config_.base_url;
  auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw InputError("oracle base URL needs a scheme: " + url);
  }
  auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : url.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

json HttpOracle::Send(const std::string &system, const json &user_content,
                      bool json_mode) {
  json body = {{"model", config_.model},
               {"temperature", 0},
               {"messages",
                json::array({{{"role", "system"}, {"content", system}},
                             {{"role", "user"}, {"content", user_content}}})}};
  if (json_mode) body["response_format"] = {{"type", "json_object"}};

  slots_.acquire();
  struct Release {
    std::counting_semaphore<64> &s;
    ~Release() { s.release(); }
  } release{slots_};
  ++requests_;

  httplib::Client client(origin_);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path_prefix_ + "/chat/completions", headers,
                         body.dump(), "application/json");
  if (!res) {
    throw ExternalError("chat request failed: " +
                        httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ExternalError("chat request returned HTTP " +
                        std::to_string(res->status) + ": " +
                        res->body.substr(0, 200));
  }
  std::string content;
  try {
    content = json::parse(res->body)
                  .at("choices")
                  .at(0)
                  .at("message")
                  .at("content")
                  .get<std::string>();
  } catch (const json::exception &e) {
    throw ProtocolError(std::string("malformed chat response: ") + e.what());
  }
  if (!json_mode) return content;
  try {
    return json::parse(content);
  } catch (const json::exception &) {
    throw ProtocolError("reply is not JSON: " + content.substr(0, 200));
  }
}

template <typename Parse>
auto HttpOracle::Call(const std::string &system, const json &user_content,
                      bool json_mode, Parse parse)
    -> decltype(parse(json())) {
  for (int attempt = 0;; ++attempt) {
    try {
      return parse(Send(system, user_content, json_mode));
    } catch (const ExternalError &e) {
      if (attempt >= 1) throw;
      spdlog::warn("oracle call failed, retrying: {}", e.what());
    }
  }
}

QuestionPair HttpOracle::DoNextQuestion(const QuestionRequest &request) {
  std::string system =
      Prompt("next_question",
             {{"expertise", request.expertise},
              {"jsonScheme_input",
               std::string(PromptTemplate("next_question_input"))},
              {"jsonScheme_output",
               std::string(PromptTemplate("next_question_output"))}});
  json log = json::array();
  for (const auto &q : request.log) {
    log.push_back({{"ATTRIBUTE", q.attribute},
                   {"QUESTION_EXPERT", q.pair.question_expert},
                   {"QUESTION_VQA", q.pair.question_vqa}});
  }
  json user = {{"QUESTION_BRANCH", request.branch},
               {"KEY_POINT", request.subject},
               {"ATTRIBUTE", request.predicate},
               {"log", log}};
  return Call(system, user.dump(), true, [](const json &r) {
    return QuestionPair{StringField(r, "QUESTION_EXPERT"),
                        StringField(r, "QUESTION_VQA")};
  });
}

VqaAnswer HttpOracle::DoVqa(const std::string &image_ref,
                            const std::string &question) {
  json image;
  std::filesystem::path path(image_ref);
  if (std::filesystem::is_regular_file(path)) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    image = {{"type", "image_url"},
             {"image_url",
              {{"url", "data:" + MimeFor(path) + ";base64," +
                           httplib::detail::base64_encode(bytes.str())}}}};
  } else if (image_ref.starts_with("http://") ||
             image_ref.starts_with("https://")) {
    image = {{"type", "image_url"}, {"image_url", {{"url", image_ref}}}};
  } else {
    image = {{"type", "text"}, {"text", "IMAGE: " + image_ref}};
  }
  json user = json::array(
      {{{"type", "text"}, {"text", "QUESTION: " + question}}, image});
  return Call(Prompt("vqa"), user, true, [](const json &r) {
    std::string answer = StringField(r, "answer");
    bool valid = r.value("valid", true);
    return VqaAnswer{answer, !valid};
  });
}

Formulation HttpOracle::DoFormulate(const std::vector<std::string> &answers,
                                    const std::string &subject,
                                    const std::string &predicate) {
  json user = {{"SUBJECT", subject},
               {"PREDICATE", predicate},
               {"ANSWERS", answers}};
  return Call(Prompt("formulate"), user.dump(), true, [](const json &r) {
    Formulation f{StringField(r, "OBJECT"), {}};
    if (r.contains("NEW_PREDICATES")) {
      const json &p = r.at("NEW_PREDICATES");
      if (!p.is_array()) throw ProtocolError("NEW_PREDICATES is not a list");
      for (const auto &x : p) {
        if (x.is_string()) f.new_predicates.push_back(x.get<std::string>());
      }
    }
    return f;
  });
}

bool HttpOracle::DoNoveltyCheck(const std::string &old_render,
                                const std::string &new_render) {
  json user = {{"GRAPH_OLD", old_render}, {"GRAPH_NEW", new_render}};
  return Call(Prompt("novelty"), user.dump(), true, [](const json &r) {
    if (!r.is_object() || !r.contains("NEW_INFORMATION") ||
        !r.at("NEW_INFORMATION").is_boolean()) {
      throw ProtocolError("reply lacks boolean NEW_INFORMATION");
    }
    return r.at("NEW_INFORMATION").get<bool>();
  });
}

std::string HttpOracle::DoWriteDescription(const std::string &render) {
  std::string system = Prompt(
      "write_description",
      {{"jsonScheme_input",
        std::string(PromptTemplate("write_description_input"))},
       {"jsonScheme_output",
        std::string(PromptTemplate("write_description_output"))}});
  json user = {{"GRAPH", render}};
  return Call(system, user.dump(), true, [](const json &r) {
    return StringField(r, "DESCRIPTION");
  });
}

std::string HttpOracle::DoCaptionize(const std::string &description) {
  std::string text = Prompt("captionize", {{"description", description}});
  return Call("You are a helpful assistant.", text, false,
              [](const json &r) { return r.get<std::string>(); });
}

bool HttpOracle::DoJudgeEquivalence(const std::string &candidate,
                                    const std::string &reference) {
  std::string text =
      Prompt("judge", {{"hypothesis", candidate}, {"reference", reference}});
  return Call("You are a helpful assistant.", text, false,
              [](const json &r) { return ParseJudgeReply(r.get<std::string>()); });
}

SynsetId HttpOracle::DoDisambiguateSense(
    const std::string &term, const std::vector<std::string> &context,
    const std::vector<SenseEntry> &candidates) {
  json cands = json::array();
  for (const auto &c : candidates) {
    cands.push_back({{"id", c.id}, {"definition", c.gloss}});
  }
  json user = {{"TERM", term}, {"ANSWERS", context}, {"CANDIDATES", cands}};
  return Call(Prompt("disambiguate"), user.dump(), true, [](const json &r) {
    return StringField(r, "SENSE");
  });
}

std::vector<std::string> HttpOracle::DoProposeDifferences(
    const std::string &render_a, const std::string &render_b, int round,
    std::size_t count, const std::vector<std::string> &previous) {
  (void)round;
  std::string text =
      Prompt("propose", {{"graph_a", render_a},
                         {"graph_b", render_b},
                         {"count", std::to_string(count)},
                         {"previous", json(previous).dump()}});
  return Call("You are a helpful assistant.", text, true, [](const json &r) {
    if (!r.is_object() || !r.contains("DIFFERENCES") ||
        !r.at("DIFFERENCES").is_array()) {
      throw ProtocolError("reply lacks a DIFFERENCES list");
    }
    std::vector<std::string> out;
    for (const auto &x : r.at("DIFFERENCES")) {
      if (x.is_string()) out.push_back(x.get<std::string>());
    }
    return out;
  });
}

}  // namespace setdesc
