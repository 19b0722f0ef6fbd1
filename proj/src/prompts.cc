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

#include "setdesc/prompts.h"

#include "setdesc/errors.h"
#include "setdesc/hashing.h"
#include "prompt_data.h"

namespace setdesc {

std::string_view PromptTemplate(std::string_view name) {
  for (const auto &entry : kPromptTemplates) {
    if (entry.name == name) return entry.text;
  }
  throw InvariantError("unknown prompt template " + std::string(name));
}

std::map<std::string, std::string> PromptHashes() {
  std::map<std::string, std::string> out;
  for (const auto &entry : kPromptTemplates) {
    out.emplace(entry.name, HashHex(entry.text));
  }
  return out;
}

std::string FormatPrompt(std::string_view tmpl,
                         const std::map<std::string, std::string> &values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    auto close = tmpl.find('}', open);
    if (close == std::string_view::npos) break;
    auto it = values.find(std::string(tmpl.substr(open + 1, close - open - 1)));
    if (it == values.end()) {
      out.append(tmpl.substr(pos, open + 1 - pos));
      pos = open + 1;
      continue;
    }
    out.append(tmpl.substr(pos, open - pos));
    out += it->second;
    pos = close + 1;
  }
  out.append(tmpl.substr(std::min(pos, tmpl.size())));
  return out;
}

}  // namespace setdesc
