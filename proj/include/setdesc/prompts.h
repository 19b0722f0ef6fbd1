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

#ifndef SETDESC_PROMPTS_H_
#define SETDESC_PROMPTS_H_

#include <map>
#include <string>
#include <string_view>

namespace setdesc {

// Prompt templates compiled in from prompts/*.txt, keyed by file stem.
std::string_view PromptTemplate(std::string_view name);

// Content hash of every template, for trace headers.
std::map<std::string, std::string> PromptHashes();

// Replaces "{key}" for every key in `values`; other braces are left alone.
std::string FormatPrompt(std::string_view tmpl,
                         const std::map<std::string, std::string> &values);

}  // namespace setdesc

#endif  // SETDESC_PROMPTS_H_
