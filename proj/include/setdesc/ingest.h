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

#ifndef SETDESC_INGEST_H_
#define SETDESC_INGEST_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace setdesc {

// One metadata row. Caption-identity grouping reads `caption`; attribute
// grouping reads `genre`, `style` and the optional `artist`. Rows sharing a
// non-empty `content_hash` are duplicates of the same image.
struct MetadataRecord {
  std::string id;
  std::string caption;
  std::string genre;
  std::string style;
  std::optional<std::string> artist;
  bool available = true;
  std::string content_hash;
};

enum class GroupSource { kCaptionIdentity, kWikiartAttrs };

struct GroupSpec {
  std::string caption;
  std::vector<std::string> member_ids;
  GroupSource source = GroupSource::kCaptionIdentity;

  nlohmann::json ToJson() const;
};

inline constexpr std::size_t kMinGroupSize = 50;
inline constexpr std::size_t kCaptionMinLinksExclusive = 100;
inline constexpr std::size_t kTwoAttributeMinExclusive = 499;

// Groups rows by exact caption. A caption survives when it has more than
// 100 rows, and then at least 50 available members after removing
// duplicate ids and duplicate content hashes. Captions in `excluded` are
// dropped. Output is sorted by caption; members keep input order.
std::vector<GroupSpec> GroupByCaption(
    const std::vector<MetadataRecord> &records,
    const std::set<std::string> &excluded = {});

// "<genre> in <style> Style" or "<genre> by <artist> in <style> Style".
// Throws InputError when genre or style is empty.
std::string WikiartCaption(const std::string &genre, const std::string &style,
                           const std::optional<std::string> &artist);

// Every row joins its (genre, style) group and, when it names an artist,
// its (genre, style, artist) group. Two-attribute groups need more than 499
// rows, three-attribute groups at least 50; afterwards every group needs at
// least 50 available unique members. Values outside the known vocabulary
// are kept with a warning.
std::vector<GroupSpec> GroupWikiart(const std::vector<MetadataRecord> &records,
                                    const std::set<std::string> &excluded = {});

bool KnownArtist(const std::string &artist);
bool KnownGenre(const std::string &genre);
bool KnownStyle(const std::string &style);

// Reads .csv (header row, RFC 4180 quoting) or .jsonl metadata. Recognized
// columns: id, caption, genre, style, artist, available, content_hash.
std::vector<MetadataRecord> ReadMetadata(const std::filesystem::path &path);

// One caption per line; blank lines and '#' lines ignored.
std::set<std::string> ReadExclusions(const std::filesystem::path &path);

// Writes group_NNNN.json per group and manifest.json into `dir`.
void WriteGroups(const std::vector<GroupSpec> &groups,
                 const std::filesystem::path &dir);

}  // namespace setdesc

#endif  // SETDESC_INGEST_H_
