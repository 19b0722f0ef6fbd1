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

#include "setdesc/ingest.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "setdesc/errors.h"

namespace setdesc {
namespace {

const std::set<std::string> kArtists = {
    "Albrecht Durer",    "Boris Kustodiev",       "Camille Pissarro",
    "Childe Hassam",     "Claude Monet",          "Edgar Degas",
    "Eugene Boudin",     "Gustave Dore",          "Ilya Repin",
    "Ivan Aivazovsky",   "Ivan Shishkin",         "John Singer Sargent",
    "Marc Chagall",      "Martiros Saryan",       "Nicholas Roerich",
    "Pablo Picasso",     "Paul Cezanne",          "Pierre Auguste Renoir",
    "Pyotr Konchalovsky", "Raphael Kirchner",     "Rembrandt",
    "Salvador Dali",     "Vincent van Gogh"};

const std::set<std::string> kGenres = {
    "Abstract paintings", "Cityscapes",     "Genre paintings",
    "Illustrations",      "Landscapes",     "Nude paintings",
    "Portraits",          "Religious paintings",
    "Sketches and studies", "Still lifes"};

const std::set<std::string> kStyles = {
    "Abstract Expressionism", "Action painting",
    "Analytical Cubism",      "Art Nouveau",
    "Baroque",                "Color Field Painting",
    "Contemporary Realism",   "Cubism",
    "Early Renaissance",      "Expressionism",
    "Fauvism",                "High Renaissance",
    "Impressionism",          "Mannerism Late Renaissance",
    "Minimalism",             "Naive Art Primitivism",
    "New Realism",            "Northern Renaissance",
    "Pointillism",            "Pop Art",
    "Post Impressionism",     "Realism",
    "Rococo",                 "Romanticism",
    "Symbolism",              "Synthetic Cubism",
    "Ukiyo-e"};

struct Bucket {
  std::size_t rows = 0;
  std::vector<const MetadataRecord *> members;
};

// Available members with duplicate ids and content hashes removed.
std::vector<std::string> Survivors(const Bucket &b) {
  std::set<std::string> ids, hashes;
  std::vector<std::string> out;
  for (const MetadataRecord *r : b.members) {
    if (!r->available) continue;
    if (!ids.insert(r->id).second) continue;
    if (!r->content_hash.empty() && !hashes.insert(r->content_hash).second) {
      continue;
    }
    out.push_back(r->id);
  }
  return out;
}

std::string Trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

bool ParseFlag(const std::string &raw, std::size_t line) {
  std::string v = Trim(raw);
  for (char &c : v) c = static_cast<char>(std::tolower(c));
  if (v.empty() || v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw InputError("line " + std::to_string(line) + ": bad available flag '" +
                   raw + "'");
}

// Splits CSV text into rows of fields, honouring quotes.
std::vector<std::vector<std::string>> ParseCsv(std::istream &in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw InputError("CSV: unterminated quote");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

MetadataRecord FromColumns(const std::map<std::string, std::string> &cols,
                           std::size_t line) {
  MetadataRecord r;
  auto get = [&](const char *k) {
    auto it = cols.find(k);
    return it == cols.end() ? std::string() : it->second;
  };
  r.id = Trim(get("id"));
  if (r.id.empty()) {
    throw InputError("line " + std::to_string(line) + ": missing id");
  }
  r.caption = get("caption");
  r.genre = Trim(get("genre"));
  r.style = Trim(get("style"));
  std::string artist = Trim(get("artist"));
  if (!artist.empty()) r.artist = artist;
  r.available = ParseFlag(get("available"), line);
  r.content_hash = Trim(get("content_hash"));
  return r;
}

}  // namespace

nlohmann::json GroupSpec::ToJson() const {
  return {{"caption", caption},
          {"member_ids", member_ids},
          {"source", source == GroupSource::kCaptionIdentity
                         ? "caption_identity"
                         : "wikiart_attrs"}};
}

std::vector<GroupSpec> GroupByCaption(
    const std::vector<MetadataRecord> &records,
    const std::set<std::string> &excluded) {
  std::map<std::string, Bucket> buckets;
  for (const auto &r : records) {
    Bucket &b = buckets[r.caption];
    ++b.rows;
    b.members.push_back(&r);
  }
  std::vector<GroupSpec> out;
  for (const auto &[caption, b] : buckets) {
    if (b.rows <= kCaptionMinLinksExclusive) continue;
    if (excluded.contains(caption)) continue;
    auto members = Survivors(b);
    if (members.size() < kMinGroupSize) continue;
    out.push_back({caption, std::move(members), GroupSource::kCaptionIdentity});
  }
  return out;
}

std::string WikiartCaption(const std::string &genre, const std::string &style,
                           const std::optional<std::string> &artist) {
  if (genre.empty() || style.empty()) {
    throw InputError("caption needs a genre and a style");
  }
  if (artist && !artist->empty()) {
    return genre + " by " + *artist + " in " + style + " Style";
  }
  return genre + " in " + style + " Style";
}

bool KnownArtist(const std::string &artist) { return kArtists.contains(artist); }
bool KnownGenre(const std::string &genre) { return kGenres.contains(genre); }
bool KnownStyle(const std::string &style) { return kStyles.contains(style); }

std::vector<GroupSpec> GroupWikiart(const std::vector<MetadataRecord> &records,
                                    const std::set<std::string> &excluded) {
  std::map<std::string, Bucket> pairs, triples;
  std::set<std::string> warned;
  auto warn = [&](const char *what, const std::string &v) {
    if (warned.insert(std::string(what) + ":" + v).second) {
      spdlog::warn("unknown {} '{}'", what, v);
    }
  };
  for (const auto &r : records) {
    if (r.genre.empty() || r.style.empty()) {
      throw InputError("row " + r.id + " lacks a genre or style");
    }
    if (!KnownGenre(r.genre)) warn("genre", r.genre);
    if (!KnownStyle(r.style)) warn("style", r.style);
    Bucket &p = pairs[WikiartCaption(r.genre, r.style, std::nullopt)];
    ++p.rows;
    p.members.push_back(&r);
    if (r.artist) {
      if (!KnownArtist(*r.artist)) warn("artist", *r.artist);
      Bucket &t = triples[WikiartCaption(r.genre, r.style, r.artist)];
      ++t.rows;
      t.members.push_back(&r);
    }
  }
  std::map<std::string, std::vector<std::string>> kept;
  for (const auto &[caption, b] : pairs) {
    if (b.rows > kTwoAttributeMinExclusive) kept[caption] = Survivors(b);
  }
  for (const auto &[caption, b] : triples) {
    if (b.rows >= kMinGroupSize) kept[caption] = Survivors(b);
  }
  std::vector<GroupSpec> out;
  for (auto &[caption, members] : kept) {
    if (members.size() < kMinGroupSize || excluded.contains(caption)) continue;
    out.push_back({caption, std::move(members), GroupSource::kWikiartAttrs});
  }
  return out;
}

std::vector<MetadataRecord> ReadMetadata(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open metadata " + path.string());
  std::vector<MetadataRecord> out;
  if (path.extension() == ".csv") {
    auto rows = ParseCsv(in);
    if (rows.empty()) return out;
    const auto &header = rows[0];
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() == 1 && Trim(rows[i][0]).empty()) continue;
      if (rows[i].size() != header.size()) {
        throw InputError("CSV row " + std::to_string(i + 1) + " has " +
                         std::to_string(rows[i].size()) + " fields, header has " +
                         std::to_string(header.size()));
      }
      std::map<std::string, std::string> cols;
      for (std::size_t c = 0; c < header.size(); ++c) {
        cols[Trim(header[c])] = rows[i][c];
      }
      out.push_back(FromColumns(cols, i + 1));
    }
    return out;
  }
  if (path.extension() != ".jsonl") {
    throw InputError("metadata must be .csv or .jsonl: " + path.string());
  }
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (Trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw InputError("line " + std::to_string(n) + ": " + e.what());
    }
    std::map<std::string, std::string> cols;
    for (const auto &[k, v] : j.items()) {
      if (v.is_null()) continue;
      cols[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    out.push_back(FromColumns(cols, n));
  }
  return out;
}

std::set<std::string> ReadExclusions(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open exclusion list " + path.string());
  std::set<std::string> out;
  for (std::string line; std::getline(in, line);) {
    std::string t = Trim(line);
    if (!t.empty() && t[0] != '#') out.insert(t);
  }
  return out;
}

void WriteGroups(const std::vector<GroupSpec> &groups,
                 const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = {{"groups", nlohmann::json::array()},
                             {"total_images", 0}};
  std::size_t total = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "group_%04zu.json", i + 1);
    std::ofstream out(dir / name);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    out << groups[i].ToJson().dump(2) << '\n';
    total += groups[i].member_ids.size();
    manifest["groups"].push_back({{"file", name},
                                  {"caption", groups[i].caption},
                                  {"size", groups[i].member_ids.size()},
                                  {"source", groups[i].ToJson()["source"]}});
  }
  manifest["total_images"] = total;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw InputError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace setdesc
