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

#include <fstream>

#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"
#include "setdesc/errors.h"
#include "setdesc/ingest.h"

namespace setdesc {
namespace {

// `rows` rows captioned `caption`, of which the first `available` are
// available. Ids are unique per caption.
void AddCaptionRows(std::vector<MetadataRecord> &out, const std::string &caption,
                    std::size_t rows, std::size_t available) {
  for (std::size_t i = 0; i < rows; ++i) {
    MetadataRecord r;
    r.id = caption + "#" + std::to_string(i);
    r.caption = caption;
    r.available = i < available;
    out.push_back(r);
  }
}

const GroupSpec *Find(const std::vector<GroupSpec> &groups,
                      const std::string &caption) {
  for (const auto &g : groups) {
    if (g.caption == caption) return &g;
  }
  return nullptr;
}

TEST_CASE("caption groups need more than 100 rows and 50 usable members") {
  std::vector<MetadataRecord> rows;
  AddCaptionRows(rows, "exactly 100", 100, 100);
  AddCaptionRows(rows, "101 rows", 101, 101);
  AddCaptionRows(rows, "49 available", 120, 49);
  AddCaptionRows(rows, "50 available", 120, 50);
  auto groups = GroupByCaption(rows);
  CHECK(Find(groups, "exactly 100") == nullptr);
  REQUIRE(Find(groups, "101 rows") != nullptr);
  CHECK(Find(groups, "101 rows")->member_ids.size() == 101);
  CHECK(Find(groups, "49 available") == nullptr);
  REQUIRE(Find(groups, "50 available") != nullptr);
  CHECK(Find(groups, "50 available")->member_ids.size() == 50);
  CHECK(Find(groups, "50 available")->source == GroupSource::kCaptionIdentity);
  for (std::size_t i = 1; i < groups.size(); ++i) {
    CHECK(groups[i - 1].caption < groups[i].caption);
  }

  auto excluded = GroupByCaption(rows, {"101 rows"});
  CHECK(Find(excluded, "101 rows") == nullptr);
  CHECK(excluded.size() == groups.size() - 1);
}

TEST_CASE("duplicates are removed before the size check") {
  std::vector<MetadataRecord> rows;
  AddCaptionRows(rows, "dup", 110, 110);
  // Rows 60 onward repeat the content hashes of rows 0..49.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].content_hash = "h" + std::to_string(i < 60 ? i : i - 60);
  }
  auto groups = GroupByCaption(rows);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].member_ids.size() == 60);
  CHECK(groups[0].member_ids.front() == "dup#0");

  for (auto &r : rows) r.content_hash.clear();
  for (std::size_t i = 49; i < rows.size(); ++i) rows[i].id = "same";
  // 49 distinct ids plus one "same" give exactly 50 members.
  auto ids = GroupByCaption(rows);
  REQUIRE(ids.size() == 1);
  CHECK(ids[0].member_ids.size() == 50);
  rows[48].id = "same";
  CHECK(GroupByCaption(rows).empty());
}

TEST_CASE("attribute captions") {
  CHECK(WikiartCaption("Landscapes", "Impressionism", std::nullopt) ==
        "Landscapes in Impressionism Style");
  CHECK(WikiartCaption("Portraits", "Baroque", std::string("Rembrandt")) ==
        "Portraits by Rembrandt in Baroque Style");
  CHECK(WikiartCaption("Portraits", "Baroque", std::string()) ==
        "Portraits in Baroque Style");
  CHECK_THROWS_AS(WikiartCaption("", "Baroque", std::nullopt), InputError);
  CHECK(KnownArtist("Claude Monet"));
  CHECK(KnownGenre("Cityscapes"));
  CHECK(KnownStyle("Ukiyo-e"));
  CHECK_FALSE(KnownStyle("Vaporwave"));
}

void AddArt(std::vector<MetadataRecord> &out, const std::string &genre,
            const std::string &style, std::optional<std::string> artist,
            std::size_t rows) {
  for (std::size_t i = 0; i < rows; ++i) {
    MetadataRecord r;
    r.id = genre + style + artist.value_or("") + std::to_string(i);
    r.genre = genre;
    r.style = style;
    r.artist = artist;
    out.push_back(r);
  }
}

TEST_CASE("attribute groups use their own thresholds") {
  std::vector<MetadataRecord> rows;
  AddArt(rows, "Landscapes", "Realism", std::nullopt, 499);
  AddArt(rows, "Portraits", "Rococo", std::nullopt, 500);
  AddArt(rows, "Cityscapes", "Cubism", std::string("Pablo Picasso"), 49);
  AddArt(rows, "Still lifes", "Cubism", std::string("Pablo Picasso"), 50);
  auto groups = GroupWikiart(rows);
  CHECK(Find(groups, "Landscapes in Realism Style") == nullptr);
  REQUIRE(Find(groups, "Portraits in Rococo Style") != nullptr);
  CHECK(Find(groups, "Portraits in Rococo Style")->member_ids.size() == 500);
  CHECK(Find(groups, "Cityscapes by Pablo Picasso in Cubism Style") == nullptr);
  REQUIRE(Find(groups, "Still lifes by Pablo Picasso in Cubism Style") != nullptr);
  // 50 artist rows are far from the 500 a genre and style pair needs.
  CHECK(Find(groups, "Still lifes in Cubism Style") == nullptr);
  CHECK(groups.size() == 2);
  CHECK(groups[0].source == GroupSource::kWikiartAttrs);

  auto excluded = GroupWikiart(rows, {"Portraits in Rococo Style"});
  CHECK(excluded.size() == 1);

  rows.push_back({"odd", "", "", "Rococo", std::nullopt, true, ""});
  CHECK_THROWS_AS(GroupWikiart(rows), InputError);
}

TEST_CASE("unknown vocabulary is kept") {
  std::vector<MetadataRecord> rows;
  AddArt(rows, "Murals", "Vaporwave", std::string("Nobody"), 60);
  auto groups = GroupWikiart(rows);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].caption == "Murals by Nobody in Vaporwave Style");
}

TEST_CASE("metadata readers") {
  auto dir = testing::TempDir("ingest_read");
  {
    std::ofstream out(dir / "m.csv");
    out << "id,caption,available,content_hash\n"
           "a,\"a dog, running\",1,h1\n"
           "b,\"said \"\"hi\"\"\",false,\n"
           "c,\"two\nlines\",yes,h3\n";
  }
  auto csv = ReadMetadata(dir / "m.csv");
  REQUIRE(csv.size() == 3);
  CHECK(csv[0].caption == "a dog, running");
  CHECK(csv[0].content_hash == "h1");
  CHECK(csv[1].caption == "said \"hi\"");
  CHECK_FALSE(csv[1].available);
  CHECK(csv[2].caption == "two\nlines");

  {
    std::ofstream out(dir / "m.jsonl");
    out << R"({"id": "x", "genre": "Portraits", "style": "Baroque", "artist": null})"
        << "\n\n"
        << R"({"id": "y", "genre": "Portraits", "style": "Baroque", "artist": "Rembrandt", "available": false})"
        << "\n";
  }
  auto jl = ReadMetadata(dir / "m.jsonl");
  REQUIRE(jl.size() == 2);
  CHECK_FALSE(jl[0].artist.has_value());
  CHECK(jl[1].artist == std::optional<std::string>("Rembrandt"));
  CHECK_FALSE(jl[1].available);

  auto write = [&](const std::string &name, const std::string &body) {
    std::ofstream out(dir / name);
    out << body;
    return dir / name;
  };
  CHECK_THROWS_AS(ReadMetadata(write("bad.csv", "id,caption\na\n")), InputError);
  CHECK_THROWS_AS(ReadMetadata(write("quote.csv", "id,caption\na,\"open\n")),
                  InputError);
  CHECK_THROWS_AS(ReadMetadata(write("noid.csv", "id,caption\n,x\n")), InputError);
  CHECK_THROWS_AS(ReadMetadata(write("flag.csv", "id,available\na,maybe\n")),
                  InputError);
  CHECK_THROWS_AS(ReadMetadata(write("m.txt", "")), InputError);
  CHECK_THROWS_AS(ReadMetadata(write("broken.jsonl", "{\n")), InputError);

  auto ex = ReadExclusions(write("ex.txt", "# header\n\n  a cat \nb\n"));
  CHECK(ex == std::set<std::string>{"a cat", "b"});
}

TEST_CASE("group files and manifest") {
  auto dir = testing::TempDir("ingest_write");
  std::vector<GroupSpec> groups{{"one", {"a", "b"}, GroupSource::kCaptionIdentity},
                                {"two", {"c"}, GroupSource::kWikiartAttrs}};
  WriteGroups(groups, dir / "out");
  auto manifest = nlohmann::json::parse(testing::Slurp(dir / "out/manifest.json"));
  CHECK(manifest["total_images"] == 3);
  CHECK(manifest["groups"][1]["file"] == "group_0002.json");
  CHECK(manifest["groups"][1]["source"] == "wikiart_attrs");
  auto g = nlohmann::json::parse(testing::Slurp(dir / "out/group_0001.json"));
  CHECK(g["member_ids"] == nlohmann::json{"a", "b"});
}

}  // namespace
}  // namespace setdesc
