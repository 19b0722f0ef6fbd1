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

// Command-line front end: embed image sets, describe them, and run the
// evaluation and dataset tools.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "setdesc/concept_graph.h"
#include "setdesc/embedding.h"
#include "setdesc/engine.h"
#include "setdesc/errors.h"
#include "setdesc/evaluation.h"
#include "setdesc/ingest.h"
#include "setdesc/lexicon.h"
#include "setdesc/oracle.h"
#include "setdesc/verifier.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  bool json = false;
  std::string out = ".";
  std::string oracle = "http";
  std::string embed = "http";
  std::string model;
  bool verbose = false;
};

std::string ReadText(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw setdesc::InputError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path OutPath(const Globals &g, const std::string &name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw setdesc::InputError("cannot write " + path.string());
  out << text;
}

// Prints `j` as JSON, or `text` for humans.
void Emit(const Globals &g, const json &j, const std::string &text) {
  if (g.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << text << '\n';
  }
}

setdesc::EngineConfig LoadConfig(const Globals &g) {
  setdesc::EngineConfig cfg;
  if (!g.config.empty()) cfg = setdesc::EngineConfig::Load(g.config);
  if (g.seed) cfg.seed = *g.seed;
  cfg.Validate();
  return cfg;
}

std::unique_ptr<setdesc::Oracle> MakeOracle(const Globals &g) {
  setdesc::HttpOracleConfig http;
  if (const char *url = std::getenv("SETDESC_BASE_URL"); url && *url) {
    http.base_url = url;
  }
  if (!g.model.empty()) http.model = g.model;
  return setdesc::MakeOracle(g.oracle, http);
}

// A directory lists its image files in name order; any other file is read
// as one image reference per line.
std::vector<std::string> ListImages(const fs::path &source) {
  std::vector<std::string> refs;
  if (fs::is_directory(source)) {
    static const std::vector<std::string> kExt = {".jpg", ".jpeg", ".png",
                                                  ".webp", ".gif", ".bmp"};
    for (const auto &entry : fs::directory_iterator(source)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      for (char &c : ext) c = static_cast<char>(std::tolower(c));
      if (std::find(kExt.begin(), kExt.end(), ext) != kExt.end()) {
        refs.push_back(entry.path().string());
      }
    }
    std::sort(refs.begin(), refs.end());
  } else {
    std::istringstream in(ReadText(source));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') refs.push_back(line);
    }
  }
  if (refs.empty()) {
    throw setdesc::InputError("no images in " + source.string());
  }
  return refs;
}

// A graph JSON written by describe, or a network-text render.
std::string LoadRender(const fs::path &path) {
  std::string text = ReadText(path);
  if (path.extension() == ".json") {
    try {
      return setdesc::ConceptGraph::FromJson(json::parse(text)).Render();
    } catch (const json::exception &e) {
      throw setdesc::InputError("bad graph file " + path.string() + ": " +
                                e.what());
    }
  }
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  setdesc::ParseNetworkText(text);  // validates
  return text;
}

json StatsJson(const setdesc::GraphStats &s) {
  return {{"num_nodes", s.num_nodes}, {"depth", s.depth}};
}

int ExitCodeFor(const std::exception &e) {
  if (const auto *err = dynamic_cast<const setdesc::Error *>(&e)) {
    switch (err->kind()) {
      case setdesc::ErrorKind::kUser: return 1;
      case setdesc::ErrorKind::kExternal: return 2;
      case setdesc::ErrorKind::kInternal: return 3;
    }
  }
  if (dynamic_cast<const std::bad_alloc *>(&e)) return 3;
  if (dynamic_cast<const fs::filesystem_error *>(&e)) return 1;
  // Malformed JSON in a user-supplied file.
  if (dynamic_cast<const json::exception *>(&e)) return 1;
  return 3;
}

}  // namespace

int main(int argc, char **argv) {
  Globals g;
  CLI::App app{"Describe large image sets with verified concept graphs."};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Random seed (overrides the config)");
  app.add_option("--config", g.config, "Engine config JSON");
  app.add_flag("--json", g.json, "Machine-readable output and errors");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--oracle", g.oracle,
                 "Oracle: http or scripted:<fixture.json>")
      ->capture_default_str();
  app.add_option("--embed", g.embed,
                 "Embeddings: http, <url>, hash:<dim> or table:<file>")
      ->capture_default_str();
  app.add_option("--model", g.model, "Chat model name for the http oracle");
  app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");

  std::function<void()> action;

  // embed-set
  std::string images, store_name = "store.setdesc";
  std::size_t batch = 64;
  auto *embed_cmd = app.add_subcommand("embed-set", "Embed an image set");
  embed_cmd->add_option("--images", images, "Image directory or list file")
      ->required();
  embed_cmd->add_option("--name", store_name, "Store file name in --out")
      ->capture_default_str();
  embed_cmd->add_option("--batch", batch, "Images per request")
      ->capture_default_str()
      ->check(CLI::Range(1, 256));
  embed_cmd->callback([&] {
    action = [&] {
      auto provider = setdesc::MakeEmbeddingProvider(g.embed);
      auto refs = ListImages(images);
      auto store = setdesc::EmbeddingStore::Build(refs, *provider, batch);
      fs::path path = OutPath(g, store_name);
      store.Save(path);
      std::ostringstream crc;
      crc << std::hex << store.checksum();
      Emit(g,
           {{"store", path.string()},
            {"count", store.size()},
            {"dim", store.dim()},
            {"checksum", crc.str()}},
           "wrote " + std::to_string(store.size()) + " x " +
               std::to_string(store.dim()) + " embeddings to " +
               path.string());
    };
  });

  // describe
  std::string store_path, lexicon_path, ids_path, resume_path;
  auto *describe_cmd = app.add_subcommand("describe", "Describe an image set");
  describe_cmd->add_option("--store", store_path, "Embedding store")
      ->required();
  describe_cmd->add_option("--lexicon", lexicon_path, "Lexicon JSONL")
      ->required();
  describe_cmd->add_option("--ids", ids_path,
                           "Image ids to describe (default: whole store)");
  describe_cmd->add_option("--resume", resume_path,
                           "Continue this trace instead of starting over");
  describe_cmd->callback([&] {
    action = [&] {
      auto store = setdesc::EmbeddingStore::Load(store_path);
      auto lex = setdesc::Lexicon::Load(lexicon_path);
      auto oracle = MakeOracle(g);
      auto provider = setdesc::MakeEmbeddingProvider(g.embed);
      std::vector<std::string> ids =
          ids_path.empty() ? store.ids() : ListImages(ids_path);
      setdesc::EngineInputs in{ids, store, *oracle, lex, *provider};
      setdesc::RunResult result;
      fs::path trace;
      if (!resume_path.empty()) {
        trace = resume_path;
        result = setdesc::Resume(trace, in);
      } else {
        trace = OutPath(g, "trace.jsonl");
        result = setdesc::Describe(in, LoadConfig(g), trace);
      }
      WriteText(OutPath(g, "description.txt"), result.description + "\n");
      WriteText(OutPath(g, "graph.json"), result.graph.ToJson().dump(2) + "\n");
      WriteText(OutPath(g, "render.txt"), result.graph.Render() + "\n");
      Emit(g,
           {{"description", result.description},
            {"iterations", result.iterations},
            {"stop_reason", setdesc::StopReasonName(result.stop_reason)},
            {"stats", StatsJson(result.graph.Stats())},
            {"trace", trace.string()}},
           result.description);
    };
  });

  // captionize
  std::string description_path, description_text;
  auto *caption_cmd =
      app.add_subcommand("captionize", "Shorten a description to a caption");
  auto *desc_opt = caption_cmd->add_option("--description", description_path,
                                           "Description file");
  caption_cmd->add_option("--text", description_text, "Description text")
      ->excludes(desc_opt);
  caption_cmd->callback([&] {
    action = [&] {
      std::string text = description_path.empty()
                             ? description_text
                             : ReadText(description_path);
      auto oracle = MakeOracle(g);
      std::string caption = oracle->Captionize(text);
      WriteText(OutPath(g, "caption.txt"), caption + "\n");
      Emit(g, {{"caption", caption}}, caption);
    };
  });

  // diff
  std::string graph_a, graph_b, store_a, store_b, ground_truth, pair_id;
  auto *diff_cmd =
      app.add_subcommand("diff", "Rank differences between two image sets");
  diff_cmd->add_option("--graph-a", graph_a, "Graph JSON or render of set A")
      ->required();
  diff_cmd->add_option("--graph-b", graph_b, "Graph JSON or render of set B")
      ->required();
  diff_cmd->add_option("--store-a", store_a, "Embedding store of set A")
      ->required();
  diff_cmd->add_option("--store-b", store_b, "Embedding store of set B")
      ->required();
  diff_cmd->add_option("--ground-truth", ground_truth,
                       "Reference difference, enables acc@1 and acc@5");
  diff_cmd->add_option("--pair-id", pair_id, "Identifier for the report");
  diff_cmd->callback([&] {
    action = [&] {
      auto oracle = MakeOracle(g);
      auto provider = setdesc::MakeEmbeddingProvider(g.embed);
      auto a = setdesc::EmbeddingStore::Load(store_a);
      auto b = setdesc::EmbeddingStore::Load(store_b);
      setdesc::EvaluationReport report;
      report.pair_id = pair_id;
      auto proposals =
          setdesc::Propose(LoadRender(graph_a), LoadRender(graph_b), *oracle);
      report.ranked = setdesc::Rank(std::move(proposals), a, b, *provider,
                                    LoadConfig(g).text_template);
      json j = report.ToJson();
      if (!ground_truth.empty()) {
        report.acc1 = setdesc::AccAtK(report.ranked, ground_truth, 1, *oracle);
        report.acc5 = setdesc::AccAtK(report.ranked, ground_truth, 5, *oracle);
        j = report.ToJson();
      } else {
        j["acc1"] = nullptr;
        j["acc5"] = nullptr;
      }
      WriteText(OutPath(g, "diff_report.json"), j.dump(2) + "\n");
      std::string text;
      for (const auto &p : report.ranked.proposals) {
        std::ostringstream line;
        line << p.score << "\t" << p.text << "\n";
        text += line.str();
      }
      if (!text.empty()) text.pop_back();
      Emit(g, j, text);
    };
  });

  // graph-stats
  std::string stats_trace, stats_graph;
  auto *stats_cmd =
      app.add_subcommand("graph-stats", "Node count and depth of a graph");
  auto *trace_opt =
      stats_cmd->add_option("--trace", stats_trace, "Trace JSONL");
  stats_cmd->add_option("--graph", stats_graph, "Graph JSON or render")
      ->excludes(trace_opt);
  stats_cmd->callback([&] {
    action = [&] {
      setdesc::ConceptGraph graph;
      if (!stats_trace.empty()) {
        std::istringstream in(ReadText(stats_trace));
        std::optional<json> result;
        std::vector<setdesc::Triplet> committed;
        for (std::string line; std::getline(in, line);) {
          if (line.empty()) continue;
          json j = json::parse(line);
          if (j.value("type", "") == "result") result = j;
          if (j.value("type", "") == "iteration" && !j["triplet"].is_null()) {
            committed.push_back({j["triplet"][0], j["triplet"][1],
                                 j["triplet"][2]});
          }
        }
        if (result) {
          graph = setdesc::ConceptGraph::FromJson(result->at("graph"));
        } else {
          for (const auto &t : committed) graph.Commit(t, {});
        }
      } else if (!stats_graph.empty()) {
        auto edges = setdesc::ParseNetworkText(LoadRender(stats_graph));
        for (const auto &t : edges) graph.Commit(t, {});
      } else {
        throw setdesc::InputError("graph-stats needs --trace or --graph");
      }
      auto s = graph.Stats();
      Emit(g, StatsJson(s),
           "nodes: " + std::to_string(s.num_nodes) +
               "\ndepth: " + std::to_string(s.depth));
    };
  });

  // lexicon-audit
  std::string audit_lexicon;
  auto *audit_cmd = app.add_subcommand(
      "lexicon-audit", "Count nodes whose hyponym branches reconverge");
  audit_cmd->add_option("--lexicon", audit_lexicon, "Lexicon JSONL")
      ->required();
  audit_cmd->callback([&] {
    action = [&] {
      auto lex = setdesc::Lexicon::Load(audit_lexicon);
      auto r = lex.IntersectionAudit();
      json j = {{"synsets", lex.size()},
                {"intersection_leaves", r.intersection_leaves},
                {"intersection_roots", r.intersection_roots},
                {"non_leaf", r.non_leaf},
                {"ratio", r.ratio},
                {"roots", r.roots}};
      std::ostringstream text;
      text << "intersection roots: " << r.intersection_roots << " of "
           << r.non_leaf << " non-leaf synsets (" << r.ratio * 100 << "%)";
      Emit(g, j, text.str());
    };
  });

  // estimate-cost
  double n = 0, c = 0, d = 0, flops = 0, rate = 12.0;
  auto *cost_cmd = app.add_subcommand(
      "estimate-cost", "Embedding and kNN time for one verification");
  cost_cmd->add_option("--n", n, "Images")->required();
  cost_cmd->add_option("--c", c, "Label terms")->required();
  cost_cmd->add_option("--d", d, "Embedding dimension")->required();
  cost_cmd->add_option("--flops", flops, "Device FLOP/s")->required();
  cost_cmd->add_option("--rate", rate, "Images embedded per second")
      ->capture_default_str();
  cost_cmd->callback([&] {
    action = [&] {
      auto e = setdesc::EstimateCost(n, c, d, flops, rate);
      std::ostringstream text;
      text.precision(4);
      text << std::fixed << "embed_seconds: " << e.embed_seconds
           << "\nknn_seconds: " << e.knn_seconds;
      Emit(g, {{"embed_seconds", e.embed_seconds},
               {"knn_seconds", e.knn_seconds}},
           text.str());
    };
  });

  // ingest-groups
  std::string metadata, mode = "caption", exclude;
  auto *ingest_cmd =
      app.add_subcommand("ingest-groups", "Build image groups from metadata");
  ingest_cmd->add_option("--metadata", metadata, "CSV or JSONL metadata")
      ->required();
  ingest_cmd->add_option("--mode", mode, "caption or wikiart")
      ->check(CLI::IsMember({"caption", "wikiart"}))
      ->capture_default_str();
  ingest_cmd->add_option("--exclude", exclude,
                         "Captions to drop, one per line");
  ingest_cmd->callback([&] {
    action = [&] {
      auto records = setdesc::ReadMetadata(metadata);
      std::set<std::string> excluded;
      if (!exclude.empty()) excluded = setdesc::ReadExclusions(exclude);
      auto groups = mode == "caption"
                        ? setdesc::GroupByCaption(records, excluded)
                        : setdesc::GroupWikiart(records, excluded);
      fs::create_directories(g.out);
      setdesc::WriteGroups(groups, g.out);
      std::size_t total = 0;
      for (const auto &grp : groups) total += grp.member_ids.size();
      Emit(g, {{"groups", groups.size()}, {"images", total}},
           std::to_string(groups.size()) + " groups, " +
               std::to_string(total) + " images");
    };
  });

  auto fail = [&](int code, const std::string &kind, const std::string &msg) {
    if (g.json) {
      std::cerr << json{{"error", kind}, {"message", msg}, {"exit_code", code}}
                       .dump()
                << '\n';
    } else {
      std::cerr << "error: " << msg << '\n';
    }
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    int code = fail(1, "usage", e.what());
    if (!g.json) std::cerr << app.help();
    return code;
  }

  auto logger = spdlog::stderr_color_mt("setdesc");
  spdlog::set_default_logger(logger);
  spdlog::set_level(g.verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    action();
  } catch (const std::exception &e) {
    int code = ExitCodeFor(e);
    static const char *kKinds[] = {"ok", "user", "external", "internal"};
    return fail(code, kKinds[code], e.what());
  }
  return 0;
}
