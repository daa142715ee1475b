#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "commchar/community.hpp"
#include "commchar/config.hpp"
#include "commchar/descriptor.hpp"
#include "commchar/log.hpp"
#include "commchar/measures.hpp"
#include "commchar/mining.hpp"
#include "commchar/network.hpp"
#include "commchar/parallel.hpp"
#include "commchar/selection.hpp"
#include "commchar/seqdb.hpp"
#include "commchar/text.hpp"

namespace commchar {

struct PipelineConfig {
  DescriptorSchema schema = DescriptorSchema::with_default_measures(std::nullopt);

  std::string edges_path;
  std::string attributes_path;
  std::string partition_path;  // optional: use this partition instead of Louvain

  std::uint64_t seed = 1;
  Ratio min_sup{3, 10};
  std::size_t min_community_size = 10;
  std::size_t max_uncovered = 5;
  DistanceAnchor anchor = DistanceAnchor::covered;
  MiningMode mode = MiningMode::closed;
  std::size_t max_pattern_length = 0;
  std::size_t max_patterns = 100000;
  unsigned threads = 0;  // 0: COMMCHAR_THREADS or hardware concurrency

  std::string report_path;
  std::string partition_out;
  std::string measures_out;
  std::string patterns_out;
  std::string database_out;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;

  void validate() const {
    if (!(Ratio(0, 1) < min_sup) || Ratio(1, 1) < min_sup)
      throw ConfigError("min_sup must lie in (0, 1], got " + text::format_number(min_sup.value()));
    if (min_community_size < 1) throw ConfigError("min_community_size must be >= 1");
    if (max_patterns < 1) throw ConfigError("max_patterns must be >= 1");
  }

  MiningOptions mining_options() const {
    MiningOptions m;
    m.min_sup = min_sup;
    m.mode = mode;
    m.max_length = max_pattern_length;
    m.max_patterns = max_patterns;
    m.min_community_size = min_community_size;
    return m;
  }

  CharacterizationOptions characterization_options() const {
    CharacterizationOptions c;
    c.mining = mining_options();
    c.selection.max_uncovered = max_uncovered;
    c.selection.anchor = anchor;
    c.threads = resolve_threads(threads);
    c.keep_patterns = !patterns_out.empty();
    return c;
  }
};

inline std::string_view anchor_name(DistanceAnchor a) { return a == DistanceAnchor::covered ? "union" : "first"; }

inline DistanceAnchor parse_anchor(std::string_view s) {
  if (s == "union") return DistanceAnchor::covered;
  if (s == "first") return DistanceAnchor::first;
  throw ConfigError("distance anchor must be 'union' or 'first', got '" + std::string(s) + "'");
}

inline std::string_view mode_name(MiningMode m) { return m == MiningMode::closed ? "closed" : "maximal"; }

inline MiningMode parse_mode(std::string_view s) {
  if (s == "closed") return MiningMode::closed;
  if (s == "maximal") return MiningMode::maximal;
  throw ConfigError("mode must be 'closed' or 'maximal', got '" + std::string(s) + "'");
}

namespace detail {

inline std::uint64_t config_uint(const ConfigDocument::Entry& e) {
  const auto v = text::to_int(e.value);
  if (!v || *v < 0) throw ConfigError("line " + std::to_string(e.line) + ": '" + e.key + "' must be a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

}  // namespace detail

// Descriptor schema plus the optional [pipeline] and [output] sections.
inline PipelineConfig parse_config(const ConfigDocument& doc) {
  PipelineConfig cfg;
  try {
    cfg.schema = parse_schema(doc);
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& e : doc.top().entries) {
    if (e.key != "theta" && e.key != "topological")
      throw ConfigError("line " + std::to_string(e.line) + ": unknown top-level key '" + e.key + "'");
  }
  for (const auto& section : doc.sections()) {
    if (section.name.empty() || section.name.starts_with("descriptor.")) continue;
    if (section.name != "pipeline" && section.name != "output")
      throw ConfigError("unknown section [" + section.name + "]");
  }
  if (const auto* s = doc.find_section("pipeline")) {
    for (const auto& e : s->entries) {
      try {
        if (e.key == "edges") cfg.edges_path = e.value;
        else if (e.key == "attributes") cfg.attributes_path = e.value;
        else if (e.key == "partition") cfg.partition_path = e.value;
        else if (e.key == "seed") cfg.seed = detail::config_uint(e);
        else if (e.key == "min_sup") cfg.min_sup = Ratio::parse(e.value);
        else if (e.key == "min_community_size") cfg.min_community_size = detail::config_uint(e);
        else if (e.key == "max_uncovered") cfg.max_uncovered = detail::config_uint(e);
        else if (e.key == "distance_anchor") cfg.anchor = parse_anchor(e.value);
        else if (e.key == "mode") cfg.mode = parse_mode(e.value);
        else if (e.key == "max_pattern_length") cfg.max_pattern_length = detail::config_uint(e);
        else if (e.key == "max_patterns") cfg.max_patterns = detail::config_uint(e);
        else if (e.key == "threads") cfg.threads = static_cast<unsigned>(detail::config_uint(e));
        else throw ConfigError("unknown [pipeline] key '" + e.key + "'");
      } catch (const InvalidSupport& err) {
        throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
      }
    }
  }
  if (const auto* s = doc.find_section("output")) {
    for (const auto& e : s->entries) {
      if (e.key == "report") cfg.report_path = e.value;
      else if (e.key == "partition") cfg.partition_out = e.value;
      else if (e.key == "measures") cfg.measures_out = e.value;
      else if (e.key == "patterns") cfg.patterns_out = e.value;
      else if (e.key == "database") cfg.database_out = e.value;
      else throw ConfigError("unknown [output] key '" + e.key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

// Relative paths inside a config file are taken from the file's directory.
inline PipelineConfig load_config(const std::string& path) {
  auto cfg = parse_config(ConfigDocument::parse(text::read_file(path), path));
  const auto base = std::filesystem::path(path).parent_path();
  for (auto* p : {&cfg.edges_path, &cfg.attributes_path, &cfg.partition_path, &cfg.report_path, &cfg.partition_out,
                  &cfg.measures_out, &cfg.patterns_out, &cfg.database_out}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return cfg;
}

inline std::string write_config(const PipelineConfig& cfg) {
  std::string out = write_schema(cfg.schema);
  const auto q = [](const std::string& s) { return ConfigDocument::quote(s); };
  out += "\n[pipeline]\n";
  if (!cfg.edges_path.empty()) out += "edges = " + q(cfg.edges_path) + "\n";
  if (!cfg.attributes_path.empty()) out += "attributes = " + q(cfg.attributes_path) + "\n";
  if (!cfg.partition_path.empty()) out += "partition = " + q(cfg.partition_path) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "min_sup = " + cfg.min_sup.str() + "\n";
  out += "min_community_size = " + std::to_string(cfg.min_community_size) + "\n";
  out += "max_uncovered = " + std::to_string(cfg.max_uncovered) + "\n";
  out += "distance_anchor = " + std::string(anchor_name(cfg.anchor)) + "\n";
  out += "mode = " + std::string(mode_name(cfg.mode)) + "\n";
  out += "max_pattern_length = " + std::to_string(cfg.max_pattern_length) + "\n";
  out += "max_patterns = " + std::to_string(cfg.max_patterns) + "\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  out += "\n[output]\n";
  if (!cfg.report_path.empty()) out += "report = " + q(cfg.report_path) + "\n";
  if (!cfg.partition_out.empty()) out += "partition = " + q(cfg.partition_out) + "\n";
  if (!cfg.measures_out.empty()) out += "measures = " + q(cfg.measures_out) + "\n";
  if (!cfg.patterns_out.empty()) out += "patterns = " + q(cfg.patterns_out) + "\n";
  if (!cfg.database_out.empty()) out += "database = " + q(cfg.database_out) + "\n";
  return out;
}

using Json = nlohmann::ordered_json;

inline Json growth_json(double g) { return std::isinf(g) ? Json("inf") : Json(g); }

inline Json sequence_json(const DescriptorSchema& schema, std::span<const Itemset> seq) {
  Json out = Json::array();
  for (const auto& element : seq) {
    Json items = Json::array();
    for (const auto& item : element) items.push_back(format_item(schema, item));
    out.push_back(std::move(items));
  }
  return out;
}

inline Json labels_json(const SequenceDatabase& db, std::span<const NodeId> nodes) {
  Json out = Json::array();
  for (const auto v : nodes) out.push_back(db.label(v));
  return out;
}

// One JSON-lines record: {community, sequence, support, growth_rate, supporters}.
inline Json pattern_record(const SequenceDatabase& db, const Pattern& p) {
  Json j;
  j["community"] = p.community;
  j["sequence"] = sequence_json(db.schema(), p.sequence);
  j["support"] = p.support.value();
  j["growth_rate"] = growth_json(p.growth_rate);
  j["supporters"] = labels_json(db, p.supporting_nodes);
  return j;
}

inline std::string patterns_jsonl(const SequenceDatabase& db, std::span<const Pattern> patterns) {
  std::string out;
  for (const auto& p : patterns) out += pattern_record(db, p).dump() + "\n";
  return out;
}

inline Json pattern_summary(const SequenceDatabase& db, const Pattern& p) {
  Json j;
  j["sequence"] = sequence_json(db.schema(), p.sequence);
  j["text"] = "<" + format_sequence(db.schema(), p.sequence) + ">";
  j["length"] = p.sequence.size();
  j["support"] = p.support.value();
  j["support_count"] = p.supporting_nodes.size();
  j["growth_rate"] = growth_json(p.growth_rate);
  return j;
}

inline Json characterization_json(const SequenceDatabase& db, const CommunityCharacterization& c) {
  Json j;
  j["community"] = c.community;
  j["size"] = c.community_size;
  j["pattern_count"] = c.pattern_count;
  j["top_support"] = c.top_support ? pattern_summary(db, *c.top_support) : Json(nullptr);
  Json selected = Json::array();
  for (std::size_t i = 0; i < c.selected.size(); ++i) {
    auto p = pattern_summary(db, c.selected[i]);
    p["supporters"] = labels_json(db, c.selected[i].supporting_nodes);
    selected.push_back(std::move(p));
  }
  j["selected"] = std::move(selected);
  Json trace = Json::array();
  for (const auto& step : c.trace) {
    Json t;
    t["pattern"] = step.pattern_index;
    t["distance"] = step.distance ? Json(*step.distance) : Json(nullptr);
    t["newly_covered"] = step.newly_covered;
    t["uncovered_after"] = step.uncovered_after;
    trace.push_back(std::move(t));
  }
  j["trace"] = std::move(trace);
  j["covered"] = c.covered.size();
  j["deviants"] = labels_json(db, c.deviants);
  return j;
}

struct PipelineResult {
  DynamicAttributedNetwork network;
  WeightedGraph aggregated;
  CommunityStructure partition;
  double modularity = 0;
  MeasureTable measures;
  SequenceDatabase database;
  std::vector<CommunityCharacterization> characterizations;
};

inline Json config_json(const PipelineConfig& cfg) {
  Json j;
  j["theta"] = cfg.schema.theta() ? Json(*cfg.schema.theta()) : Json(nullptr);
  Json descriptors = Json::array();
  for (const auto& d : cfg.schema.descriptors()) {
    Json dj;
    dj["name"] = d.name;
    dj["kind"] = kind_name(d.kind);
    if (d.measure) dj["measure"] = measure_name(*d.measure);
    dj["thresholds"] = d.bins.thresholds();
    dj["labels"] = d.bins.labels();
    descriptors.push_back(std::move(dj));
  }
  j["descriptors"] = std::move(descriptors);
  j["seed"] = cfg.seed;
  j["min_sup"] = cfg.min_sup.value();
  j["min_community_size"] = cfg.min_community_size;
  j["max_uncovered"] = cfg.max_uncovered;
  j["distance_anchor"] = anchor_name(cfg.anchor);
  j["mode"] = mode_name(cfg.mode);
  j["max_pattern_length"] = cfg.max_pattern_length;
  j["max_patterns"] = cfg.max_patterns;
  return j;
}

inline Json build_report(const PipelineConfig& cfg, const PipelineResult& r) {
  Json j;
  j["config"] = config_json(cfg);
  Json net;
  net["nodes"] = r.network.node_count();
  net["slices"] = r.network.num_slices();
  net["descriptors"] = r.network.schema().size();
  net["aggregated_edges"] = [&] {
    std::size_t e = 0;
    for (NodeId v = 0; v < r.aggregated.node_count(); ++v) e += r.aggregated.links(v).size();
    return e / 2;
  }();
  j["network"] = std::move(net);
  Json comm;
  std::size_t singletons = 0;
  std::size_t largest = 0;
  std::size_t eligible = 0;
  for (const auto id : r.partition.ids()) {
    const auto size = r.partition.members(id).size();
    singletons += size == 1;
    largest = std::max(largest, size);
    eligible += size >= cfg.min_community_size;
  }
  comm["count"] = r.partition.community_count();
  comm["modularity"] = r.modularity;
  comm["singletons"] = singletons;
  comm["largest"] = largest;
  comm["characterized"] = eligible;
  j["communities"] = std::move(comm);
  Json chars = Json::array();
  for (const auto& c : r.characterizations) chars.push_back(characterization_json(r.database, c));
  j["characterizations"] = std::move(chars);
  return j;
}

// Stage 1: network and reference partition.
inline void detect_communities(const PipelineConfig& cfg, PipelineResult& r) {
  r.aggregated = aggregate(r.network);
  if (!cfg.partition_path.empty()) {
    r.partition = read_partition_csv(text::read_file(cfg.partition_path), r.network, cfg.partition_path);
  } else {
    r.partition = louvain(r.aggregated, cfg.seed);
  }
  r.modularity = modularity(r.aggregated, r.partition);
  log::info("communities", "count", r.partition.community_count(), "modularity", r.modularity);
}

inline DynamicAttributedNetwork load_pipeline_network(const PipelineConfig& cfg) {
  if (cfg.edges_path.empty()) throw ConfigError("no edge file given");
  return load_network(cfg.edges_path, cfg.attributes_path, cfg.schema);
}

// Full run: load, partition, measures, database, mining and selection.
// With `dry_run` the inputs are loaded and validated and nothing is
// computed or written.
inline std::optional<PipelineResult> run_pipeline(const PipelineConfig& cfg, bool dry_run = false) {
  cfg.validate();
  PipelineResult r;
  r.network = load_pipeline_network(cfg);
  log::info("network_loaded", "nodes", r.network.node_count(), "slices", r.network.num_slices(), "descriptors",
            r.network.schema().size());
  if (dry_run) {
    if (!cfg.partition_path.empty())
      read_partition_csv(text::read_file(cfg.partition_path), r.network, cfg.partition_path);
    return std::nullopt;
  }
  const auto threads = resolve_threads(cfg.threads);
  detect_communities(cfg, r);
  r.measures = compute_measure_table(r.network, r.partition, threads);
  r.database = build_database(r.network, r.measures, r.partition, threads);
  r.characterizations = characterize_all(r.database, cfg.characterization_options());

  if (!cfg.partition_out.empty()) text::write_file(cfg.partition_out, write_partition_csv(r.partition, r.network.labels()));
  if (!cfg.measures_out.empty()) text::write_file(cfg.measures_out, write_measures_csv(r.measures, r.network));
  if (!cfg.database_out.empty()) text::write_file(cfg.database_out, write_database(r.database));
  if (!cfg.patterns_out.empty()) {
    std::string lines;
    for (const auto& c : r.characterizations) lines += patterns_jsonl(r.database, c.mined);
    text::write_file(cfg.patterns_out, lines);
  }
  if (!cfg.report_path.empty()) text::write_file(cfg.report_path, build_report(cfg, r).dump(2) + "\n");
  return r;
}

// Human-readable summary of a report: one row per characterized community
// with its most supported pattern, then the top-growth pattern and deviants.
inline std::string render_report(const Json& report) {
  std::ostringstream out;
  const auto& comm = report.at("communities");
  out << "communities: " << comm.at("count").get<std::size_t>() << "  modularity: " << comm.at("modularity").get<double>()
      << "  singletons: " << comm.at("singletons").get<std::size_t>() << "  largest: " << comm.at("largest").get<std::size_t>()
      << "\n\n";
  const auto growth_text = [](const Json& g) {
    return g.is_string() ? g.get<std::string>() : text::format_number(std::round(g.get<double>() * 100) / 100);
  };
  out << "community\tsize\tlength\tsupport\n";
  for (const auto& c : report.at("characterizations")) {
    out << c.at("community").get<CommunityId>() << "\t" << c.at("size").get<std::size_t>() << "\t";
    if (c.at("top_support").is_null()) {
      out << "-\t-\n";
      continue;
    }
    const auto& t = c.at("top_support");
    out << t.at("length").get<std::size_t>() << "\t" << text::format_number(std::round(t.at("support").get<double>() * 100) / 100)
        << "\n";
  }
  for (const auto& c : report.at("characterizations")) {
    out << "\ncommunity " << c.at("community").get<CommunityId>() << " (" << c.at("size").get<std::size_t>() << " nodes, "
        << c.at("pattern_count").get<std::size_t>() << " patterns)\n";
    const auto& selected = c.at("selected");
    for (std::size_t i = 0; i < selected.size(); ++i) {
      const auto& p = selected[i];
      out << (i == 0 ? "  most emergent: " : "  additional:    ") << p.at("text").get<std::string>()
          << "  growth " << growth_text(p.at("growth_rate"))
          << "  support " << text::format_number(std::round(p.at("support").get<double>() * 100) / 100) << "\n";
    }
    out << "  deviants:";
    if (c.at("deviants").empty()) out << " none";
    const char* sep = " ";
    for (const auto& d : c.at("deviants")) {
      out << sep << d.get<std::string>();
      sep = ", ";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace commchar
