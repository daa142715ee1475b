// commchar: batch front end for the community characterization pipeline.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "commchar/commchar.hpp"

namespace cc = commchar;

namespace {

// Flags shared by every subcommand that starts from the raw network.
struct InputFlags {
  std::string config;
  std::string schema;
  std::string edges;
  std::string attributes;
  std::string partition;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  void attach(CLI::App* app, bool allow_partition = true) {
    app->add_option("--config", config, "pipeline config file (schema, [pipeline], [output])");
    app->add_option("--schema", schema, "descriptor schema file");
    app->add_option("--edges", edges, "edge CSV (slice,src,dst)");
    app->add_option("--attributes", attributes, "attribute CSV (node,slice,descriptor,value)");
    if (allow_partition) app->add_option("--partition", partition, "use this partition CSV instead of Louvain");
    app->add_option("--seed", seed, "Louvain seed");
    app->add_option("--threads", threads, "worker threads (COMMCHAR_THREADS overrides)");
  }

  cc::PipelineConfig resolve() const {
    cc::PipelineConfig cfg;
    if (!config.empty()) cfg = cc::load_config(config);
    if (!schema.empty()) {
      try {
        cfg.schema = cc::load_schema(schema);
      } catch (const cc::SchemaError& e) {
        throw cc::ConfigError(e.what());
      }
    }
    if (!edges.empty()) cfg.edges_path = edges;
    if (!attributes.empty()) cfg.attributes_path = attributes;
    if (!partition.empty()) cfg.partition_path = partition;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    return cfg;
  }
};

cc::PipelineResult load_and_partition(const cc::PipelineConfig& cfg) {
  cc::PipelineResult r;
  r.network = cc::load_pipeline_network(cfg);
  cc::detect_communities(cfg, r);
  return r;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    cc::text::write_file(path, content);
  }
}

cc::Ratio parse_min_sup(const std::string& s) {
  try {
    return cc::Ratio::parse(s);
  } catch (const cc::InvalidSupport& e) {
    throw cc::ConfigError(std::string("--min-sup: ") + e.what());
  }
}

int fail(std::string_view kind, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characterize communities of a dynamic attributed network by emerging sequential patterns"};
  app.require_subcommand(1);
  int verbosity = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbosity, "more logging (-v info, -vv debug)");
  app.add_flag("-q,--quiet", quiet, "errors only");

  // communities
  InputFlags comm_in;
  std::string comm_out;
  auto* comm = app.add_subcommand("communities", "Louvain partition of the aggregated graph");
  comm_in.attach(comm, false);
  comm->add_option("-o,--out", comm_out, "partition CSV (default stdout)");

  // measures
  InputFlags meas_in;
  std::string meas_out;
  auto* meas = app.add_subcommand("measures", "per-node, per-slice topological measures");
  meas_in.attach(meas);
  meas->add_option("-o,--out", meas_out, "measure CSV (default stdout)");

  // builddb
  InputFlags db_in;
  std::string db_out;
  auto* builddb = app.add_subcommand("builddb", "build the node sequence database");
  db_in.attach(builddb);
  builddb->add_option("-o,--out", db_out, "database TSV (default stdout)");

  // mine
  std::string mine_db;
  std::string mine_sup = "0.3";
  cc::CommunityId mine_comm = 0;
  bool mine_maximal = false;
  std::size_t mine_max_len = 0;
  std::size_t mine_max_patterns = 100000;
  std::string mine_out;
  auto* mine = app.add_subcommand("mine", "closed sequential patterns of one community");
  mine->add_option("--db", mine_db, "database TSV")->required();
  mine->add_option("--community", mine_comm, "community id")->required();
  mine->add_option("--min-sup", mine_sup, "minimum support, decimal or p/q")->capture_default_str();
  mine->add_flag("--maximal", mine_maximal, "keep maximal patterns only");
  mine->add_option("--max-pattern-length", mine_max_len, "cap on pattern length (0: none)");
  mine->add_option("--max-patterns", mine_max_patterns, "abort beyond this many patterns")->capture_default_str();
  mine->add_option("-o,--out", mine_out, "pattern JSONL (default stdout)");

  // characterize
  InputFlags ch_in;
  std::optional<std::string> ch_sup;
  std::optional<std::size_t> ch_min_size, ch_max_uncovered, ch_max_len, ch_max_patterns;
  std::optional<std::string> ch_anchor;
  bool ch_maximal = false;
  bool ch_dry = false;
  std::optional<std::string> ch_report, ch_partition_out, ch_measures_out, ch_patterns_out, ch_db_out;
  auto* ch = app.add_subcommand("characterize", "full pipeline: communities, measures, database, mining, selection");
  ch_in.attach(ch);
  ch->add_option("--min-sup", ch_sup, "minimum support, decimal or p/q (default 0.3)");
  ch->add_option("--min-community-size", ch_min_size, "skip smaller communities (default 10)");
  ch->add_option("--max-uncovered", ch_max_uncovered, "stop selecting at this many uncovered nodes (default 5)");
  ch->add_option("--distance-anchor", ch_anchor, "union | first (default union)");
  ch->add_flag("--maximal", ch_maximal, "mine maximal instead of closed patterns");
  ch->add_option("--max-pattern-length", ch_max_len, "cap on pattern length (0: none)");
  ch->add_option("--max-patterns", ch_max_patterns, "abort beyond this many patterns per community");
  ch->add_option("--report", ch_report, "report JSON path");
  ch->add_option("--partition-out", ch_partition_out, "partition CSV path");
  ch->add_option("--measures-out", ch_measures_out, "measure CSV path");
  ch->add_option("--patterns-out", ch_patterns_out, "pattern JSONL path");
  ch->add_option("--db-out", ch_db_out, "database TSV path");
  ch->add_flag("--dry-run", ch_dry, "validate config and inputs, write nothing");

  // report
  std::string rep_in;
  auto* rep = app.add_subcommand("report", "render a report JSON as text");
  rep->add_option("report", rep_in, "report JSON")->required();

  CLI11_PARSE(app, argc, argv);

  if (quiet) cc::log::set_level(cc::log::Level::error);
  else if (verbosity >= 2) cc::log::set_level(cc::log::Level::debug);
  else if (verbosity == 1) cc::log::set_level(cc::log::Level::info);

  try {
    if (*comm) {
      const auto cfg = comm_in.resolve();
      const auto r = load_and_partition(cfg);
      emit(comm_out, cc::write_partition_csv(r.partition, r.network.labels()));
      std::cerr << "modularity " << r.modularity << " communities " << r.partition.community_count() << "\n";
    } else if (*meas) {
      const auto cfg = meas_in.resolve();
      const auto r = load_and_partition(cfg);
      const auto table = cc::compute_measure_table(r.network, r.partition, cc::resolve_threads(cfg.threads));
      emit(meas_out, cc::write_measures_csv(table, r.network));
    } else if (*builddb) {
      const auto cfg = db_in.resolve();
      const auto r = load_and_partition(cfg);
      const auto threads = cc::resolve_threads(cfg.threads);
      const auto table = cc::compute_measure_table(r.network, r.partition, threads);
      emit(db_out, cc::write_database(cc::build_database(r.network, table, r.partition, threads)));
    } else if (*mine) {
      const auto db = cc::load_database(mine_db);
      cc::MiningOptions opt;
      opt.min_sup = parse_min_sup(mine_sup);
      opt.mode = mine_maximal ? cc::MiningMode::maximal : cc::MiningMode::closed;
      opt.max_length = mine_max_len;
      opt.max_patterns = mine_max_patterns;
      const auto patterns = cc::mine_closed(db, mine_comm, opt);
      cc::log::info("mined", "community", mine_comm, "patterns", patterns.size());
      emit(mine_out, cc::patterns_jsonl(db, patterns));
    } else if (*ch) {
      auto cfg = ch_in.resolve();
      if (ch_sup) cfg.min_sup = parse_min_sup(*ch_sup);
      if (ch_min_size) cfg.min_community_size = *ch_min_size;
      if (ch_max_uncovered) cfg.max_uncovered = *ch_max_uncovered;
      if (ch_anchor) cfg.anchor = cc::parse_anchor(*ch_anchor);
      if (ch_maximal) cfg.mode = cc::MiningMode::maximal;
      if (ch_max_len) cfg.max_pattern_length = *ch_max_len;
      if (ch_max_patterns) cfg.max_patterns = *ch_max_patterns;
      if (ch_report) cfg.report_path = *ch_report;
      if (ch_partition_out) cfg.partition_out = *ch_partition_out;
      if (ch_measures_out) cfg.measures_out = *ch_measures_out;
      if (ch_patterns_out) cfg.patterns_out = *ch_patterns_out;
      if (ch_db_out) cfg.database_out = *ch_db_out;
      const auto result = cc::run_pipeline(cfg, ch_dry);
      if (ch_dry) {
        std::cerr << "dry run: config and inputs are valid\n";
      } else if (cfg.report_path.empty()) {
        std::cout << cc::build_report(cfg, *result).dump(2) << "\n";
      }
    } else if (*rep) {
      std::cout << cc::render_report(nlohmann::ordered_json::parse(cc::text::read_file(rep_in)));
    }
  } catch (const cc::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail("ParseError", e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return 0;
}
