// Writes the bundled planted-community fixture into a directory.
#include <iostream>
#include <string>

#include "commchar/commchar.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  const commchar::PlantedParams params;
  const auto planted = commchar::planted_network(params, 7);
  commchar::text::write_file(dir + "/planted_edges.csv", commchar::write_edges_csv(planted.network));
  commchar::text::write_file(dir + "/planted_attributes.csv", commchar::write_attributes_csv(planted.network));
  commchar::text::write_file(dir + "/planted_schema.toml", commchar::write_schema(planted.network.schema()));

  // ready-to-run config; paths are relative to the config file
  commchar::PipelineConfig cfg;
  cfg.schema = planted.network.schema();
  cfg.edges_path = "planted_edges.csv";
  cfg.attributes_path = "planted_attributes.csv";
  commchar::text::write_file(dir + "/planted.toml", commchar::write_config(cfg));
  return 0;
}
