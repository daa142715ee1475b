#include <gtest/gtest.h>

#include <random>

#include "commchar/commchar.hpp"
#include "support/generators.hpp"

using namespace commchar;

namespace {

DescriptorSchema venue_schema(std::optional<std::size_t> theta = 3) {
  return DescriptorSchema::with_default_measures(
      theta, {Descriptor{0, "icdm", DescriptorKind::attribute, std::nullopt, default_attribute_bins()}});
}

}  // namespace

TEST(Bins, BoundaryValuesFallInTheLowerBin) {
  const Bins b({0.35, 0.5, 0.7});
  EXPECT_EQ(b.size(), 4u);
  EXPECT_EQ(b.index_of(0.0), 0u);
  EXPECT_EQ(b.index_of(0.35), 0u);
  EXPECT_EQ(b.index_of(0.36), 1u);
  EXPECT_EQ(b.index_of(0.5), 1u);
  EXPECT_EQ(b.index_of(0.7), 2u);
  EXPECT_EQ(b.index_of(0.71), 3u);
  EXPECT_EQ(b.label(0), "<=0.35");
  EXPECT_EQ(b.label(1), "0.35-0.5");
  EXPECT_EQ(b.label(3), ">0.7");
}

TEST(Bins, RejectsBadThresholdsAndLabels) {
  EXPECT_THROW(Bins({1, 1}), SchemaError);
  EXPECT_THROW(Bins({2, 1}), SchemaError);
  EXPECT_THROW(Bins({1}, {"a"}), SchemaError);
  EXPECT_THROW(Bins({1}, {"a", "a"}), SchemaError);
  EXPECT_THROW(Bins({1}, {"a,b", "c"}), SchemaError);
  EXPECT_THROW(Bins({std::numeric_limits<double>::infinity()}), SchemaError);
}

TEST(Schema, TopologicalFirstThenAttributesInDeclarationOrder) {
  const auto s = DescriptorSchema(std::nullopt,
                                  {Descriptor{0, "emb", DescriptorKind::topological, Measure::embeddedness, Bins({0.5})},
                                   Descriptor{0, "deg", DescriptorKind::topological, Measure::degree, Bins({3})}},
                                  {Descriptor{0, "zz", DescriptorKind::attribute, std::nullopt, Bins({1})},
                                   Descriptor{0, "aa", DescriptorKind::attribute, std::nullopt, Bins({1})}});
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.at(0).name, "deg");
  EXPECT_EQ(s.at(1).name, "emb");
  EXPECT_EQ(s.at(2).name, "zz");
  EXPECT_EQ(s.at(3).name, "aa");
  for (DescriptorId i = 0; i < s.size(); ++i) EXPECT_EQ(s.at(i).id, i);
}

TEST(Schema, AttributeThresholdsMustBePositive) {
  EXPECT_THROW(DescriptorSchema(std::nullopt, {}, {Descriptor{0, "a", DescriptorKind::attribute, std::nullopt, Bins({0})}}),
               SchemaError);
}

TEST(Schema, DuplicateNamesAndMeasuresRejected) {
  EXPECT_THROW(DescriptorSchema(std::nullopt, {},
                                {Descriptor{0, "a", DescriptorKind::attribute, std::nullopt, Bins({1})},
                                 Descriptor{0, "a", DescriptorKind::attribute, std::nullopt, Bins({1})}}),
               SchemaError);
  EXPECT_THROW(DescriptorSchema(std::nullopt,
                                {Descriptor{0, "d1", DescriptorKind::topological, Measure::degree, Bins({1})},
                                 Descriptor{0, "d2", DescriptorKind::topological, Measure::degree, Bins({1})}},
                                {}),
               SchemaError);
}

TEST(Schema, ParseAndWriteRoundTrip) {
  const auto doc = ConfigDocument::parse(R"(
theta = 4
topological = [degree, z_score]

[descriptor.icdm]
kind = attribute
bins = [1, 3]
labels = ["one", "two-three", "more"]

[descriptor.z_score]
bins = [2.5]
labels = [non-hub, hub]
)",
                                         "<test>");
  const auto s = parse_schema(doc);
  EXPECT_EQ(s.theta(), 4u);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.at(0).measure, Measure::degree);
  EXPECT_EQ(s.at(0).bins, default_measure_bins(Measure::degree));
  EXPECT_EQ(s.at(1).name, "z_score");
  EXPECT_EQ(s.at(1).bins.label(1), "hub");
  EXPECT_EQ(s.at(2).bins.label(0), "one");

  const auto again = parse_schema(ConfigDocument::parse(write_schema(s), "<round>"));
  EXPECT_EQ(again, s);
}

TEST(Schema, AttributePresets) {
  const auto s = parse_schema(ConfigDocument::parse(
      "topological = none\n[descriptor.kdd]\n[descriptor.total]\npreset = total\n[descriptor.icml]\npreset = venue\n", "<t>"));
  EXPECT_EQ(s.at(0).bins, default_attribute_bins());
  EXPECT_EQ(s.at(1).bins.thresholds(), (std::vector<double>{5, 10, 20, 50}));
  EXPECT_EQ(s.at(1).bins.index_of(50), 3u);
  EXPECT_EQ(s.at(1).bins.index_of(51), 4u);
  EXPECT_EQ(s.at(2).bins.label(4), "5+");
  EXPECT_THROW(parse_schema(ConfigDocument::parse("[descriptor.t]\npreset = weekly\n", "<t>")), SchemaError);
  EXPECT_THROW(parse_schema(ConfigDocument::parse("[descriptor.t]\npreset = total\nbins = [1]\n", "<t>")), SchemaError);
  EXPECT_THROW(parse_schema(ConfigDocument::parse("[descriptor.degree]\npreset = total\n", "<t>")), SchemaError);
}

TEST(Schema, EmptyBinsRoundTrip) {
  const auto s = DescriptorSchema(2, {}, {Descriptor{0, "flag", DescriptorKind::attribute, std::nullopt, Bins()}});
  EXPECT_EQ(parse_schema(ConfigDocument::parse(write_schema(s), "<round>")), s);
}

TEST(Schema, ConfigErrors) {
  EXPECT_THROW(ConfigDocument::parse("a = 1\na = 2\n", "<t>"), ConfigError);
  EXPECT_THROW(ConfigDocument::parse("[x]\n[x]\n", "<t>"), ConfigError);
  EXPECT_THROW(parse_schema(ConfigDocument::parse("topological = [nonsense]\n", "<t>")), SchemaError);
  EXPECT_THROW(parse_schema(ConfigDocument::parse("[descriptor.x]\nkind = attribute\nbins = [2, 1]\n", "<t>")),
               SchemaError);
}

TEST(Network, ParsesEdgesAndAttributes) {
  const auto net = parse_network("slice,src,dst\n0,a,b\n0,b,c\n2,a,c\n1,d,\n",
                                 "node,slice,descriptor,value\na,0,icdm,2\nc,2,icdm,7\n", venue_schema());
  EXPECT_EQ(net.node_count(), 4u);
  EXPECT_EQ(net.num_slices(), 3u);
  EXPECT_EQ(net.edges(0).size(), 2u);
  EXPECT_TRUE(net.edges(1).empty());
  EXPECT_EQ(net.edges(2).size(), 1u);
  const auto d = *net.schema().find("icdm");
  EXPECT_EQ(net.attribute(*net.find("a"), 0, d), 2);
  EXPECT_EQ(net.attribute(*net.find("a"), 1, d), 0);
  EXPECT_EQ(net.attribute(*net.find("c"), 2, d), 7);
  EXPECT_THROW(net.edges(3), IndexError);
}

TEST(Network, DuplicateEdgesCollapse) {
  const auto net = parse_network("slice,src,dst\n0,a,b\n0,b,a\n0,a,b\n", "", venue_schema(1));
  EXPECT_EQ(net.edges(0).size(), 1u);
}

TEST(Network, Errors) {
  const auto schema = venue_schema();
  EXPECT_THROW(parse_network("slice,src,dst\n0,a,a\n", "", schema), ConsistencyError);
  EXPECT_THROW(parse_network("slice,src,dst\n3,a,b\n", "", schema), ConsistencyError);
  EXPECT_THROW(parse_network("slice,src,dst\nx,a,b\n", "", schema), ParseError);
  EXPECT_THROW(parse_network("src,dst\n", "", schema), ParseError);
  EXPECT_THROW(parse_network("slice,src,dst\n0,a,b\n", "node,slice,descriptor,value\nz,0,icdm,1\n", schema),
               ConsistencyError);
  EXPECT_THROW(parse_network("slice,src,dst\n0,a,b\n", "node,slice,descriptor,value\na,0,kdd,1\n", schema), SchemaError);
  EXPECT_THROW(parse_network("slice,src,dst\n0,a,b\n", "node,slice,descriptor,value\na,0,degree,1\n", schema),
               SchemaError);
  EXPECT_THROW(parse_network("slice,src,dst\n0,a,b\n", "node,slice,descriptor,value\na,0,icdm,-1\n", schema),
               ConsistencyError);
  EXPECT_THROW(
      parse_network("slice,src,dst\n0,a,b\n", "node,slice,descriptor,value\na,0,icdm,1\na,0,icdm,2\n", schema),
      ConsistencyError);
}

TEST(Network, ThetaInferredWhenAbsent) {
  const auto net = parse_network("slice,src,dst\n0,a,b\n4,a,c\n", "", venue_schema(std::nullopt));
  EXPECT_EQ(net.num_slices(), 5u);
  EXPECT_EQ(net.schema().theta(), 5u);
}

TEST(Network, CsvRoundTripPreservesEverything) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = testgen::random_network(rng, 15, 4, 0.15, 2);
    const auto again = parse_network(write_edges_csv(net), write_attributes_csv(net), net.schema());
    ASSERT_EQ(again.labels(), net.labels());
    ASSERT_EQ(again.num_slices(), net.num_slices());
    for (SliceIndex j = 0; j < net.num_slices(); ++j) {
      ASSERT_EQ(again.edges(j), net.edges(j));
      for (NodeId v = 0; v < net.node_count(); ++v)
        for (const auto d : net.schema().attribute_ids()) ASSERT_EQ(again.attribute(v, j, d), net.attribute(v, j, d));
    }
  }
}

TEST(StaticGraph, NeighborsSortedAndSymmetric) {
  std::mt19937_64 rng(3);
  const auto net = testgen::random_network(rng, 30, 2, 0.2);
  for (SliceIndex j = 0; j < 2; ++j) {
    const auto g = slice_graph(net, j);
    EXPECT_EQ(g.edge_count(), net.edges(j).size());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto nb = g.neighbors(v);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      for (const auto u : nb) EXPECT_TRUE(g.has_edge(u, v));
    }
  }
  EXPECT_THROW(slice_graph(net, 0).neighbors(99), UnknownNode);
}

TEST(Text, CsvFieldsHandleQuotes) {
  EXPECT_EQ(text::csv_fields(R"(a,"b,c","d""e",)"), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
  EXPECT_EQ(text::csv_escape("x,y"), "\"x,y\"");
}
