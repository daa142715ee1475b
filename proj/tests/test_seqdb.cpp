#include <gtest/gtest.h>

#include <random>

#include "commchar/commchar.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace commchar;
using testgen::embeds_exhaustive;

namespace {

constexpr Item a{0, 0}, b{1, 0}, c{2, 0};

Sequence random_sequence(std::mt19937_64& rng, std::size_t max_len, std::size_t descriptors) {
  Sequence s;
  const auto len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Item> items;
    for (DescriptorId d = 0; d < descriptors; ++d)
      if (std::bernoulli_distribution(0.5)(rng)) items.push_back(Item{d, static_cast<std::uint32_t>(rng() % 2)});
    if (items.empty()) items.push_back(Item{0, 0});
    s.emplace_back(std::move(items));
  }
  return s;
}

}  // namespace

TEST(Itemset, CanonicalFormAndOneItemPerDescriptor) {
  const Itemset s{Item{2, 1}, Item{0, 3}, Item{2, 1}};
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (Item{0, 3}));
  EXPECT_THROW((Itemset{Item{1, 0}, Item{1, 1}}), ConsistencyError);
}

TEST(Subsequence, Examples) {
  EXPECT_TRUE(is_subsequence(Sequence{{a}}, Sequence{{a, b}, {c}}));
  EXPECT_FALSE(is_subsequence(Sequence{{a}, {a}}, Sequence{{a}}));
  EXPECT_TRUE(is_subsequence(Sequence{{a}, {c}}, Sequence{{c}, {a}, {c}}));
  EXPECT_FALSE(is_subsequence(Sequence{{a}, {c}}, Sequence{{c}, {c}, {a}}));
  EXPECT_FALSE(is_subsequence(Sequence{{a, b}}, Sequence{{a}, {b}}));
  EXPECT_TRUE(is_subsequence(Sequence{}, Sequence{}));
}

TEST(Subsequence, GreedyMatchesExhaustiveOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto alpha = random_sequence(rng, 3, 3);
    const auto beta = random_sequence(rng, 5, 3);
    ASSERT_EQ(is_subsequence(alpha, beta), embeds_exhaustive(alpha, beta));
  }
}

TEST(Subsequence, PartialOrder) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto x = random_sequence(rng, 3, 2);
    const auto y = random_sequence(rng, 4, 2);
    const auto z = random_sequence(rng, 5, 2);
    ASSERT_TRUE(is_subsequence(x, x));
    if (is_subsequence(x, y) && is_subsequence(y, z)) {
      ASSERT_TRUE(is_subsequence(x, z));
    }
    if (is_subsequence(x, y) && is_subsequence(y, x)) {
      ASSERT_EQ(x, y);
    }
  }
}

TEST(Subsequence, SupportIsAntiMonotone) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const auto db = testgen::random_database(rng);
    const auto members = db.communities().members(0);
    const auto beta = random_sequence(rng, 3, 2);
    for (std::size_t drop = 0; drop < beta.size(); ++drop) {
      auto alpha = beta;
      alpha.erase(alpha.begin() + static_cast<std::ptrdiff_t>(drop));
      const auto sb = supporters(beta, members, db);
      const auto sa = supporters(alpha, members, db);
      ASSERT_TRUE(std::includes(sa.begin(), sa.end(), sb.begin(), sb.end()));
    }
  }
}

TEST(BuildDatabase, ItemsetsUnionMeasuresAndNonzeroAttributes) {
  const auto schema = DescriptorSchema(
      3, {Descriptor{0, "degree", DescriptorKind::topological, Measure::degree, Bins({1})}},
      {Descriptor{0, "kdd", DescriptorKind::attribute, std::nullopt, default_attribute_bins()}});
  // a: active in slices 0 and 2; b: only in 0; c: never connected but publishes in 1
  const auto net = parse_network("slice,src,dst\n0,a,b\n2,a,d\n0,c,\n",
                                 "node,slice,descriptor,value\na,0,kdd,2\nc,1,kdd,7\nb,1,kdd,0\n", schema);
  const CommunityStructure cs({0, 0, 1, 1});
  const auto db = build_database(net, compute_measure_table(net, cs), cs);
  const auto& ea = db.entry(*net.find("a")).sequence;
  ASSERT_EQ(ea.size(), 2u);
  EXPECT_EQ(ea.slices, (std::vector<SliceIndex>{0, 2}));
  EXPECT_EQ(ea.elements[0], (Itemset{Item{0, 0}, Item{1, 1}}));
  EXPECT_EQ(ea.elements[1], (Itemset{Item{0, 0}}));
  const auto& ec = db.entry(*net.find("c")).sequence;
  ASSERT_EQ(ec.size(), 1u);
  EXPECT_EQ(ec.slices, (std::vector<SliceIndex>{1}));
  EXPECT_EQ(ec.elements[0], (Itemset{Item{1, 4}}));
  EXPECT_EQ(db.entry(*net.find("c")).community, 1u);
  EXPECT_EQ(format_sequence(db.schema(), ea.elements), "(degree=<=1,kdd=2)(degree=<=1)");
}

TEST(BuildDatabase, IsolatedSilentNodeHasEmptySequence) {
  const auto net = parse_network("slice,src,dst\n0,a,b\n1,z,\n", "", DescriptorSchema::with_default_measures(2));
  const CommunityStructure cs({0, 0, 1});
  const auto db = build_database(net, compute_measure_table(net, cs), cs);
  EXPECT_TRUE(db.sequence(2).empty());
  EXPECT_EQ(db.sequence(0).size(), 1u);
  EXPECT_EQ(db.sequence(0)[0].size(), 6u);
}

TEST(BuildDatabase, FullyActiveNodeHasThetaElements) {
  std::mt19937_64 rng(3);
  const auto net = testgen::random_network(rng, 12, 4, 1.0);  // complete graph in every slice
  const auto cs = louvain(aggregate(net), 1);
  const auto db = build_database(net, compute_measure_table(net, cs), cs);
  for (NodeId v = 0; v < 12; ++v) {
    ASSERT_EQ(db.sequence(v).size(), 4u);
    for (SliceIndex j = 0; j < 4; ++j) {
      const bool attr = net.attribute(v, j, *net.schema().find("a0")) != 0;
      ASSERT_EQ(db.sequence(v)[j].size(), 6u + attr);
    }
  }
}

TEST(BuildDatabase, ParallelIsDeterministic) {
  std::mt19937_64 rng(8);
  const auto net = testgen::random_network(rng, 100, 5, 0.04, 3);
  const auto cs = louvain(aggregate(net), 2);
  const auto table = compute_measure_table(net, cs);
  const auto serial = write_database(build_database(net, table, cs, 1));
  EXPECT_EQ(serial, write_database(build_database(net, table, cs, 4)));
  EXPECT_EQ(serial, write_database(build_database(net, compute_measure_table(net, cs, 3), cs, 2)));
}

TEST(DatabaseText, RoundTripWithCatalog) {
  std::mt19937_64 rng(12);
  const auto net = testgen::random_network(rng, 30, 3, 0.1, 2);
  const auto cs = louvain(aggregate(net), 2);
  const auto db = build_database(net, compute_measure_table(net, cs), cs);
  const auto text = write_database(db);
  const auto again = parse_database(text);
  EXPECT_EQ(again.schema(), db.schema());
  EXPECT_EQ(again.labels(), db.labels());
  for (NodeId v = 0; v < db.size(); ++v) {
    EXPECT_EQ(again.sequence(v), db.sequence(v));
    EXPECT_EQ(again.entry(v).community, db.entry(v).community);
  }
  EXPECT_EQ(write_database(again), text);
}

TEST(DatabaseText, BareLinesBuildCatalogFromItems) {
  const auto db = parse_database("u\t0\t(x=1,y=hi)(x=2)\nv\t3\t(y=lo)\nw\t0\t\n");
  EXPECT_EQ(db.size(), 3u);
  EXPECT_EQ(db.schema().at(0).name, "x");
  EXPECT_EQ(db.schema().at(1).bins.labels(), (std::vector<std::string>{"hi", "lo"}));
  EXPECT_EQ(format_sequence(db.schema(), db.sequence(0)), "(x=1,y=hi)(x=2)");
  EXPECT_TRUE(db.sequence(2).empty());
  EXPECT_EQ(db.communities().ids(), (std::vector<CommunityId>{0, 3}));
}

TEST(DatabaseText, Errors) {
  EXPECT_THROW(parse_database("u\t0\t(x=1\n"), ParseError);
  EXPECT_THROW(parse_database("u\t0\t()\n"), ParseError);
  EXPECT_THROW(parse_database("u\tzero\t(x=1)\n"), ParseError);
  EXPECT_THROW(parse_database("u\t0\t(x=1)\nu\t0\t(x=1)\n"), ParseError);
  EXPECT_THROW(parse_database("u\t0\t(x=1,x=2)\n"), ConsistencyError);
  EXPECT_THROW(parse_database("#descriptor\tx\tattribute\t1\tlo,hi\nu\t0\t(x=mid)\n"), SchemaError);
  EXPECT_THROW(parse_database("#descriptor\tx\tattribute\t1\tlo,hi\nu\t0\t(q=lo)\n"), SchemaError);
}

TEST(DatabaseText, ParseSequenceRejectsUnknownNames) {
  const auto schema = testgen::attribute_schema(2, 2, 1);
  EXPECT_EQ(parse_sequence(schema, "(d0=<=1)(d1=>1,d0=>1)").size(), 2u);
  EXPECT_THROW(parse_sequence(schema, "(d9=<=1)"), SchemaError);
  EXPECT_THROW(parse_sequence(schema, "(d0=7)"), SchemaError);
}
