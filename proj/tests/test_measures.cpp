#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "commchar/commchar.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace commchar;
using testgen::MatrixOracle;

namespace {

DynamicAttributedNetwork six_nodes() {
  // A = {0,1,2,3} with 0 as a local hub, B = {4,5}
  return parse_network("slice,src,dst\n0,n0,n1\n0,n0,n2\n0,n0,n3\n0,n1,n4\n0,n4,n5\n0,n2,n5\n0,n1,n2\n", "",
                       DescriptorSchema::with_default_measures(1));
}

const CommunityStructure kSixPartition({0, 0, 0, 0, 1, 1});

}  // namespace

TEST(Measures, SixNodeFixtureByHand) {
  const auto g = slice_graph(six_nodes(), 0);
  const auto& cs = kSixPartition;
  // n0: neighbours 1,2,3 all inside; one link (1-2) among them
  EXPECT_EQ(degree(g, 0), 3u);
  EXPECT_EQ(internal_degree(g, 0, cs), 3u);
  EXPECT_DOUBLE_EQ(local_transitivity(g, 0), 1.0 / 3.0);
  EXPECT_EQ(participation(g, 0, cs), 0.0);
  EXPECT_EQ(embeddedness(g, 0, cs), 1.0);
  // n1: neighbours 0,2 (inside) and 4 (outside); link 0-2
  EXPECT_DOUBLE_EQ(local_transitivity(g, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(participation(g, 1, cs), 4.0 / 9.0);
  EXPECT_DOUBLE_EQ(embeddedness(g, 1, cs), 2.0 / 3.0);
  // internal degrees of A: 3, 2, 2, 1 -> mean 2, sigma sqrt(1/2)
  EXPECT_DOUBLE_EQ(z_score(g, 0, cs), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(z_score(g, 3, cs), -std::sqrt(2.0));
  EXPECT_EQ(z_score(g, 1, cs), 0.0);
  // n3: degree 1
  EXPECT_EQ(local_transitivity(g, 3), 0.0);
}

TEST(Measures, SixNodeFixtureMatchesMatrixOracle) {
  const auto net = six_nodes();
  const auto g = slice_graph(net, 0);
  const MatrixOracle o(g, kSixPartition);
  const auto table = compute_measure_table(net, kSixPartition);
  for (NodeId v = 0; v < 6; ++v) {
    EXPECT_EQ(table.value(v, 0, Measure::degree), o.deg(v));
    EXPECT_EQ(table.value(v, 0, Measure::internal_degree), o.internal(v));
    EXPECT_DOUBLE_EQ(table.value(v, 0, Measure::transitivity), o.transitivity(v));
    EXPECT_DOUBLE_EQ(table.value(v, 0, Measure::participation), o.participation(v));
    EXPECT_DOUBLE_EQ(table.value(v, 0, Measure::embeddedness), o.embeddedness(v));
    EXPECT_NEAR(table.value(v, 0, Measure::z_score), o.z(v), 1e-12);
  }
}

TEST(Measures, ZScoreOfZeroZeroFour) {
  const std::vector<std::size_t> xs{0, 0, 4};
  const auto z = detail::z_scores(xs);
  EXPECT_NEAR(z[2], 1.41421, 1e-5);
  EXPECT_NEAR(z[0], -0.70711, 1e-5);
}

TEST(Measures, RandomGraphsMatchMatrixOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = testgen::random_network(rng, 25, 2, 0.15);
    const auto cs = testgen::random_partition(rng, 25, 4);
    const auto table = compute_measure_table(net, cs);
    for (SliceIndex j = 0; j < 2; ++j) {
      const MatrixOracle o(slice_graph(net, j), cs);
      for (NodeId v = 0; v < 25; ++v) {
        ASSERT_EQ(table.value(v, j, Measure::degree), o.deg(v));
        ASSERT_EQ(table.value(v, j, Measure::internal_degree), o.internal(v));
        ASSERT_NEAR(table.value(v, j, Measure::transitivity), o.transitivity(v), 1e-12);
        ASSERT_NEAR(table.value(v, j, Measure::participation), o.participation(v), 1e-12);
        ASSERT_NEAR(table.value(v, j, Measure::embeddedness), o.embeddedness(v), 1e-12);
        ASSERT_NEAR(table.value(v, j, Measure::z_score), o.z(v), 1e-9);
      }
    }
  }
}

TEST(Measures, Properties) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(5, 40)(rng);
    const auto net = testgen::random_network(rng, n, 3, std::uniform_real_distribution<double>(0.02, 0.4)(rng));
    const auto cs = testgen::random_partition(rng, n, 5);
    const auto t = compute_measure_table(net, cs);
    for (SliceIndex j = 0; j < 3; ++j) {
      for (NodeId v = 0; v < n; ++v) {
        const double d = t.value(v, j, Measure::degree);
        const double di = t.value(v, j, Measure::internal_degree);
        const double tr = t.value(v, j, Measure::transitivity);
        const double p = t.value(v, j, Measure::participation);
        const double e = t.value(v, j, Measure::embeddedness);
        ASSERT_LE(di, d);
        ASSERT_GE(tr, 0.0);
        ASSERT_LE(tr, 1.0);
        ASSERT_GE(p, 0.0);
        ASSERT_LT(p, 1.0);
        ASSERT_NEAR(e * d, di, 1e-12);
        if (d == 0) {
          ASSERT_EQ(tr, 0.0);
          ASSERT_EQ(p, 0.0);
          ASSERT_EQ(e, 0.0);
        }
      }
      for (const auto c : cs.ids()) {
        const auto& members = cs.members(c);
        double sum = 0;
        double sq = 0;
        bool constant = true;
        for (const auto v : members) {
          sum += t.value(v, j, Measure::z_score);
          sq += t.value(v, j, Measure::z_score) * t.value(v, j, Measure::z_score);
          constant = constant && t.value(v, j, Measure::internal_degree) ==
                                     t.value(members.front(), j, Measure::internal_degree);
        }
        if (constant) {
          ASSERT_EQ(sq, 0.0);  // sigma = 0 => z = 0
        } else {
          ASSERT_NEAR(sum / static_cast<double>(members.size()), 0.0, 1e-9);
          ASSERT_NEAR(sq / static_cast<double>(members.size()), 1.0, 1e-9);  // population variance of z is 1
        }
      }
    }
  }
}

TEST(Measures, EvenSplitParticipation) {
  for (std::size_t m = 1; m <= 6; ++m) {
    for (std::size_t k = 1; k <= 4; ++k) {
      // hub 0 in community 0 with k neighbours in each of communities 0..m-1
      NetworkBuilder b(DescriptorSchema::with_default_measures(1));
      b.node("hub");
      std::vector<CommunityId> assignment{0};
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = 0; i < k; ++i) {
          const auto v = b.node("c" + std::to_string(c) + "_" + std::to_string(i));
          b.add_edge(0, 0, v);
          assignment.push_back(static_cast<CommunityId>(c));
        }
      const auto net = std::move(b).build();
      const CommunityStructure cs(assignment);
      EXPECT_DOUBLE_EQ(participation(slice_graph(net, 0), 0, cs), 1.0 - 1.0 / static_cast<double>(m));
    }
  }
}

TEST(Measures, ParallelEqualsSerial) {
  std::mt19937_64 rng(31);
  const auto net = testgen::random_network(rng, 80, 6, 0.05);
  const auto cs = louvain(aggregate(net), 1);
  EXPECT_EQ(compute_measure_table(net, cs, 1), compute_measure_table(net, cs, 4));
}

TEST(Measures, Errors) {
  const auto net = six_nodes();
  EXPECT_THROW(compute_measure_table(net, CommunityStructure({0, 0, 0})), UnassignedNode);
  const auto g = slice_graph(net, 0);
  EXPECT_THROW(z_score(g, 9, kSixPartition), UnknownNode);
}

TEST(Discretize, ZeroAttributesAndIsolatedNodesEmitNothing) {
  const Descriptor attr{0, "a", DescriptorKind::attribute, std::nullopt, default_attribute_bins()};
  EXPECT_FALSE(discretize(0, attr));
  EXPECT_EQ(discretize(1, attr)->bin, 0u);
  EXPECT_EQ(discretize(4, attr)->bin, 3u);
  EXPECT_EQ(discretize(9, attr)->bin, 4u);

  const auto net = parse_network("slice,src,dst\n0,a,b\n0,c,\n", "", DescriptorSchema::with_default_measures(1));
  const CommunityStructure cs({0, 0, 1});
  const auto table = compute_measure_table(net, cs);
  const auto& schema = net.schema();
  for (const auto m : kAllMeasures) {
    EXPECT_FALSE(measure_item(table, 2, 0, schema.at(*schema.for_measure(m))));
    EXPECT_TRUE(measure_item(table, 0, 0, schema.at(*schema.for_measure(m))));
  }
}

TEST(MeasuresCsv, HasOneRowPerNodeSliceMeasure) {
  const auto net = six_nodes();
  const auto csv = write_measures_csv(compute_measure_table(net, kSixPartition), net);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 6 * 6);
  EXPECT_NE(csv.find("n0,0,z_score,1.41421356237309"), std::string::npos);
  EXPECT_NE(csv.find("n0,0,embeddedness,1,>0.7\n"), std::string::npos);
}
