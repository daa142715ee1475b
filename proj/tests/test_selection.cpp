#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "commchar/commchar.hpp"
#include "support/generators.hpp"

using namespace commchar;

namespace {

std::vector<NodeId> range(NodeId lo, NodeId hi) {
  std::vector<NodeId> out;
  for (NodeId v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

// Synthetic pattern: sequence (d0=k), given supporters and growth.
Pattern fake(std::uint32_t k, std::vector<NodeId> supporters, double growth, std::size_t community_size) {
  Pattern p;
  p.sequence = Sequence{Itemset{Item{0, k}}};
  p.support = Ratio(static_cast<std::int64_t>(supporters.size()), static_cast<std::int64_t>(community_size));
  p.growth_rate = growth;
  p.supporting_nodes = std::move(supporters);
  return p;
}

double set_jaccard(const std::set<NodeId>& a, const std::set<NodeId>& b) {
  std::size_t common = 0;
  for (auto v : a) common += b.count(v);
  return 1.0 - double(common) / double(a.size() + b.size() - common);
}

}  // namespace

TEST(Jaccard, Basics) {
  const std::vector<NodeId> a{1, 2, 3}, b{3, 4}, none;
  EXPECT_DOUBLE_EQ(jaccard_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_distance(a, b), 1.0 - 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(jaccard_distance(a, none), 1.0);
  EXPECT_THROW(jaccard_distance(none, none), BothEmpty);
}

TEST(Selection, HandTraceWithCoveredAnchor) {
  const auto members = range(1, 12);
  const std::vector<Pattern> pats{fake(0, range(1, 6), 10, 12), fake(1, range(5, 10), 2, 12), fake(2, {9, 10}, 3, 12)};
  SelectionOptions opt;
  opt.max_uncovered = 2;
  const auto c = select_representatives(pats, members, opt);
  ASSERT_EQ(c.selected.size(), 3u);
  EXPECT_EQ(c.trace[0].pattern_index, 0u);
  EXPECT_FALSE(c.trace[0].distance);
  EXPECT_EQ(c.trace[0].uncovered_after, 6u);
  // {9,10} is disjoint from {1..6}; {5..10} shares two of ten
  EXPECT_EQ(c.trace[1].pattern_index, 2u);
  EXPECT_DOUBLE_EQ(*c.trace[1].distance, 1.0);
  EXPECT_EQ(c.trace[1].newly_covered, 2u);
  EXPECT_EQ(c.trace[2].pattern_index, 1u);
  EXPECT_DOUBLE_EQ(*c.trace[2].distance, 0.6);
  EXPECT_EQ(c.trace[2].newly_covered, 2u);
  EXPECT_EQ(c.trace[2].uncovered_after, 2u);
  EXPECT_EQ(c.deviants, (std::vector<NodeId>{11, 12}));
  EXPECT_EQ(c.covered, range(1, 10));
  EXPECT_EQ(c.community_size, 12u);
  EXPECT_EQ(c.pattern_count, 3u);
  // top support is (d0=1) at 6/12, tied with the seed; higher growth wins
  EXPECT_EQ(c.top_support->sequence, pats[0].sequence);
}

TEST(Selection, FirstPatternAnchor) {
  const auto members = range(1, 12);
  const std::vector<Pattern> pats{fake(0, range(1, 6), 10, 12), fake(1, range(5, 10), 2, 12), fake(2, {9, 10}, 3, 12)};
  SelectionOptions opt;
  opt.max_uncovered = 2;
  opt.anchor = DistanceAnchor::first;
  const auto c = select_representatives(pats, members, opt);
  ASSERT_EQ(c.selected.size(), 3u);
  EXPECT_DOUBLE_EQ(*c.trace[1].distance, 1.0);
  EXPECT_DOUBLE_EQ(*c.trace[2].distance, 0.8);  // measured against {1..6}
}

TEST(Selection, StopsWhenThresholdAlreadyMet) {
  const auto members = range(1, 8);
  const std::vector<Pattern> pats{fake(0, range(1, 6), 4, 8), fake(1, {7, 8}, 1, 8)};
  SelectionOptions opt;
  opt.max_uncovered = 2;
  const auto c = select_representatives(pats, members, opt);
  EXPECT_EQ(c.selected.size(), 1u);
  EXPECT_EQ(c.deviants, (std::vector<NodeId>{7, 8}));
}

TEST(Selection, PatternsAddingNothingAreSkipped) {
  const auto members = range(1, 10);
  const std::vector<Pattern> pats{fake(0, range(1, 5), 9, 10), fake(1, {1, 2}, 1, 10), fake(2, {6}, 1, 10)};
  SelectionOptions opt;
  opt.max_uncovered = 0;
  const auto c = select_representatives(pats, members, opt);
  ASSERT_EQ(c.selected.size(), 2u);
  EXPECT_EQ(c.trace[1].pattern_index, 2u);
  EXPECT_EQ(c.deviants, range(7, 10));
}

TEST(Selection, EqualDistanceGoesToHigherGrowth) {
  const auto members = range(1, 6);
  const std::vector<Pattern> pats{fake(0, {1, 2}, 5, 6), fake(1, {3}, 1, 6), fake(2, {4}, 2, 6)};
  SelectionOptions opt;
  opt.max_uncovered = 3;
  const auto c = select_representatives(pats, members, opt);
  ASSERT_EQ(c.selected.size(), 2u);
  EXPECT_EQ(c.trace[1].pattern_index, 2u);
}

TEST(Selection, Errors) {
  const auto members = range(1, 4);
  EXPECT_THROW(select_representatives(std::vector<Pattern>{}, members), NoPatterns);
  const std::vector<Pattern> stray{fake(0, {1, 9}, 1, 4)};
  EXPECT_THROW(select_representatives(stray, members), ConsistencyError);
}

// Invariants on mined patterns, with each greedy step recomputed from sets.
TEST(Selection, InvariantsOnRandomDatabases) {
  std::mt19937_64 rng(41);
  testgen::DatabaseShape shape;
  shape.max_nodes = 16;
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto db = testgen::random_database(rng, shape);
    const auto& members = db.communities().members(0);
    MiningOptions mo;
    mo.min_sup = Ratio(1, 4);
    const auto pats = mine_closed(db, 0, mo);
    if (pats.empty()) continue;
    ++checked;
    for (const auto anchor : {DistanceAnchor::covered, DistanceAnchor::first}) {
      SelectionOptions so;
      so.max_uncovered = trial % 3;
      so.anchor = anchor;
      const auto c = select_representatives(pats, members, so);
      SCOPED_TRACE("trial " + std::to_string(trial));

      for (const auto& p : pats) EXPECT_LE(p.growth_rate, c.selected[0].growth_rate);
      for (const auto& p : pats) EXPECT_LE(p.support, c.top_support->support);

      std::set<NodeId> covered(c.selected[0].supporting_nodes.begin(), c.selected[0].supporting_nodes.end());
      const std::set<NodeId> first = covered;
      std::set<std::size_t> used{c.trace[0].pattern_index};
      for (std::size_t s = 1; s < c.selected.size(); ++s) {
        const auto& anchor_set = anchor == DistanceAnchor::covered ? covered : first;
        double best = -1;
        for (std::size_t i = 0; i < pats.size(); ++i) {
          if (used.count(i)) continue;
          std::set<NodeId> sup(pats[i].supporting_nodes.begin(), pats[i].supporting_nodes.end());
          bool adds = false;
          for (auto v : sup) adds |= !covered.count(v);
          if (adds) best = std::max(best, set_jaccard(sup, anchor_set));
        }
        ASSERT_TRUE(c.trace[s].distance);
        EXPECT_DOUBLE_EQ(*c.trace[s].distance, best);
        used.insert(c.trace[s].pattern_index);
        const auto before = covered.size();
        covered.insert(c.selected[s].supporting_nodes.begin(), c.selected[s].supporting_nodes.end());
        EXPECT_EQ(c.trace[s].newly_covered, covered.size() - before);
        EXPECT_GT(c.trace[s].newly_covered, 0u);
      }
      EXPECT_EQ(std::vector<NodeId>(covered.begin(), covered.end()), c.covered);

      std::set<NodeId> dev(members.begin(), members.end());
      for (auto v : covered) dev.erase(v);
      EXPECT_EQ(std::vector<NodeId>(dev.begin(), dev.end()), c.deviants);
      for (const auto& p : c.selected)
        for (auto v : p.supporting_nodes) EXPECT_FALSE(dev.count(v));
      for (auto v : dev)
        for (const auto& p : c.selected) EXPECT_FALSE(is_subsequence(p.sequence, db.sequence(v)));

      if (c.deviants.size() > so.max_uncovered) {
        // stopped early: nothing left could cover a deviant
        for (const auto& p : pats)
          for (auto v : p.supporting_nodes) EXPECT_FALSE(dev.count(v));
      } else {
        // stopped as soon as the threshold was met
        for (std::size_t s = 0; s + 1 < c.trace.size(); ++s) EXPECT_GT(c.trace[s].uncovered_after, so.max_uncovered);
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(CharacterizeAll, SizesAndEmptyCommunities) {
  // community 0: four nodes sharing (a=1); community 1: three nodes with
  // nothing in common at full support; community 2: too small
  const auto db = parse_database(
      "u1\t0\t(a=1)(b=1)\n"
      "u2\t0\t(a=1)\n"
      "u3\t0\t(a=1,b=1)\n"
      "u4\t0\t(a=1)\n"
      "w1\t1\t(b=1)\n"
      "w2\t1\t(c=1)\n"
      "w3\t1\t(a=1)\n"
      "s1\t2\t(c=1)\n");
  CharacterizationOptions opt;
  opt.mining.min_sup = Ratio(1, 1);
  opt.mining.min_community_size = 3;
  opt.selection.max_uncovered = 0;
  opt.keep_patterns = true;
  const auto all = characterize_all(db, opt);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].community, 0u);
  ASSERT_EQ(all[0].selected.size(), 1u);
  EXPECT_EQ(format_sequence(db.schema(), all[0].selected[0].sequence), "(a=1)");
  EXPECT_TRUE(all[0].deviants.empty());
  EXPECT_EQ(all[0].mined.size(), all[0].pattern_count);
  EXPECT_EQ(all[1].community, 1u);
  EXPECT_TRUE(all[1].selected.empty());
  EXPECT_EQ(all[1].pattern_count, 0u);
  EXPECT_EQ(all[1].deviants, db.communities().members(1));

  opt.threads = 4;
  const auto parallel = characterize_all(db, opt);
  ASSERT_EQ(parallel.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(parallel[i].selected, all[i].selected);
    EXPECT_EQ(parallel[i].deviants, all[i].deviants);
  }
}
