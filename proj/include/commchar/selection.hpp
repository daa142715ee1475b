#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "commchar/error.hpp"
#include "commchar/log.hpp"
#include "commchar/mining.hpp"
#include "commchar/parallel.hpp"
#include "commchar/seqdb.hpp"

namespace commchar {

// 1 - |a ∩ b| / |a ∪ b| over sorted node lists.
inline double jaccard_distance(std::span<const NodeId> a, std::span<const NodeId> b) {
  if (a.empty() && b.empty()) throw BothEmpty("jaccard distance of two empty sets");
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  const auto all = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(all);
}

// What the coverage iteration measures distance against.
enum class DistanceAnchor {
  covered,  // union of supporters of every pattern selected so far
  first,    // supporters of the top-growth pattern only
};

struct SelectionOptions {
  std::size_t max_uncovered = 5;
  DistanceAnchor anchor = DistanceAnchor::covered;
};

struct SelectionStep {
  std::size_t pattern_index = 0;    // into the mined pattern list
  std::optional<double> distance;  // none for the top-growth seed
  std::size_t newly_covered = 0;
  std::size_t uncovered_after = 0;
};

struct CommunityCharacterization {
  CommunityId community = 0;
  std::size_t community_size = 0;
  std::size_t pattern_count = 0;
  std::optional<Pattern> top_support;
  std::vector<Pattern> selected;  // selected[0] is the top-growth pattern
  std::vector<SelectionStep> trace;  // trace[i] explains selected[i]
  std::vector<NodeId> covered;
  std::vector<NodeId> deviants;
  std::vector<Pattern> mined;  // every mined pattern, when requested
};

namespace detail {

inline bool higher_support_first(const Pattern& a, const Pattern& b) {
  if (a.support != b.support) return a.support > b.support;
  if (a.growth_rate != b.growth_rate) return a.growth_rate > b.growth_rate;
  if (a.sequence.size() != b.sequence.size()) return a.sequence.size() < b.sequence.size();
  return a.sequence < b.sequence;
}

inline bool higher_growth_first(const Pattern& a, const Pattern& b) {
  if (a.growth_rate != b.growth_rate) return a.growth_rate > b.growth_rate;
  if (a.support != b.support) return a.support > b.support;
  return a.sequence < b.sequence;
}

inline std::vector<NodeId> set_union(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::size_t count_new(std::span<const NodeId> candidate, std::span<const NodeId> covered) {
  std::size_t common = 0;
  auto j = covered.begin();
  for (const auto v : candidate) {
    while (j != covered.end() && *j < v) ++j;
    if (j != covered.end() && *j == v) ++common;
  }
  return candidate.size() - common;
}

}  // namespace detail

// Picks the top-support pattern (reported on its own) and the top-growth
// pattern, then greedily adds the pattern whose supporters are farthest (in
// Jaccard distance) from the anchor set until at most `max_uncovered`
// members remain uncovered. Ties go to the higher growth rate, then the
// canonical order. A pattern is only accepted when it covers at least one
// new member; when none does, the remaining members are deviants.
inline CommunityCharacterization select_representatives(std::span<const Pattern> patterns,
                                                        std::span<const NodeId> community,
                                                        const SelectionOptions& options = {}) {
  if (patterns.empty()) throw NoPatterns("no patterns to select from");
  std::vector<NodeId> members(community.begin(), community.end());
  std::sort(members.begin(), members.end());
  for (const auto& p : patterns)
    if (!std::includes(members.begin(), members.end(), p.supporting_nodes.begin(), p.supporting_nodes.end()))
      throw ConsistencyError("pattern supporters fall outside the community");

  CommunityCharacterization out;
  out.community = patterns.front().community;
  out.community_size = members.size();
  out.pattern_count = patterns.size();

  std::size_t best_support = 0;
  std::size_t best_growth = 0;
  for (std::size_t i = 1; i < patterns.size(); ++i) {
    if (detail::higher_support_first(patterns[i], patterns[best_support])) best_support = i;
    if (detail::higher_growth_first(patterns[i], patterns[best_growth])) best_growth = i;
  }
  out.top_support = patterns[best_support];

  std::vector<bool> chosen(patterns.size(), false);
  chosen[best_growth] = true;
  out.covered = patterns[best_growth].supporting_nodes;
  const auto anchor_first = patterns[best_growth].supporting_nodes;
  out.selected.push_back(patterns[best_growth]);
  out.trace.push_back(SelectionStep{best_growth, std::nullopt, out.covered.size(), members.size() - out.covered.size()});

  while (members.size() - out.covered.size() > options.max_uncovered) {
    std::optional<std::size_t> pick;
    double pick_distance = -1;
    std::size_t pick_new = 0;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (chosen[i]) continue;
      const auto added = detail::count_new(patterns[i].supporting_nodes, out.covered);
      if (added == 0) continue;
      const auto& anchor = options.anchor == DistanceAnchor::covered ? out.covered : anchor_first;
      const double d = jaccard_distance(patterns[i].supporting_nodes, anchor);
      bool better = !pick || d > pick_distance;
      if (pick && d == pick_distance) {
        const auto& a = patterns[i];
        const auto& b = patterns[*pick];
        better = a.growth_rate != b.growth_rate ? a.growth_rate > b.growth_rate : a.sequence < b.sequence;
      }
      if (better) {
        pick = i;
        pick_distance = d;
        pick_new = added;
      }
    }
    if (!pick) break;
    chosen[*pick] = true;
    out.covered = detail::set_union(out.covered, patterns[*pick].supporting_nodes);
    out.selected.push_back(patterns[*pick]);
    out.trace.push_back(SelectionStep{*pick, pick_distance, pick_new, members.size() - out.covered.size()});
  }

  std::set_difference(members.begin(), members.end(), out.covered.begin(), out.covered.end(),
                      std::back_inserter(out.deviants));
  return out;
}

struct CharacterizationOptions {
  MiningOptions mining;
  SelectionOptions selection;
  unsigned threads = 1;
  bool keep_patterns = false;
};

// Mines and selects for every community with at least
// `mining.min_community_size` members, in ascending community id order. A
// community without any frequent pattern yields an empty characterization
// whose members are all deviants.
inline std::vector<CommunityCharacterization> characterize_all(const SequenceDatabase& db,
                                                               const CharacterizationOptions& options) {
  std::vector<CommunityId> targets;
  for (const auto id : db.communities().ids())
    if (db.communities().members(id).size() >= options.mining.min_community_size) targets.push_back(id);
  std::vector<CommunityCharacterization> out(targets.size());
  parallel_for(targets.size(), options.threads, [&](std::size_t i) {
    const auto id = targets[i];
    const auto& members = db.communities().members(id);
    auto patterns = mine_closed(db, id, options.mining);
    log::info("community_patterns", "community", id, "size", members.size(), "patterns", patterns.size());
    if (patterns.empty()) {
      log::warn("no_frequent_pattern", "community", id, "size", members.size());
      auto& c = out[i];
      c.community = id;
      c.community_size = members.size();
      c.deviants = members;
      return;
    }
    out[i] = select_representatives(patterns, members, options.selection);
    if (options.keep_patterns) out[i].mined = std::move(patterns);
  });
  return out;
}

// Convenience overload with default selection settings.
inline std::vector<CommunityCharacterization> characterize_all(const SequenceDatabase& db, Ratio min_sup,
                                                               std::size_t min_community_size) {
  CharacterizationOptions options;
  options.mining.min_sup = min_sup;
  options.mining.min_community_size = min_community_size;
  return characterize_all(db, options);
}

}  // namespace commchar
