#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "commchar/error.hpp"
#include "commchar/network.hpp"
#include "commchar/text.hpp"

namespace commchar {

using CommunityId = std::uint32_t;

// Static graph whose edge weights count slice occurrences.
class WeightedGraph {
public:
  struct Link {
    NodeId to;
    std::uint32_t weight;
    friend bool operator==(const Link&, const Link&) = default;
  };

  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t node_count) : adjacency_(node_count) {}

  // Adds `weight` to the u-v edge (creating it when absent).
  void add(NodeId u, NodeId v, std::uint32_t weight = 1) {
    if (u == v) throw ConsistencyError("weighted graph does not admit self-loops");
    if (u >= node_count() || v >= node_count()) throw UnknownNode("edge endpoint out of range");
    bump(u, v, weight);
    bump(v, u, weight);
    total_ += weight;
  }

  std::size_t node_count() const { return adjacency_.size(); }
  const std::vector<Link>& links(NodeId v) const { return adjacency_.at(v); }
  std::uint64_t total_weight() const { return total_; }

  std::uint32_t weight(NodeId u, NodeId v) const {
    const auto& l = adjacency_.at(u);
    const auto it = std::lower_bound(l.begin(), l.end(), v, [](const Link& a, NodeId b) { return a.to < b; });
    return it != l.end() && it->to == v ? it->weight : 0;
  }

  std::uint64_t strength(NodeId v) const {
    std::uint64_t s = 0;
    for (const auto& l : adjacency_.at(v)) s += l.weight;
    return s;
  }

private:
  void bump(NodeId u, NodeId v, std::uint32_t w) {
    auto& l = adjacency_[u];
    const auto it = std::lower_bound(l.begin(), l.end(), v, [](const Link& a, NodeId b) { return a.to < b; });
    if (it != l.end() && it->to == v)
      it->weight += w;
    else
      l.insert(it, Link{v, w});
  }

  std::vector<std::vector<Link>> adjacency_;
  std::uint64_t total_ = 0;
};

// Total partition of the node set. Community ids are arbitrary labels; they
// are also indexed densely (by ascending id) for array lookups.
class CommunityStructure {
public:
  CommunityStructure() = default;

  explicit CommunityStructure(std::vector<CommunityId> assignment) : assignment_(std::move(assignment)) {
    std::map<CommunityId, std::vector<NodeId>> groups;
    for (NodeId v = 0; v < assignment_.size(); ++v) groups[assignment_[v]].push_back(v);
    for (auto& [id, members] : groups) {
      index_of_id_.emplace(id, ids_.size());
      ids_.push_back(id);
      members_.push_back(std::move(members));
    }
    dense_.resize(assignment_.size());
    for (NodeId v = 0; v < assignment_.size(); ++v) dense_[v] = index_of_id_.at(assignment_[v]);
  }

  std::size_t node_count() const { return assignment_.size(); }
  std::size_t community_count() const { return ids_.size(); }

  CommunityId community_of(NodeId v) const {
    if (v >= assignment_.size()) throw UnassignedNode("node " + std::to_string(v) + " has no community");
    return assignment_[v];
  }
  std::size_t index_of_node(NodeId v) const {
    if (v >= dense_.size()) throw UnassignedNode("node " + std::to_string(v) + " has no community");
    return dense_[v];
  }

  // Ids in ascending order.
  const std::vector<CommunityId>& ids() const { return ids_; }
  const std::vector<NodeId>& members_at(std::size_t index) const { return members_.at(index); }
  const std::vector<NodeId>& members(CommunityId id) const {
    const auto it = index_of_id_.find(id);
    if (it == index_of_id_.end()) throw PartitionMismatch("unknown community " + std::to_string(id));
    return members_[it->second];
  }
  bool contains(CommunityId id) const { return index_of_id_.count(id) > 0; }
  const std::vector<CommunityId>& assignment() const { return assignment_; }

  // Same node sets regardless of labels.
  bool same_partition(const CommunityStructure& other) const {
    if (node_count() != other.node_count()) return false;
    std::unordered_map<CommunityId, CommunityId> forward;
    std::unordered_map<CommunityId, CommunityId> backward;
    for (NodeId v = 0; v < assignment_.size(); ++v) {
      const auto a = assignment_[v];
      const auto b = other.assignment_[v];
      if (forward.emplace(a, b).first->second != b) return false;
      if (backward.emplace(b, a).first->second != a) return false;
    }
    return true;
  }

  friend bool operator==(const CommunityStructure& a, const CommunityStructure& b) {
    return a.assignment_ == b.assignment_;
  }

private:
  std::vector<CommunityId> assignment_;
  std::vector<std::size_t> dense_;
  std::vector<CommunityId> ids_;
  std::vector<std::vector<NodeId>> members_;
  std::unordered_map<CommunityId, std::size_t> index_of_id_;
};

// Union of all slices; weight = number of slices containing the edge.
inline WeightedGraph aggregate(const DynamicAttributedNetwork& net) {
  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  for (SliceIndex j = 0; j < net.num_slices(); ++j)
    for (const auto& e : net.edges(j)) ++counts[(static_cast<std::uint64_t>(e.u) << 32) | e.v];
  std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedGraph g(net.node_count());
  for (const auto& [key, w] : sorted) g.add(static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu), w);
  return g;
}

// Weighted Newman modularity, resolution 1:
//   Q = sum_c [ w_in(c) / W - (w_tot(c) / 2W)^2 ]
// w_in = internal edge weight, w_tot = summed strength, W = total weight.
// Defined as 0 for a graph without edges.
inline double modularity(const WeightedGraph& g, const CommunityStructure& cs) {
  if (cs.node_count() != g.node_count())
    throw PartitionMismatch("partition covers " + std::to_string(cs.node_count()) + " nodes, graph has " +
                            std::to_string(g.node_count()));
  const double total = static_cast<double>(g.total_weight());
  if (total == 0) return 0.0;
  std::vector<double> internal(cs.community_count(), 0.0);
  std::vector<double> strength(cs.community_count(), 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto cu = cs.index_of_node(u);
    for (const auto& l : g.links(u)) {
      strength[cu] += l.weight;
      if (u < l.to && cs.index_of_node(l.to) == cu) internal[cu] += l.weight;
    }
  }
  double q = 0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    const double share = strength[c] / (2 * total);
    q += internal[c] / total - share * share;
  }
  return q;
}

struct LouvainResult {
  CommunityStructure partition;
  // Modularity of the singleton start, then after each aggregation level.
  std::vector<double> level_modularity;
};

namespace detail {

// Node i of a contracted level: neighbor weights plus a self-loop carrying
// the internal weight of the merged nodes.
struct LouvainLevel {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> links;
  std::vector<double> self_loop;
  std::vector<double> strength;  // sum of links + 2 * self_loop
};

inline LouvainLevel level_from(const WeightedGraph& g) {
  LouvainLevel level;
  const auto n = g.node_count();
  level.links.resize(n);
  level.self_loop.assign(n, 0.0);
  level.strength.assign(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    for (const auto& l : g.links(u)) {
      level.links[u].emplace_back(l.to, static_cast<double>(l.weight));
      level.strength[u] += l.weight;
    }
  }
  return level;
}

// Fisher-Yates driven by raw mt19937_64 output, so visit orders match across
// standard library implementations.
inline void shuffle(std::vector<std::uint32_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

// One local-moving phase. Returns true when at least one node moved.
// Gains are compared as k_{i,C} * 2W - tot_C * k_i, which is exact for
// integer weights. A node stays unless another community strictly beats
// its own; among equal best alternatives the lowest community id wins.
inline bool local_moves(const LouvainLevel& level, double two_w, std::vector<std::uint32_t>& community,
                        std::mt19937_64& rng) {
  const auto n = static_cast<std::uint32_t>(level.links.size());
  std::vector<double> tot(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) tot[community[i]] += level.strength[i];

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle(order, rng);

  std::vector<double> to_comm(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (const auto i : order) {
      const auto own = community[i];
      const double k = level.strength[i];
      touched.clear();
      for (const auto& [j, w] : level.links[i]) {
        const auto c = community[j];
        if (to_comm[c] == 0.0) touched.push_back(c);
        to_comm[c] += w;
      }
      tot[own] -= k;
      auto gain = [&](std::uint32_t c) { return to_comm[c] * two_w - tot[c] * k; };
      std::uint32_t best = own;
      double best_gain = gain(own);
      for (const auto c : touched) {
        if (c == own) continue;
        const double g = gain(c);
        if (g > best_gain || (g == best_gain && best != own && c < best)) {
          best = c;
          best_gain = g;
        }
      }
      tot[best] += k;
      if (best != own) {
        community[i] = best;
        moved = true;
        any_move = true;
      }
      for (const auto c : touched) to_comm[c] = 0.0;
    }
  }
  return any_move;
}

// Renumbers communities 0..p-1 by first appearance and returns p.
inline std::uint32_t renumber(std::vector<std::uint32_t>& community) {
  std::vector<std::uint32_t> map(community.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& c : community) {
    if (map[c] == UINT32_MAX) map[c] = next++;
    c = map[c];
  }
  return next;
}

inline LouvainLevel contract(const LouvainLevel& level, const std::vector<std::uint32_t>& community,
                             std::uint32_t count) {
  LouvainLevel next;
  next.links.resize(count);
  next.self_loop.assign(count, 0.0);
  next.strength.assign(count, 0.0);
  std::vector<std::map<std::uint32_t, double>> merged(count);
  for (std::uint32_t i = 0; i < level.links.size(); ++i) {
    const auto ci = community[i];
    next.self_loop[ci] += level.self_loop[i];
    next.strength[ci] += level.strength[i];
    for (const auto& [j, w] : level.links[i]) {
      const auto cj = community[j];
      if (ci == cj) {
        if (i < j) next.self_loop[ci] += w;
      } else {
        merged[ci][cj] += w;
      }
    }
  }
  for (std::uint32_t c = 0; c < count; ++c)
    next.links[c].assign(merged[c].begin(), merged[c].end());
  return next;
}

}  // namespace detail

// Louvain two-phase optimisation (local moves, then contraction) repeated
// until a level produces no move. Visit order is shuffled per level from
// `seed`; the result is deterministic for a given seed. Communities are
// numbered 0..p-1 by their smallest node id.
inline LouvainResult louvain_traced(const WeightedGraph& g, std::uint64_t seed) {
  const auto n = g.node_count();
  if (n == 0) throw EmptyGraph("louvain needs at least one node");
  std::vector<std::uint32_t> node_community(n);
  std::iota(node_community.begin(), node_community.end(), 0u);

  LouvainResult result;
  result.level_modularity.push_back(modularity(g, CommunityStructure({node_community.begin(), node_community.end()})));
  const double two_w = 2.0 * static_cast<double>(g.total_weight());
  if (two_w == 0) {
    result.partition = CommunityStructure({node_community.begin(), node_community.end()});
    return result;
  }

  std::mt19937_64 rng(seed);
  auto level = detail::level_from(g);
  for (;;) {
    std::vector<std::uint32_t> community(level.links.size());
    std::iota(community.begin(), community.end(), 0u);
    if (!detail::local_moves(level, two_w, community, rng)) break;
    const auto count = detail::renumber(community);
    for (auto& c : node_community) c = community[c];
    result.level_modularity.push_back(modularity(g, CommunityStructure({node_community.begin(), node_community.end()})));
    if (count == level.links.size()) break;
    level = detail::contract(level, community, count);
  }
  detail::renumber(node_community);
  result.partition = CommunityStructure({node_community.begin(), node_community.end()});
  return result;
}

inline CommunityStructure louvain(const WeightedGraph& g, std::uint64_t seed) {
  return louvain_traced(g, seed).partition;
}

// Partition CSV: header `node,community`, node given by its label.
inline std::string write_partition_csv(const CommunityStructure& cs, std::span<const std::string> labels) {
  std::string out = "node,community\n";
  for (NodeId v = 0; v < cs.node_count(); ++v)
    out += text::csv_escape(labels[v]) + "," + std::to_string(cs.community_of(v)) + "\n";
  return out;
}

inline CommunityStructure read_partition_csv(std::string_view content, const DynamicAttributedNetwork& net,
                                             const std::string& origin = "<partition>") {
  std::vector<long long> assignment(net.node_count(), -1);
  int line_no = 0;
  bool header = true;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (header) {
      detail::expect_header(line, "node,community", origin);
      header = false;
      continue;
    }
    const auto where = origin + ":" + std::to_string(line_no);
    const auto f = text::csv_fields(line);
    if (f.size() != 2) throw ParseError(where + ": expected node,community");
    const auto v = net.find(f[0]);
    if (!v) throw PartitionMismatch(where + ": unknown node '" + f[0] + "'");
    const auto c = text::to_int(f[1]);
    if (!c || *c < 0 || *c > UINT32_MAX) throw ParseError(where + ": bad community id '" + f[1] + "'");
    if (assignment[*v] >= 0) throw PartitionMismatch(where + ": node '" + f[0] + "' assigned twice");
    assignment[*v] = *c;
  }
  std::vector<CommunityId> out(net.node_count());
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (assignment[v] < 0) throw PartitionMismatch(origin + ": node '" + net.label(v) + "' has no community");
    out[v] = static_cast<CommunityId>(assignment[v]);
  }
  return CommunityStructure(std::move(out));
}

}  // namespace commchar
