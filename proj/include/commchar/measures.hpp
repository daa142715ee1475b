#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "commchar/community.hpp"
#include "commchar/descriptor.hpp"
#include "commchar/network.hpp"
#include "commchar/parallel.hpp"
#include "commchar/sequence.hpp"
#include "commchar/text.hpp"

namespace commchar {

namespace detail {

inline void check_assigned(const StaticGraph& g, NodeId v, const CommunityStructure& cs) {
  g.check(v);
  if (cs.node_count() != g.node_count())
    throw UnassignedNode("partition covers " + std::to_string(cs.node_count()) + " nodes, graph has " +
                         std::to_string(g.node_count()));
}

// Sorted multiset of neighbor community indices, run-length counted.
inline std::vector<std::size_t> neighbor_community_counts(const StaticGraph& g, NodeId v, const CommunityStructure& cs) {
  std::vector<std::size_t> comms;
  for (const auto u : g.neighbors(v)) comms.push_back(cs.index_of_node(u));
  std::sort(comms.begin(), comms.end());
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < comms.size(); ++i) {
    if (i == 0 || comms[i] != comms[i - 1])
      counts.push_back(1);
    else
      ++counts.back();
  }
  return counts;
}

inline std::size_t sorted_intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace detail

inline std::size_t degree(const StaticGraph& g, NodeId v) { return g.degree(v); }

inline std::size_t internal_degree(const StaticGraph& g, NodeId v, const CommunityStructure& cs) {
  detail::check_assigned(g, v, cs);
  const auto own = cs.index_of_node(v);
  std::size_t n = 0;
  for (const auto u : g.neighbors(v)) n += cs.index_of_node(u) == own;
  return n;
}

// Edges among neighbors of v.
inline std::size_t neighbor_links(const StaticGraph& g, NodeId v) {
  std::size_t twice = 0;
  const auto nv = g.neighbors(v);
  for (const auto u : nv) twice += detail::sorted_intersection_size(nv, g.neighbors(u));
  return twice / 2;
}

// Local clustering coefficient 2*links / (d(d-1)); 0 when d < 2.
inline double local_transitivity(const StaticGraph& g, NodeId v) {
  const auto d = g.degree(v);
  if (d < 2) return 0.0;
  return 2.0 * static_cast<double>(neighbor_links(g, v)) / (static_cast<double>(d) * static_cast<double>(d - 1));
}

inline double embeddedness(const StaticGraph& g, NodeId v, const CommunityStructure& cs) {
  const auto d = g.degree(v);
  const auto internal = internal_degree(g, v, cs);
  return d == 0 ? 0.0 : static_cast<double>(internal) / static_cast<double>(d);
}

// P = 1 - sum_c (d_c / d)^2; 0 when d = 0.
inline double participation(const StaticGraph& g, NodeId v, const CommunityStructure& cs) {
  detail::check_assigned(g, v, cs);
  const auto d = g.degree(v);
  if (d == 0) return 0.0;
  std::size_t squares = 0;
  for (const auto c : detail::neighbor_community_counts(g, v, cs)) squares += c * c;
  return 1.0 - static_cast<double>(squares) / (static_cast<double>(d) * static_cast<double>(d));
}

namespace detail {

// z-scores of internal degrees over one community (population std, 0 when
// the std is 0).
inline std::vector<double> z_scores(std::span<const std::size_t> internal) {
  std::vector<double> z(internal.size(), 0.0);
  if (internal.empty()) return z;
  double sum = 0;
  for (const auto x : internal) sum += static_cast<double>(x);
  const double mean = sum / static_cast<double>(internal.size());
  double squares = 0;
  for (const auto x : internal) squares += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  const double sigma = std::sqrt(squares / static_cast<double>(internal.size()));
  if (sigma == 0) return z;
  for (std::size_t i = 0; i < internal.size(); ++i) z[i] = (static_cast<double>(internal[i]) - mean) / sigma;
  return z;
}

}  // namespace detail

// Within-community z-score of v's internal degree.
inline double z_score(const StaticGraph& g, NodeId v, const CommunityStructure& cs) {
  detail::check_assigned(g, v, cs);
  const auto& members = cs.members_at(cs.index_of_node(v));
  std::vector<std::size_t> internal;
  std::size_t position = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] == v) position = i;
    internal.push_back(internal_degree(g, members[i], cs));
  }
  return detail::z_scores(internal)[position];
}

// Values of the six measures for every (node, slice).
class MeasureTable {
public:
  MeasureTable() = default;
  MeasureTable(std::size_t nodes, std::size_t slices)
      : nodes_(nodes), slices_(slices), values_(nodes * slices * kMeasureCount, 0.0) {}

  std::size_t node_count() const { return nodes_; }
  std::size_t num_slices() const { return slices_; }

  double value(NodeId v, SliceIndex j, Measure m) const { return values_.at(slot(v, j, m)); }
  void set(NodeId v, SliceIndex j, Measure m, double x) { values_.at(slot(v, j, m)) = x; }

  friend bool operator==(const MeasureTable&, const MeasureTable&) = default;

private:
  std::size_t slot(NodeId v, SliceIndex j, Measure m) const {
    if (v >= nodes_ || j >= slices_) throw IndexError("measure table index out of range");
    return (static_cast<std::size_t>(v) * slices_ + j) * kMeasureCount + static_cast<std::size_t>(m);
  }

  std::size_t nodes_ = 0;
  std::size_t slices_ = 0;
  std::vector<double> values_;
};

// All measures of one slice graph against the static partition.
inline void fill_slice_measures(const StaticGraph& g, const CommunityStructure& cs, SliceIndex j, MeasureTable& table) {
  const auto n = g.node_count();
  std::vector<std::size_t> internal(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    const auto d = g.degree(v);
    internal[v] = internal_degree(g, v, cs);
    const auto counts = detail::neighbor_community_counts(g, v, cs);
    std::size_t squares = 0;
    for (const auto c : counts) squares += c * c;
    const double dd = static_cast<double>(d);
    table.set(v, j, Measure::degree, dd);
    table.set(v, j, Measure::internal_degree, static_cast<double>(internal[v]));
    table.set(v, j, Measure::transitivity, local_transitivity(g, v));
    table.set(v, j, Measure::participation, d == 0 ? 0.0 : 1.0 - static_cast<double>(squares) / (dd * dd));
    table.set(v, j, Measure::embeddedness, d == 0 ? 0.0 : static_cast<double>(internal[v]) / dd);
  }
  for (std::size_t c = 0; c < cs.community_count(); ++c) {
    const auto& members = cs.members_at(c);
    std::vector<std::size_t> values;
    values.reserve(members.size());
    for (const auto v : members) values.push_back(internal[v]);
    const auto z = detail::z_scores(values);
    for (std::size_t i = 0; i < members.size(); ++i) table.set(members[i], j, Measure::z_score, z[i]);
  }
}

inline MeasureTable compute_measure_table(const DynamicAttributedNetwork& net, const CommunityStructure& cs,
                                          unsigned threads = 1) {
  if (cs.node_count() != net.node_count())
    throw UnassignedNode("partition covers " + std::to_string(cs.node_count()) + " nodes, network has " +
                         std::to_string(net.node_count()));
  MeasureTable table(net.node_count(), net.num_slices());
  // Slices write disjoint table cells.
  parallel_for(net.num_slices(), threads, [&](std::size_t j) { fill_slice_measures(slice_graph(net, j), cs, j, table); });
  return table;
}

// Bin of `value`, or none when no item is emitted: zero attribute values
// and NaN (undefined) measures.
inline std::optional<Item> discretize(double value, const Descriptor& descriptor) {
  if (std::isnan(value)) return std::nullopt;
  if (descriptor.kind == DescriptorKind::attribute && value == 0) return std::nullopt;
  return Item{descriptor.id, static_cast<std::uint32_t>(descriptor.bins.index_of(value))};
}

// Topological item of (v, j) for `descriptor`; none when v is isolated in j.
inline std::optional<Item> measure_item(const MeasureTable& table, NodeId v, SliceIndex j, const Descriptor& descriptor) {
  if (!descriptor.measure) return std::nullopt;
  if (table.value(v, j, Measure::degree) == 0) return std::nullopt;
  return discretize(table.value(v, j, *descriptor.measure), descriptor);
}

// CSV `node,slice,measure,value,bin`. `bin` is empty when no item is emitted
// or the measure has no descriptor in the schema.
inline std::string write_measures_csv(const MeasureTable& table, const DynamicAttributedNetwork& net) {
  std::string out = "node,slice,measure,value,bin\n";
  const auto& schema = net.schema();
  for (NodeId v = 0; v < table.node_count(); ++v) {
    for (SliceIndex j = 0; j < table.num_slices(); ++j) {
      for (const auto m : kAllMeasures) {
        std::string bin;
        if (const auto id = schema.for_measure(m)) {
          if (const auto item = measure_item(table, v, j, schema.at(*id))) bin = schema.at(*id).bins.label(item->bin);
        }
        out += text::csv_escape(net.label(v)) + "," + std::to_string(j) + "," + std::string(measure_name(m)) + "," +
               text::format_number(table.value(v, j, m)) + "," + text::csv_escape(bin) + "\n";
      }
    }
  }
  return out;
}

}  // namespace commchar
