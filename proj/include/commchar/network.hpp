#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "commchar/descriptor.hpp"
#include "commchar/error.hpp"
#include "commchar/log.hpp"
#include "commchar/text.hpp"

namespace commchar {

using NodeId = std::uint32_t;
using SliceIndex = std::size_t;

struct Edge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected simple graph in CSR form with sorted neighbor lists.
class StaticGraph {
public:
  StaticGraph() = default;

  StaticGraph(std::size_t node_count, std::span<const Edge> edges) : offsets_(node_count + 1, 0) {
    for (const auto& e : edges) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) offsets_[i + 1] += offsets_[i];
    neighbors_.resize(offsets_.back());
    auto cursor = offsets_;
    for (const auto& e : edges) {
      neighbors_[cursor[e.u]++] = e.v;
      neighbors_[cursor[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < node_count; ++i)
      std::sort(neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  bool has_edge(NodeId a, NodeId b) const {
    const auto n = neighbors(a);
    check(b);
    return std::binary_search(n.begin(), n.end(), b);
  }

  void check(NodeId v) const {
    if (v >= node_count()) throw UnknownNode("node " + std::to_string(v) + " not in graph");
  }

private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

// Fixed node set, theta slices of undirected edges, per-slice attribute
// values. Immutable once built.
class DynamicAttributedNetwork {
public:
  std::size_t node_count() const { return labels_.size(); }
  std::size_t num_slices() const { return slices_.size(); }
  const DescriptorSchema& schema() const { return schema_; }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId v) const { return labels_.at(v); }
  std::optional<NodeId> find(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<Edge>& edges(SliceIndex j) const {
    check_slice(j);
    return slices_[j];
  }

  // Attribute value of (node, slice, descriptor); absent values are 0.
  double attribute(NodeId v, SliceIndex j, DescriptorId d) const {
    check_slice(j);
    const auto slot = attribute_slot_.at(d);
    if (slot < 0) throw SchemaError("descriptor '" + schema_.at(d).name + "' is not an attribute");
    return values_.at((static_cast<std::size_t>(v) * num_slices() + j) * attribute_count_ + static_cast<std::size_t>(slot));
  }

  void check_slice(SliceIndex j) const {
    if (j >= num_slices())
      throw IndexError("slice " + std::to_string(j) + " out of range (theta = " + std::to_string(num_slices()) + ")");
  }

private:
  friend class NetworkBuilder;

  DescriptorSchema schema_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::vector<Edge>> slices_;
  std::vector<int> attribute_slot_;  // descriptor id -> attribute column, -1 for topological
  std::size_t attribute_count_ = 0;
  std::vector<double> values_;
};

class NetworkBuilder {
public:
  explicit NetworkBuilder(DescriptorSchema schema) : schema_(std::move(schema)) {}

  NodeId node(std::string_view label) {
    if (const auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
    if (label.empty() || label.find_first_of("\t\n\r") != std::string_view::npos)
      throw ParseError("invalid node label '" + std::string(label) + "'");
    const auto id = static_cast<NodeId>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), id);
    return id;
  }

  std::optional<NodeId> find(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Returns false when the edge was already present in that slice.
  bool add_edge(SliceIndex slice, NodeId a, NodeId b) {
    check_slice(slice);
    check_node(a);
    check_node(b);
    if (a == b) throw ConsistencyError("self-loop on node '" + labels_[a] + "'");
    if (a > b) std::swap(a, b);
    if (slice >= edges_.size()) edges_.resize(slice + 1);
    const auto key = (static_cast<std::uint64_t>(a) << 32) | b;
    if (!edges_[slice].insert(key).second) {
      log::debug("duplicate_edge", "slice", slice, "src", labels_[a], "dst", labels_[b]);
      return false;
    }
    max_slice_ = std::max(max_slice_, slice + 1);
    return true;
  }

  void set_attribute(NodeId v, SliceIndex slice, DescriptorId d, double value) {
    check_slice(slice);
    check_node(v);
    if (d >= schema_.size()) throw SchemaError("unknown descriptor id " + std::to_string(d));
    if (schema_.at(d).kind != DescriptorKind::attribute)
      throw SchemaError("descriptor '" + schema_.at(d).name + "' is topological, not an attribute");
    if (!(value >= 0) || !std::isfinite(value))
      throw ConsistencyError("attribute values must be finite and non-negative");
    const AttrKey key{v, slice, d};
    if (!attributes_.emplace(key, value).second)
      throw ConsistencyError("duplicate value for node '" + labels_[v] + "', slice " + std::to_string(slice) +
                             ", descriptor '" + schema_.at(d).name + "'");
    max_slice_ = std::max(max_slice_, slice + 1);
  }

  // Declares that slice indices up to `slice` exist even if they carry no edges.
  void touch_slice(SliceIndex slice) {
    check_slice(slice);
    max_slice_ = std::max(max_slice_, slice + 1);
  }

  DynamicAttributedNetwork build() && {
    DynamicAttributedNetwork net;
    const std::size_t theta = schema_.theta().value_or(std::max<std::size_t>(1, max_slice_));
    if (!schema_.theta()) schema_.set_theta(theta);
    net.schema_ = std::move(schema_);
    net.labels_ = std::move(labels_);
    net.index_ = std::move(index_);
    net.slices_.resize(theta);
    for (std::size_t j = 0; j < edges_.size(); ++j) {
      auto& out = net.slices_[j];
      out.reserve(edges_[j].size());
      for (const auto key : edges_[j])
        out.push_back(Edge{static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu)});
      std::sort(out.begin(), out.end());
    }
    net.attribute_slot_.assign(net.schema_.size(), -1);
    for (const auto id : net.schema_.attribute_ids())
      net.attribute_slot_[id] = static_cast<int>(net.attribute_count_++);
    net.values_.assign(net.labels_.size() * theta * net.attribute_count_, 0.0);
    for (const auto& [key, value] : attributes_) {
      const auto slot = static_cast<std::size_t>(net.attribute_slot_[key.descriptor]);
      net.values_[(static_cast<std::size_t>(key.node) * theta + key.slice) * net.attribute_count_ + slot] = value;
    }
    return net;
  }

private:
  struct AttrKey {
    NodeId node;
    SliceIndex slice;
    DescriptorId descriptor;
    bool operator==(const AttrKey&) const = default;
  };
  struct AttrKeyHash {
    std::size_t operator()(const AttrKey& k) const {
      return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(k.node) << 32) ^ (k.slice << 16) ^ k.descriptor);
    }
  };

  void check_slice(SliceIndex slice) const {
    if (schema_.theta() && slice >= *schema_.theta())
      throw ConsistencyError("slice index " + std::to_string(slice) + " >= theta = " + std::to_string(*schema_.theta()));
  }
  void check_node(NodeId v) const {
    if (v >= labels_.size()) throw UnknownNode("node id " + std::to_string(v) + " not declared");
  }

  DescriptorSchema schema_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::unordered_set<std::uint64_t>> edges_;
  std::unordered_map<AttrKey, double, AttrKeyHash> attributes_;
  std::size_t max_slice_ = 0;
};

// Undirected simple graph of slice j over the full node set.
inline StaticGraph slice_graph(const DynamicAttributedNetwork& net, SliceIndex j) {
  return StaticGraph(net.node_count(), net.edges(j));
}

namespace detail {

inline void expect_header(std::string_view line, std::string_view expected, const std::string& path) {
  const auto fields = text::csv_fields(line);
  const auto want = text::split(expected, ',');
  bool ok = fields.size() == want.size();
  for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fields[i] == want[i];
  if (!ok) throw ParseError(path + ": expected header '" + std::string(expected) + "'");
}

inline SliceIndex parse_slice(const std::string& field, const std::string& where) {
  const auto v = text::to_int(field);
  if (!v || *v < 0) throw ParseError(where + ": bad slice index '" + field + "'");
  return static_cast<SliceIndex>(*v);
}

}  // namespace detail

// Edge CSV: header `slice,src,dst`, one undirected edge per row, 0-based
// slices. A row with an empty `dst` only declares `src` as a node. Node ids
// follow first appearance.
inline void read_edges_csv(NetworkBuilder& builder, std::string_view content, const std::string& path) {
  int line_no = 0;
  bool header = true;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (header) {
      detail::expect_header(line, "slice,src,dst", path);
      header = false;
      continue;
    }
    const auto where = path + ":" + std::to_string(line_no);
    const auto f = text::csv_fields(line);
    if (f.size() != 3 || f[1].empty()) throw ParseError(where + ": expected slice,src,dst");
    const auto slice = detail::parse_slice(f[0], where);
    try {
      const auto src = builder.node(f[1]);
      if (f[2].empty()) {
        builder.touch_slice(slice);
        continue;
      }
      builder.add_edge(slice, src, builder.node(f[2]));
    } catch (const ConsistencyError& e) {
      throw ConsistencyError(where + ": " + e.what());
    }
  }
}

// Attribute CSV: header `node,slice,descriptor,value`. Nodes must already be
// known from the edge file; descriptors must be declared attributes.
inline void read_attributes_csv(NetworkBuilder& builder, const DescriptorSchema& schema, std::string_view content,
                                const std::string& path) {
  int line_no = 0;
  bool header = true;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (header) {
      detail::expect_header(line, "node,slice,descriptor,value", path);
      header = false;
      continue;
    }
    const auto where = path + ":" + std::to_string(line_no);
    const auto f = text::csv_fields(line);
    if (f.size() != 4) throw ParseError(where + ": expected node,slice,descriptor,value");
    const auto node = builder.find(f[0]);
    if (!node) throw ConsistencyError(where + ": unknown node '" + f[0] + "'");
    const auto slice = detail::parse_slice(f[1], where);
    const auto d = schema.find(f[2]);
    if (!d || schema.at(*d).kind != DescriptorKind::attribute)
      throw SchemaError(where + ": undeclared attribute descriptor '" + f[2] + "'");
    const auto value = text::to_double(f[3]);
    if (!value) throw ParseError(where + ": bad value '" + f[3] + "'");
    try {
      builder.set_attribute(*node, slice, *d, *value);
    } catch (const ConsistencyError& e) {
      throw ConsistencyError(where + ": " + e.what());
    }
  }
}

inline DynamicAttributedNetwork parse_network(std::string_view edges_csv, std::string_view attrs_csv,
                                              const DescriptorSchema& schema, const std::string& edge_origin = "<edges>",
                                              const std::string& attr_origin = "<attributes>") {
  NetworkBuilder builder(schema);
  read_edges_csv(builder, edges_csv, edge_origin);
  read_attributes_csv(builder, schema, attrs_csv, attr_origin);
  return std::move(builder).build();
}

// `attr_path` may be empty: every attribute is then 0.
inline DynamicAttributedNetwork load_network(const std::string& edge_path, const std::string& attr_path,
                                             const DescriptorSchema& schema) {
  const auto edges = text::read_file(edge_path);
  const auto attrs = attr_path.empty() ? std::string() : text::read_file(attr_path);
  return parse_network(edges, attrs, schema, edge_path, attr_path);
}

inline std::string write_edges_csv(const DynamicAttributedNetwork& net) {
  std::string out = "slice,src,dst\n";
  // Every node is declared up front so ids keep their order on reload and
  // nodes without edges survive the round trip.
  for (NodeId v = 0; v < net.node_count(); ++v) out += "0," + text::csv_escape(net.label(v)) + ",\n";
  for (SliceIndex j = 0; j < net.num_slices(); ++j)
    for (const auto& e : net.edges(j))
      out += std::to_string(j) + "," + text::csv_escape(net.label(e.u)) + "," + text::csv_escape(net.label(e.v)) + "\n";
  if (net.num_slices() > 1 && net.node_count() > 0)
    out += std::to_string(net.num_slices() - 1) + "," + text::csv_escape(net.label(0)) + ",\n";
  return out;
}

inline std::string write_attributes_csv(const DynamicAttributedNetwork& net) {
  std::string out = "node,slice,descriptor,value\n";
  const auto ids = net.schema().attribute_ids();
  for (NodeId v = 0; v < net.node_count(); ++v)
    for (SliceIndex j = 0; j < net.num_slices(); ++j)
      for (const auto d : ids)
        if (const double value = net.attribute(v, j, d); value != 0)
          out += text::csv_escape(net.label(v)) + "," + std::to_string(j) + "," + net.schema().at(d).name + "," +
                 text::format_number(value) + "\n";
  return out;
}

}  // namespace commchar
