#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "commchar/community.hpp"
#include "commchar/descriptor.hpp"
#include "commchar/measures.hpp"
#include "commchar/network.hpp"
#include "commchar/parallel.hpp"
#include "commchar/sequence.hpp"
#include "commchar/text.hpp"

namespace commchar {

// A node's itemsets in time order; empty itemsets are not stored and
// `slices[i]` keeps the slice each element came from.
struct NodeSequence {
  std::vector<Itemset> elements;
  std::vector<SliceIndex> slices;

  std::size_t size() const { return elements.size(); }
  bool empty() const { return elements.empty(); }
  friend bool operator==(const NodeSequence&, const NodeSequence&) = default;
};

struct SequenceEntry {
  NodeId node = 0;
  CommunityId community = 0;
  NodeSequence sequence;
  friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

// One entry per node (entry i describes node i), tagged with its community.
class SequenceDatabase {
public:
  SequenceDatabase() = default;
  SequenceDatabase(DescriptorSchema schema, std::vector<std::string> labels, std::vector<SequenceEntry> entries)
      : schema_(std::move(schema)), labels_(std::move(labels)), entries_(std::move(entries)) {
    if (labels_.size() != entries_.size()) throw ConsistencyError("one label per entry expected");
    std::vector<CommunityId> assignment;
    assignment.reserve(entries_.size());
    for (NodeId v = 0; v < entries_.size(); ++v) {
      if (entries_[v].node != v) throw ConsistencyError("entry order must follow node ids");
      for (std::size_t i = 0; i < entries_[v].sequence.size(); ++i) {
        const auto& element = entries_[v].sequence.elements[i];
        if (element.empty()) throw ConsistencyError("empty element in sequence of '" + labels_[v] + "'");
        if (i > 0 && entries_[v].sequence.slices[i - 1] >= entries_[v].sequence.slices[i])
          throw ConsistencyError("slice indices must increase in sequence of '" + labels_[v] + "'");
        for (const auto& item : element)
          if (item.descriptor >= schema_.size() || item.bin >= schema_.at(item.descriptor).bins.size())
            throw SchemaError("item outside the descriptor catalog in sequence of '" + labels_[v] + "'");
      }
      if (entries_[v].sequence.slices.size() != entries_[v].sequence.elements.size())
        throw ConsistencyError("slice provenance missing in sequence of '" + labels_[v] + "'");
      assignment.push_back(entries_[v].community);
    }
    communities_ = CommunityStructure(std::move(assignment));
  }

  const DescriptorSchema& schema() const { return schema_; }
  const std::vector<SequenceEntry>& entries() const { return entries_; }
  const SequenceEntry& entry(NodeId v) const { return entries_.at(v); }
  const std::vector<Itemset>& sequence(NodeId v) const { return entries_.at(v).sequence.elements; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(NodeId v) const { return labels_.at(v); }
  const CommunityStructure& communities() const { return communities_; }

  friend bool operator==(const SequenceDatabase& a, const SequenceDatabase& b) {
    return a.schema_ == b.schema_ && a.labels_ == b.labels_ && a.entries_ == b.entries_;
  }

private:
  DescriptorSchema schema_;
  std::vector<std::string> labels_;
  std::vector<SequenceEntry> entries_;
  CommunityStructure communities_;
};

// Itemset of node v in slice j: topological items (none when v is isolated
// in j) followed by the non-zero attribute items, in descriptor order.
inline Itemset slice_itemset(const DynamicAttributedNetwork& net, const MeasureTable& table, NodeId v, SliceIndex j) {
  std::vector<Item> items;
  for (const auto& d : net.schema().descriptors()) {
    const auto item = d.kind == DescriptorKind::topological ? measure_item(table, v, j, d)
                                                            : discretize(net.attribute(v, j, d.id), d);
    if (item) items.push_back(*item);
  }
  return Itemset(std::move(items));
}

inline SequenceDatabase build_database(const DynamicAttributedNetwork& net, const MeasureTable& table,
                                       const CommunityStructure& cs, unsigned threads = 1) {
  if (table.node_count() != net.node_count() || table.num_slices() != net.num_slices())
    throw ConsistencyError("measure table does not cover the network");
  if (cs.node_count() != net.node_count()) throw UnassignedNode("partition does not cover the network");
  std::vector<SequenceEntry> entries(net.node_count());
  parallel_for(net.node_count(), threads, [&](std::size_t i) {
    const auto v = static_cast<NodeId>(i);
    auto& entry = entries[v];
    entry.node = v;
    entry.community = cs.community_of(v);
    for (SliceIndex j = 0; j < net.num_slices(); ++j) {
      auto itemset = slice_itemset(net, table, v, j);
      if (itemset.empty()) continue;
      entry.sequence.elements.push_back(std::move(itemset));
      entry.sequence.slices.push_back(j);
    }
  });
  return SequenceDatabase(net.schema(), net.labels(), std::move(entries));
}

// `name=label`
inline std::string format_item(const DescriptorSchema& schema, const Item& item) {
  const auto& d = schema.at(item.descriptor);
  return d.name + "=" + d.bins.label(item.bin);
}

// `(a=x,b=y)(c=z)`
inline std::string format_sequence(const DescriptorSchema& schema, std::span<const Itemset> seq) {
  std::string out;
  for (const auto& element : seq) {
    out.push_back('(');
    bool first = true;
    for (const auto& item : element) {
      if (!first) out.push_back(',');
      out += format_item(schema, item);
      first = false;
    }
    out.push_back(')');
  }
  return out;
}

inline std::vector<std::vector<std::pair<std::string, std::string>>> split_sequence_text(std::string_view text,
                                                                                       const std::string& where) {
  std::vector<std::vector<std::pair<std::string, std::string>>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '(') throw ParseError(where + ": expected '(' in sequence");
    const auto close = text.find(')', i);
    if (close == std::string_view::npos) throw ParseError(where + ": unterminated itemset");
    auto& element = out.emplace_back();
    const auto body = text.substr(i + 1, close - i - 1);
    if (body.empty()) throw ParseError(where + ": empty itemset");
    for (auto token : text::split(body, ',')) {
      const auto eq = token.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == token.size())
        throw ParseError(where + ": malformed item '" + std::string(token) + "'");
      element.emplace_back(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)));
    }
    i = close + 1;
  }
  return out;
}

inline Sequence parse_sequence(const DescriptorSchema& schema, std::string_view text, const std::string& where = "<sequence>") {
  Sequence out;
  for (const auto& element : split_sequence_text(text, where)) {
    std::vector<Item> items;
    for (const auto& [name, label] : element) {
      const auto d = schema.find(name);
      if (!d) throw SchemaError(where + ": unknown descriptor '" + name + "'");
      const auto bin = schema.at(*d).bins.find_label(label);
      if (!bin) throw SchemaError(where + ": unknown bin '" + label + "' for descriptor '" + name + "'");
      items.push_back(Item{*d, static_cast<std::uint32_t>(*bin)});
    }
    try {
      out.emplace_back(std::move(items));
    } catch (const ConsistencyError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

// Serialized form: optional `#` header lines describing the catalog, then
// one line per node `label<TAB>community<TAB>(item,...)(item,...)`.
//   #theta<TAB>10
//   #descriptor<TAB>name<TAB>attribute|<measure><TAB>t0,t1,..<TAB>label0,label1,..
inline std::string write_database(const SequenceDatabase& db) {
  std::string out;
  const auto& schema = db.schema();
  if (schema.theta()) out += "#theta\t" + std::to_string(*schema.theta()) + "\n";
  for (const auto& d : schema.descriptors()) {
    out += "#descriptor\t" + d.name + "\t" +
           (d.measure ? std::string(measure_name(*d.measure)) : std::string("attribute")) + "\t";
    for (std::size_t i = 0; i < d.bins.thresholds().size(); ++i)
      out += (i ? "," : "") + text::format_number(d.bins.thresholds()[i]);
    out += "\t";
    for (std::size_t i = 0; i < d.bins.size(); ++i) out += (i ? "," : "") + d.bins.label(i);
    out += "\n";
  }
  for (const auto& e : db.entries())
    out += db.label(e.node) + "\t" + std::to_string(e.community) + "\t" + format_sequence(schema, e.sequence.elements) + "\n";
  return out;
}

// Reads write_database output. Without header lines the catalog is
// reconstructed from the items seen: descriptors sorted by name, bins by
// label. Slice provenance is not part of the format; element i is given
// slice i on reload.
inline SequenceDatabase parse_database(std::string_view content, const std::string& origin = "<database>") {
  std::optional<std::size_t> theta;
  std::vector<Descriptor> topo;
  std::vector<Descriptor> attrs;
  bool has_catalog = false;
  struct Row {
    std::string label;
    CommunityId community;
    std::vector<std::vector<std::pair<std::string, std::string>>> items;
  };
  std::vector<Row> rows;
  int line_no = 0;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no);
    const auto f = text::split(line, '\t');
    if (f[0] == "#theta") {
      const auto v = f.size() == 2 ? text::to_int(f[1]) : std::nullopt;
      if (!v || *v < 1) throw ParseError(where + ": bad #theta line");
      theta = static_cast<std::size_t>(*v);
      continue;
    }
    if (f[0] == "#descriptor") {
      if (f.size() != 5) throw ParseError(where + ": bad #descriptor line");
      has_catalog = true;
      std::vector<double> thresholds;
      for (auto t : text::split(f[3], ',')) {
        if (text::trim(t).empty()) continue;
        const auto v = text::to_double(t);
        if (!v) throw ParseError(where + ": bad threshold '" + std::string(t) + "'");
        thresholds.push_back(*v);
      }
      std::vector<std::string> labels;
      for (auto l : text::split(f[4], ',')) labels.emplace_back(l);
      Descriptor d{0, std::string(f[1]), DescriptorKind::attribute, std::nullopt, Bins(thresholds, labels)};
      if (f[2] != "attribute") {
        const auto m = measure_from_name(f[2]);
        if (!m) throw ParseError(where + ": unknown measure '" + std::string(f[2]) + "'");
        d.kind = DescriptorKind::topological;
        d.measure = m;
        topo.push_back(std::move(d));
      } else {
        attrs.push_back(std::move(d));
      }
      continue;
    }
    if (f.size() != 3) throw ParseError(where + ": expected node<TAB>community<TAB>sequence");
    const auto c = text::to_int(f[1]);
    if (!c || *c < 0 || *c > UINT32_MAX) throw ParseError(where + ": bad community '" + std::string(f[1]) + "'");
    rows.push_back(Row{std::string(f[0]), static_cast<CommunityId>(*c), split_sequence_text(f[2], where)});
  }

  DescriptorSchema schema;
  if (has_catalog) {
    schema = DescriptorSchema(theta, std::move(topo), std::move(attrs));
  } else {
    std::map<std::string, std::set<std::string>> seen;
    for (const auto& row : rows)
      for (const auto& element : row.items)
        for (const auto& [name, label] : element) seen[name].insert(label);
    for (auto& [name, labels] : seen) {
      std::vector<double> thresholds;
      for (std::size_t i = 1; i < labels.size(); ++i) thresholds.push_back(static_cast<double>(i));
      attrs.push_back(Descriptor{0, name, DescriptorKind::attribute, std::nullopt,
                                 Bins(thresholds, std::vector<std::string>(labels.begin(), labels.end()))});
    }
    schema = DescriptorSchema(theta, {}, std::move(attrs));
  }

  std::vector<std::string> labels;
  std::vector<SequenceEntry> entries;
  std::set<std::string> unique;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (!unique.insert(row.label).second) throw ParseError(origin + ": node '" + row.label + "' listed twice");
    SequenceEntry entry{static_cast<NodeId>(i), row.community, {}};
    for (std::size_t k = 0; k < row.items.size(); ++k) {
      std::vector<Item> items;
      for (const auto& [name, label] : row.items[k]) {
        const auto d = schema.find(name);
        if (!d) throw SchemaError(origin + ": unknown descriptor '" + name + "'");
        const auto bin = schema.at(*d).bins.find_label(label);
        if (!bin) throw SchemaError(origin + ": unknown bin '" + label + "' for '" + name + "'");
        items.push_back(Item{*d, static_cast<std::uint32_t>(*bin)});
      }
      entry.sequence.elements.emplace_back(std::move(items));
      entry.sequence.slices.push_back(k);
    }
    labels.push_back(std::move(row.label));
    entries.push_back(std::move(entry));
  }
  return SequenceDatabase(std::move(schema), std::move(labels), std::move(entries));
}

inline SequenceDatabase load_database(const std::string& path) { return parse_database(text::read_file(path), path); }

}  // namespace commchar
