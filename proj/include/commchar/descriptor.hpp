#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "commchar/config.hpp"
#include "commchar/error.hpp"
#include "commchar/text.hpp"

namespace commchar {

using DescriptorId = std::uint32_t;

enum class DescriptorKind { attribute, topological };

// The six per-node, per-slice topological measures.
enum class Measure : std::uint8_t {
  degree = 0,
  internal_degree,
  transitivity,
  z_score,
  participation,
  embeddedness,
};

inline constexpr std::size_t kMeasureCount = 6;
inline constexpr std::array<Measure, kMeasureCount> kAllMeasures = {
    Measure::degree,        Measure::internal_degree, Measure::transitivity,
    Measure::z_score,       Measure::participation,   Measure::embeddedness};

inline std::string_view measure_name(Measure m) {
  static constexpr std::array<std::string_view, kMeasureCount> names = {
      "degree", "internal_degree", "transitivity", "z_score", "participation", "embeddedness"};
  return names[static_cast<std::size_t>(m)];
}

inline std::optional<Measure> measure_from_name(std::string_view name) {
  for (const auto m : kAllMeasures)
    if (measure_name(m) == name) return m;
  return std::nullopt;
}

inline std::string_view kind_name(DescriptorKind k) {
  return k == DescriptorKind::attribute ? "attribute" : "topological";
}

// Discrete domain of a descriptor: thresholds t0 < t1 < ... split the real
// line into (-inf, t0], (t0, t1], ..., (t_last, +inf). A value equal to a
// threshold falls in the lower bin.
class Bins {
public:
  Bins() : labels_{"all"} {}

  explicit Bins(std::vector<double> thresholds, std::vector<std::string> labels = {})
      : thresholds_(std::move(thresholds)), labels_(std::move(labels)) {
    for (std::size_t i = 0; i < thresholds_.size(); ++i) {
      if (!std::isfinite(thresholds_[i])) throw SchemaError("bin thresholds must be finite");
      if (i > 0 && !(thresholds_[i - 1] < thresholds_[i]))
        throw SchemaError("bin thresholds must be strictly increasing");
    }
    if (labels_.empty()) labels_ = default_labels(thresholds_);
    if (labels_.size() != thresholds_.size() + 1)
      throw SchemaError("expected " + std::to_string(thresholds_.size() + 1) + " bin labels, got " +
                        std::to_string(labels_.size()));
    std::set<std::string> seen;
    for (const auto& label : labels_) {
      if (label.empty() || label.find_first_of(",()\t\n\r") != std::string::npos)
        throw SchemaError("invalid bin label '" + label + "'");
      if (!seen.insert(label).second) throw SchemaError("duplicate bin label '" + label + "'");
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<double>& thresholds() const { return thresholds_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t bin) const { return labels_.at(bin); }

  std::size_t index_of(double value) const {
    return static_cast<std::size_t>(std::lower_bound(thresholds_.begin(), thresholds_.end(), value) -
                                    thresholds_.begin());
  }

  std::optional<std::size_t> find_label(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

  static std::vector<std::string> default_labels(const std::vector<double>& t) {
    if (t.empty()) return {"all"};
    std::vector<std::string> out;
    out.push_back("<=" + text::format_number(t.front()));
    for (std::size_t i = 1; i < t.size(); ++i)
      out.push_back(text::format_number(t[i - 1]) + "-" + text::format_number(t[i]));
    out.push_back(">" + text::format_number(t.back()));
    return out;
  }

  friend bool operator==(const Bins&, const Bins&) = default;

private:
  std::vector<double> thresholds_;
  std::vector<std::string> labels_;
};

struct Descriptor {
  DescriptorId id = 0;
  std::string name;
  DescriptorKind kind = DescriptorKind::attribute;
  std::optional<Measure> measure;  // set iff kind == topological
  Bins bins;

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

inline Bins default_measure_bins(Measure m) {
  switch (m) {
    case Measure::degree:
    case Measure::internal_degree: return Bins({3, 10, 30});
    case Measure::transitivity: return Bins({0.35, 0.5, 0.7});
    case Measure::z_score: return Bins({2.5});
    case Measure::participation: return Bins({0.05, 0.6, 0.8});
    case Measure::embeddedness: return Bins({0.3, 0.7});
  }
  return Bins();
}

// Per-venue publication counts: 1, 2, 3, 4, and 5 or more.
inline Bins default_attribute_bins() { return Bins({1, 2, 3, 4}, {"1", "2", "3", "4", "5+"}); }

// Total publication counts.
inline Bins total_count_bins() { return Bins({5, 10, 20, 50}); }

inline std::optional<Bins> attribute_preset(std::string_view name) {
  if (name == "venue") return default_attribute_bins();
  if (name == "total") return total_count_bins();
  return std::nullopt;
}

inline void validate_descriptor_name(const std::string& name) {
  if (name.empty() || name.find_first_of("=,()\t\n\r#") != std::string::npos || text::trim(name) != name)
    throw SchemaError("invalid descriptor name '" + name + "'");
}

// Catalog of every descriptor. Ids equal positions. Topological descriptors
// come first in measure order, then attributes in declaration order, which
// fixes the canonical (descriptor, bin) item order.
class DescriptorSchema {
public:
  DescriptorSchema() = default;

  // `theta` may be left unset; loaders then infer it from the data.
  DescriptorSchema(std::optional<std::size_t> theta, std::vector<Descriptor> topological,
                   std::vector<Descriptor> attributes)
      : theta_(theta) {
    if (theta_ && *theta_ == 0) throw SchemaError("theta must be >= 1");
    std::stable_sort(topological.begin(), topological.end(), [](const auto& a, const auto& b) {
      return static_cast<int>(*a.measure) < static_cast<int>(*b.measure);
    });
    std::set<std::string> names;
    std::set<Measure> measures;
    for (auto* group : {&topological, &attributes}) {
      for (auto& d : *group) {
        validate_descriptor_name(d.name);
        if (!names.insert(d.name).second) throw SchemaError("duplicate descriptor '" + d.name + "'");
        if (d.kind == DescriptorKind::topological) {
          if (!d.measure) throw SchemaError("topological descriptor '" + d.name + "' has no measure");
          if (!measures.insert(*d.measure).second)
            throw SchemaError("measure '" + std::string(measure_name(*d.measure)) + "' declared twice");
        } else {
          d.measure.reset();
          if (!d.bins.thresholds().empty() && d.bins.thresholds().front() <= 0)
            throw SchemaError("attribute '" + d.name + "' thresholds must be positive (zero emits no item)");
        }
        d.id = static_cast<DescriptorId>(descriptors_.size());
        descriptors_.push_back(std::move(d));
      }
    }
  }

  // All six measures with their default bins and no attributes.
  static DescriptorSchema with_default_measures(std::optional<std::size_t> theta,
                                                std::vector<Descriptor> attributes = {}) {
    std::vector<Descriptor> topo;
    for (const auto m : kAllMeasures)
      topo.push_back(Descriptor{0, std::string(measure_name(m)), DescriptorKind::topological, m, default_measure_bins(m)});
    for (auto& a : attributes) a.kind = DescriptorKind::attribute;
    return DescriptorSchema(theta, std::move(topo), std::move(attributes));
  }

  std::optional<std::size_t> theta() const { return theta_; }
  void set_theta(std::size_t theta) {
    if (theta == 0) throw SchemaError("theta must be >= 1");
    theta_ = theta;
  }

  std::size_t size() const { return descriptors_.size(); }
  const std::vector<Descriptor>& descriptors() const { return descriptors_; }
  const Descriptor& at(DescriptorId id) const { return descriptors_.at(id); }

  std::optional<DescriptorId> find(std::string_view name) const {
    for (const auto& d : descriptors_)
      if (d.name == name) return d.id;
    return std::nullopt;
  }

  std::optional<DescriptorId> for_measure(Measure m) const {
    for (const auto& d : descriptors_)
      if (d.measure == m) return d.id;
    return std::nullopt;
  }

  std::vector<DescriptorId> attribute_ids() const { return ids_of(DescriptorKind::attribute); }
  std::vector<DescriptorId> topological_ids() const { return ids_of(DescriptorKind::topological); }

  friend bool operator==(const DescriptorSchema&, const DescriptorSchema&) = default;

private:
  std::vector<DescriptorId> ids_of(DescriptorKind kind) const {
    std::vector<DescriptorId> out;
    for (const auto& d : descriptors_)
      if (d.kind == kind) out.push_back(d.id);
    return out;
  }

  std::optional<std::size_t> theta_;
  std::vector<Descriptor> descriptors_;
};

namespace detail {

inline Bins bins_from_section(const ConfigDocument::Section& section, const Bins& fallback) {
  const auto where = "[" + section.name + "]";
  std::vector<double> thresholds;
  std::vector<std::string> labels;
  const auto* bins = section.find("bins");
  const auto* label_entry = section.find("labels");
  if (!bins) {
    if (label_entry) throw SchemaError(where + ": 'labels' given without 'bins'");
    return fallback;
  }
  for (const auto& item : ConfigDocument::list(bins->value)) {
    const auto v = text::to_double(item);
    if (!v) throw SchemaError(where + ": bad bin threshold '" + item + "'");
    thresholds.push_back(*v);
  }
  if (label_entry) labels = ConfigDocument::list(label_entry->value);
  try {
    return Bins(std::move(thresholds), std::move(labels));
  } catch (const SchemaError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

}  // namespace detail

// Reads `theta`, `topological` and every `[descriptor.<name>]` section.
//
//   theta = 10
//   topological = all            # or "none", or a list of measure names
//   [descriptor.degree]
//   kind = topological           # the default for measure names; measure defaults to the section name
//   bins = 3, 10, 30
//   [descriptor.ICML]
//   kind = attribute
//   bins = 1, 2, 3, 4
//   labels = 1, 2, 3, 4, 5+
//   [descriptor.total]
//   preset = total               # venue (1,2,3,4,5+) or total (5,10,20,50)
inline DescriptorSchema parse_schema(const ConfigDocument& doc) {
  std::optional<std::size_t> theta;
  if (const auto* e = doc.top().find("theta")) {
    const auto v = text::to_int(e->value);
    if (!v || *v < 1) throw SchemaError("theta must be a positive integer, got '" + e->value + "'");
    theta = static_cast<std::size_t>(*v);
  }
  std::set<Measure> wanted(kAllMeasures.begin(), kAllMeasures.end());
  if (const auto* e = doc.top().find("topological")) {
    wanted.clear();
    const auto items = ConfigDocument::list(e->value);
    if (!(items.size() == 1 && items[0] == "none")) {
      for (const auto& name : items) {
        if (name == "all") {
          wanted.insert(kAllMeasures.begin(), kAllMeasures.end());
          continue;
        }
        const auto m = measure_from_name(name);
        if (!m) throw SchemaError("unknown topological measure '" + name + "'");
        wanted.insert(*m);
      }
    }
  }

  std::vector<Descriptor> topo;
  std::vector<Descriptor> attrs;
  std::set<Measure> declared;
  constexpr std::string_view prefix = "descriptor.";
  for (const auto& section : doc.sections()) {
    if (section.name.empty()) continue;
    if (!section.name.starts_with(prefix)) continue;
    const auto name = section.name.substr(prefix.size());
    const auto* kind = section.find("kind");
    // sections named after a measure are topological unless stated otherwise
    const std::string kind_value = kind ? kind->value : measure_from_name(name) ? "topological" : "attribute";
    for (const auto& entry : section.entries) {
      if (entry.key != "kind" && entry.key != "bins" && entry.key != "labels" && entry.key != "measure" &&
          entry.key != "preset")
        throw SchemaError("[" + section.name + "]: unknown key '" + entry.key + "'");
    }
    if (kind_value == "topological") {
      if (section.find("preset")) throw SchemaError("[" + section.name + "]: 'preset' only applies to attributes");
      const auto* measure_entry = section.find("measure");
      const auto measure = measure_from_name(measure_entry ? measure_entry->value : name);
      if (!measure) throw SchemaError("[" + section.name + "]: unknown measure");
      declared.insert(*measure);
      topo.push_back(Descriptor{0, name, DescriptorKind::topological, *measure,
                                detail::bins_from_section(section, default_measure_bins(*measure))});
    } else if (kind_value == "attribute") {
      if (section.find("measure")) throw SchemaError("[" + section.name + "]: 'measure' only applies to topological descriptors");
      auto fallback = default_attribute_bins();
      if (const auto* preset = section.find("preset")) {
        const auto bins = attribute_preset(preset->value);
        if (!bins) throw SchemaError("[" + section.name + "]: unknown preset '" + preset->value + "'");
        if (section.find("bins")) throw SchemaError("[" + section.name + "]: 'preset' and 'bins' are exclusive");
        fallback = *bins;
      }
      attrs.push_back(Descriptor{0, name, DescriptorKind::attribute, std::nullopt,
                                 detail::bins_from_section(section, fallback)});
    } else {
      throw SchemaError("[" + section.name + "]: kind must be 'attribute' or 'topological'");
    }
  }
  for (const auto m : kAllMeasures) {
    if (wanted.count(m) && !declared.count(m))
      topo.push_back(Descriptor{0, std::string(measure_name(m)), DescriptorKind::topological, m, default_measure_bins(m)});
  }
  return DescriptorSchema(theta, std::move(topo), std::move(attrs));
}

inline DescriptorSchema load_schema(const std::string& path) {
  return parse_schema(ConfigDocument::parse(text::read_file(path), path));
}

// Writes the schema back in the format read by parse_schema. Every
// descriptor is written explicitly so defaults do not need to be re-applied.
inline std::string write_schema(const DescriptorSchema& schema) {
  std::string out;
  if (schema.theta()) out += "theta = " + std::to_string(*schema.theta()) + "\n";
  out += "topological = none\n";
  for (const auto& d : schema.descriptors()) {
    out += "\n[descriptor." + d.name + "]\n";
    out += "kind = " + std::string(kind_name(d.kind)) + "\n";
    if (d.measure && measure_name(*d.measure) != d.name)
      out += "measure = " + std::string(measure_name(*d.measure)) + "\n";
    out += "bins = [";
    for (std::size_t i = 0; i < d.bins.thresholds().size(); ++i)
      out += (i ? ", " : "") + text::format_number(d.bins.thresholds()[i]);
    out += "]\nlabels = [";
    for (std::size_t i = 0; i < d.bins.size(); ++i) out += (i ? ", " : "") + ConfigDocument::quote(d.bins.label(i));
    out += "]\n";
  }
  return out;
}

}  // namespace commchar
