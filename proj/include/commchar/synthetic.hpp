#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "commchar/descriptor.hpp"
#include "commchar/network.hpp"

namespace commchar {

// Planted-partition generator with a marker attribute. Nodes of the first
// group carry `marker` in at least `marker_share` of the slices; a few
// nodes elsewhere (`leak_nodes`) carry it once. `noise` is a uniform
// attribute every node carries with value 1..3.
struct PlantedParams {
  std::size_t groups = 3;
  std::size_t group_size = 40;
  std::size_t theta = 5;
  double p_in = 0.2;
  double p_out = 0.005;
  double marker_share = 0.6;
  std::size_t leak_nodes = 2;
  std::string marker = "x";
  std::string noise = "y";
};

struct PlantedNetwork {
  DynamicAttributedNetwork network;
  std::vector<std::uint32_t> group;  // ground-truth group per node id
};

inline DescriptorSchema planted_schema(const PlantedParams& p) {
  std::vector<Descriptor> attrs;
  attrs.push_back(Descriptor{0, p.marker, DescriptorKind::attribute, std::nullopt, default_attribute_bins()});
  attrs.push_back(Descriptor{0, p.noise, DescriptorKind::attribute, std::nullopt, default_attribute_bins()});
  return DescriptorSchema::with_default_measures(p.theta, std::move(attrs));
}

inline PlantedNetwork planted_network(const PlantedParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto schema = planted_schema(p);
  NetworkBuilder b(schema);
  PlantedNetwork out;
  const std::size_t n = p.groups * p.group_size;
  for (std::size_t v = 0; v < n; ++v) {
    const auto g = v / p.group_size;
    std::string label(1, static_cast<char>('a' + g % 26));
    const auto idx = std::to_string(v % p.group_size);
    label += std::string(idx.size() < 2 ? 2 - idx.size() : 0, '0') + idx;
    b.node(label);
    out.group.push_back(static_cast<std::uint32_t>(g));
  }
  for (std::size_t j = 0; j < p.theta; ++j) {
    b.touch_slice(j);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) {
        const double prob = out.group[u] == out.group[v] ? p.p_in : p.p_out;
        if (unit(rng) < prob) b.add_edge(j, static_cast<NodeId>(u), static_cast<NodeId>(v));
      }
  }
  const auto marker = *schema.find(p.marker);
  const auto noise = *schema.find(p.noise);
  const auto need = static_cast<std::size_t>(std::ceil(p.marker_share * static_cast<double>(p.theta)));
  std::uniform_int_distribution<int> noise_value(1, 3);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t j = 0; j < p.theta; ++j) b.set_attribute(static_cast<NodeId>(v), j, noise, noise_value(rng));
    if (out.group[v] == 0) {
      // a random `need`-subset of slices, then each remaining slice with probability 1/2
      std::vector<std::size_t> slices(p.theta);
      for (std::size_t j = 0; j < p.theta; ++j) slices[j] = j;
      std::shuffle(slices.begin(), slices.end(), rng);
      for (std::size_t k = 0; k < p.theta; ++k)
        if (k < need || unit(rng) < 0.5) b.set_attribute(static_cast<NodeId>(v), slices[k], marker, 1);
    }
  }
  // leak nodes: the first few nodes of the other groups, one slice each
  for (std::size_t k = 0; k < p.leak_nodes && p.group_size + k < n; ++k) {
    const auto v = static_cast<NodeId>(p.group_size + k * (n - p.group_size) / std::max<std::size_t>(1, p.leak_nodes));
    b.set_attribute(v, static_cast<SliceIndex>(k % p.theta), marker, 1);
  }
  out.network = std::move(b).build();
  return out;
}

}  // namespace commchar
