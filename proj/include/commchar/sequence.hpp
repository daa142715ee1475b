#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "commchar/descriptor.hpp"
#include "commchar/error.hpp"

namespace commchar {

// (descriptor, bin) pair. Ordered by descriptor id, then bin.
struct Item {
  DescriptorId descriptor = 0;
  std::uint32_t bin = 0;
  friend auto operator<=>(const Item&, const Item&) = default;
};

// Sorted, duplicate-free set of items with at most one item per descriptor.
class Itemset {
public:
  Itemset() = default;
  Itemset(std::initializer_list<Item> items) : Itemset(std::vector<Item>(items)) {}
  explicit Itemset(std::vector<Item> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    for (std::size_t i = 1; i < items_.size(); ++i)
      if (items_[i - 1].descriptor == items_[i].descriptor)
        throw ConsistencyError("itemset holds two items of descriptor " + std::to_string(items_[i].descriptor));
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const Item& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Item>& items() const { return items_; }

  // True when `subset` is contained in this itemset.
  bool includes(const Itemset& subset) const {
    return std::includes(items_.begin(), items_.end(), subset.items_.begin(), subset.items_.end());
  }
  bool contains(const Item& item) const { return std::binary_search(items_.begin(), items_.end(), item); }

  friend bool operator==(const Itemset&, const Itemset&) = default;
  friend auto operator<=>(const Itemset& a, const Itemset& b) { return a.items_ <=> b.items_; }

private:
  std::vector<Item> items_;
};

// Time-ordered list of itemsets; used for patterns.
using Sequence = std::vector<Itemset>;

inline std::size_t item_count(std::span<const Itemset> s) {
  std::size_t n = 0;
  for (const auto& e : s) n += e.size();
  return n;
}

// alpha is a subsequence of beta iff strictly increasing positions exist
// whose itemsets include alpha's itemsets in order. Leftmost greedy
// matching decides it. The empty sequence is a subsequence of everything.
inline bool is_subsequence(std::span<const Itemset> alpha, std::span<const Itemset> beta) {
  std::size_t j = 0;
  for (const auto& a : alpha) {
    while (j < beta.size() && !beta[j].includes(a)) ++j;
    if (j == beta.size()) return false;
    ++j;
  }
  return true;
}

}  // namespace commchar
