#pragma once

#include <map>
#include <set>
#include <vector>

#include "commchar/mining.hpp"

namespace commchar {

inline constexpr std::size_t kOracleMaxSequenceLength = 6;
inline constexpr std::size_t kOracleMaxAlphabet = 12;

// Exhaustive reference miner for small communities. All frequent patterns
// are enumerated level by level (every frequent pattern with k+1 items is a
// single-item insertion into one with k items) and supports come from
// direct subsequence scans. Closed: no single-item insertion keeps the
// support. Maximal: no single-item insertion is frequent. Shares no code
// with the prefix-growth miner beyond the subsequence relation.
inline std::vector<Pattern> brute_force_mine(const SequenceDatabase& db, CommunityId community,
                                             const MiningOptions& options = {}) {
  detail::validate_mining(db, community, options);
  const auto& members = db.communities().members(community);
  std::set<Item> alphabet;
  for (const auto v : members) {
    if (db.sequence(v).size() > kOracleMaxSequenceLength)
      throw OracleTooLarge("sequence of '" + db.label(v) + "' is longer than " + std::to_string(kOracleMaxSequenceLength));
    for (const auto& element : db.sequence(v)) alphabet.insert(element.begin(), element.end());
  }
  if (alphabet.size() > kOracleMaxAlphabet)
    throw OracleTooLarge("community alphabet has " + std::to_string(alphabet.size()) + " items, limit is " +
                         std::to_string(kOracleMaxAlphabet));

  const auto frequent = [&](const std::vector<NodeId>& s) {
    return options.min_sup.reached_by(static_cast<std::int64_t>(s.size()), static_cast<std::int64_t>(members.size()));
  };

  // Every frequent pattern with its supporters. By anti-monotonicity a
  // frequent (or equally supported) super-sequence exists iff one exists
  // that is a single-item insertion, so both flags are settled while the
  // insertions of each pattern are enumerated.
  struct Entry {
    std::vector<NodeId> supporters;
    bool extended = false;  // some frequent single-item insertion
    bool absorbed = false;  // some single-item insertion with the same supporters
  };
  std::map<Sequence, Entry> all;
  std::set<Sequence> level;
  for (const auto& item : alphabet) {
    Sequence s{Itemset{item}};
    auto sup = supporters(s, members, db);
    if (frequent(sup)) {
      all.emplace(s, Entry{std::move(sup)});
      level.insert(std::move(s));
    }
  }
  std::map<Sequence, std::vector<NodeId>> infrequent;
  while (!level.empty()) {
    std::set<Sequence> next;
    for (const auto& base : level) {
      std::vector<Sequence> grown;
      for (const auto& item : alphabet) {
        for (std::size_t gap = 0; gap <= base.size(); ++gap) {
          Sequence s = base;
          s.insert(s.begin() + static_cast<std::ptrdiff_t>(gap), Itemset{item});
          grown.push_back(std::move(s));
        }
        for (std::size_t i = 0; i < base.size(); ++i) {
          if (base[i].contains(item)) continue;
          bool same_descriptor = false;
          for (const auto& other : base[i]) same_descriptor |= other.descriptor == item.descriptor;
          if (same_descriptor) continue;  // cannot occur in any database itemset
          auto items = base[i].items();
          items.push_back(item);
          Sequence s = base;
          s[i] = Itemset(std::move(items));
          grown.push_back(std::move(s));
        }
      }
      auto& entry = all.at(base);
      for (auto& s : grown) {
        if (infrequent.count(s)) continue;
        auto it = all.find(s);
        if (it == all.end()) {
          auto sup = supporters(s, members, db);
          if (!frequent(sup)) {
            infrequent.emplace(std::move(s), std::move(sup));
            continue;
          }
          next.insert(s);
          it = all.emplace(std::move(s), Entry{std::move(sup)}).first;
        }
        entry.extended = true;
        if (it->second.supporters.size() == entry.supporters.size()) entry.absorbed = true;
      }
    }
    level = std::move(next);
  }

  std::vector<Sequence> kept;
  for (const auto& [s, entry] : all)
    if (options.mode == MiningMode::closed ? !entry.absorbed : !entry.extended) kept.push_back(s);
  std::sort(kept.begin(), kept.end());

  const auto outside = complement_of(members, db);
  if (outside.empty()) throw EmptyComplement("community " + std::to_string(community) + " spans the whole network");
  std::vector<Pattern> out;
  for (auto& s : kept) out.push_back(make_pattern(std::move(s), community, members, outside, db));
  return out;
}

}  // namespace commchar
