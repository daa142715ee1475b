#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "commchar/community.hpp"
#include "commchar/error.hpp"
#include "commchar/log.hpp"
#include "commchar/ratio.hpp"
#include "commchar/seqdb.hpp"
#include "commchar/sequence.hpp"

namespace commchar {

inline constexpr double kInfiniteGrowth = std::numeric_limits<double>::infinity();

struct Pattern {
  Sequence sequence;
  Ratio support;
  double growth_rate = 0;  // +inf when absent outside the community
  std::vector<NodeId> supporting_nodes;  // sorted, within the community
  CommunityId community = 0;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

// Canonical pattern order: lexicographic over itemsets.
inline bool canonical_less(const Pattern& a, const Pattern& b) { return a.sequence < b.sequence; }

enum class MiningMode { closed, maximal };

struct MiningOptions {
  Ratio min_sup{3, 10};
  MiningMode mode = MiningMode::closed;
  std::size_t max_length = 0;  // itemsets per pattern; 0 = unlimited
  std::size_t max_patterns = 100000;
  std::size_t min_community_size = 1;
};

// Nodes of `nodes` whose sequence contains `s`.
inline std::vector<NodeId> supporters(std::span<const Itemset> s, std::span<const NodeId> nodes, const SequenceDatabase& db) {
  std::vector<NodeId> out;
  for (const auto v : nodes)
    if (is_subsequence(s, db.sequence(v))) out.push_back(v);
  return out;
}

// sup(s, C) = |{v in C : s is a subsequence of v's sequence}| / |C|.
inline Ratio support(std::span<const Itemset> s, std::span<const NodeId> community, const SequenceDatabase& db) {
  if (community.empty()) throw EmptyCommunity("support over an empty community");
  return Ratio(static_cast<std::int64_t>(supporters(s, community, db).size()), static_cast<std::int64_t>(community.size()));
}

// Nodes of the database outside `community`.
inline std::vector<NodeId> complement_of(std::span<const NodeId> community, const SequenceDatabase& db) {
  std::vector<bool> inside(db.size(), false);
  for (const auto v : community) inside.at(v) = true;
  std::vector<NodeId> out;
  for (NodeId v = 0; v < db.size(); ++v)
    if (!inside[v]) out.push_back(v);
  return out;
}

// Gr from supporter counts: (in/|C|) / (out/|C'|), +inf when out = 0 < in,
// and 0 when in = 0.
inline double growth_from_counts(std::size_t in, std::size_t community_size, std::size_t out, std::size_t complement_size) {
  if (community_size == 0) throw EmptyCommunity("growth rate over an empty community");
  if (complement_size == 0) throw EmptyComplement("growth rate needs nodes outside the community");
  if (in == 0) return 0.0;
  if (out == 0) return kInfiniteGrowth;
  return (static_cast<double>(in) * static_cast<double>(complement_size)) /
         (static_cast<double>(out) * static_cast<double>(community_size));
}

// Gr(s, C) = sup(s, C) / sup(s, complement of C).
inline double growth_rate(std::span<const Itemset> s, std::span<const NodeId> community, const SequenceDatabase& db) {
  if (community.empty()) throw EmptyCommunity("growth rate over an empty community");
  const auto outside = complement_of(community, db);
  if (outside.empty()) throw EmptyComplement("growth rate needs nodes outside the community");
  return growth_from_counts(supporters(s, community, db).size(), community.size(), supporters(s, outside, db).size(),
                            outside.size());
}

// Fills supporters (full scan of the community), support and growth rate
// (scan of the complement) for a mined sequence.
inline Pattern make_pattern(Sequence sequence, CommunityId community, std::span<const NodeId> members,
                            std::span<const NodeId> outside, const SequenceDatabase& db) {
  Pattern p;
  p.sequence = std::move(sequence);
  p.community = community;
  p.supporting_nodes = supporters(p.sequence, members, db);
  p.support = Ratio(static_cast<std::int64_t>(p.supporting_nodes.size()), static_cast<std::int64_t>(members.size()));
  const auto out = supporters(p.sequence, outside, db).size();
  p.growth_rate = growth_from_counts(p.supporting_nodes.size(), members.size(), out, outside.size());
  return p;
}

namespace detail {

inline void validate_mining(const SequenceDatabase& db, CommunityId community, const MiningOptions& options) {
  if (!(Ratio(0, 1) < options.min_sup) || Ratio(1, 1) < options.min_sup)
    throw InvalidSupport("min_sup must lie in (0, 1], got " + options.min_sup.str());
  if (!db.communities().contains(community)) throw EmptyCommunity("community " + std::to_string(community) + " has no nodes");
  const auto size = db.communities().members(community).size();
  if (size < options.min_community_size)
    throw CommunityTooSmall("community " + std::to_string(community) + " has " + std::to_string(size) +
                            " nodes, minimum is " + std::to_string(options.min_community_size));
}

// Closed sequential pattern miner over one community.
//
// Items are recoded to dense codes preserving canonical item order and
// every itemset becomes a bitmask of `words_` 64-bit words. The search grows
// prefixes by i-extension (add an item larger than every item of the last
// itemset) and s-extension (append a new itemset). For each supporting
// sequence the projection keeps the leftmost end of the prefix without its
// last itemset (prev_end) and of the whole prefix (end).
//
// A prefix P is pruned when some item can be inserted into P outside P's
// own subtree such that every extension of P keeps the same supporters.
// With f_i the leftmost end of p_1..p_i and l_i the last occurrence of p_i
// before l_{i+1} (l_m = f_m), both taken per supporting sequence:
//   (a) a new itemset {y} before p_i, y in every sequence strictly between
//       f_{i-1} and l_i;
//   (b) y added to p_i (i < m), some element strictly between f_{i-1} and
//       l_{i+1} holding p_i and y;
//   (c) y < max(p_m) added to p_m, y in every element after f_{m-1} that
//       holds p_m.
// Extensions only move f_m and the l_i to the right, so the condition holds
// for every pattern of the subtree, each of which then has a super-sequence
// with equal support. No closed pattern is lost. Surviving prefixes without
// an equally supported forward extension are candidates; a final pass keeps
// those with no single-item insertion preserving all supporters.
class ClosedMiner {
public:
  using Word = std::uint64_t;
  using Code = std::uint32_t;

  ClosedMiner(const SequenceDatabase& db, std::span<const NodeId> members, const MiningOptions& options)
      : options_(options) {
    for (const auto v : members)
      for (const auto& element : db.sequence(v))
        for (const auto& item : element) alphabet_.push_back(item);
    std::sort(alphabet_.begin(), alphabet_.end());
    alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
    words_ = std::max<std::size_t>(1, (alphabet_.size() + 63) / 64);
    for (const auto v : members) {
      start_.push_back(length_.size() == 0 ? 0 : start_.back() + length_.back());
      length_.push_back(static_cast<std::uint32_t>(db.sequence(v).size()));
      for (const auto& element : db.sequence(v)) {
        const auto base = masks_.size();
        masks_.resize(base + words_, 0);
        for (const auto& item : element) set_bit(&masks_[base], code_of(item));
      }
    }
    const auto size = static_cast<std::int64_t>(members.size());
    // Smallest count c with c / size >= min_sup.
    min_count_ = static_cast<std::size_t>(
        (static_cast<__int128>(options_.min_sup.num()) * size + options_.min_sup.den() - 1) / options_.min_sup.den());
    min_count_ = std::max<std::size_t>(min_count_, 1);
    count_.assign(alphabet_.size(), 0);
    scratch_.assign(words_ * 4, 0);
  }

  std::vector<Sequence> run() {
    std::vector<Proj> root;
    for (Code y = 0; y < alphabet_.size(); ++y) {
      root.clear();
      for (std::uint32_t s = 0; s < length_.size(); ++s) {
        for (std::uint32_t j = 0; j < length_[s]; ++j) {
          if (has(element(s, j), y)) {
            root.push_back(Proj{s, -1, static_cast<std::int32_t>(j)});
            break;
          }
        }
      }
      if (root.size() < min_count_) continue;
      push_prefix();
      set_bit(prefix_at(0), y);
      grow(root);
      pop_prefix();
    }

    std::vector<Sequence> out;
    for (const auto& candidate : candidates_) {
      if (!is_closed(candidate)) continue;
      out.push_back(decode(candidate.pattern));
    }
    if (options_.mode == MiningMode::maximal) out = keep_maximal(std::move(out));
    if (out.size() > options_.max_patterns)
      throw PatternLimitExceeded(std::to_string(out.size()) + " patterns exceed the cap of " +
                                 std::to_string(options_.max_patterns));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t visited() const { return visited_; }

private:
  struct Proj {
    std::uint32_t seq;
    std::int32_t prev_end;  // leftmost end of the prefix minus its last itemset
    std::int32_t end;       // leftmost end of the prefix
  };
  struct Candidate {
    std::vector<Word> pattern;  // m itemsets of words_ words each
    std::vector<std::uint32_t> support;
  };

  static void set_bit(Word* mask, Code y) { mask[y / 64] |= Word{1} << (y % 64); }
  static bool has(const Word* mask, Code y) { return (mask[y / 64] >> (y % 64)) & 1u; }

  Code code_of(const Item& item) const {
    return static_cast<Code>(std::lower_bound(alphabet_.begin(), alphabet_.end(), item) - alphabet_.begin());
  }
  const Word* element(std::uint32_t s, std::int32_t j) const {
    return &masks_[(start_[s] + static_cast<std::size_t>(j)) * words_];
  }
  bool holds(const Word* element, const Word* subset) const {
    for (std::size_t w = 0; w < words_; ++w)
      if ((element[w] & subset[w]) != subset[w]) return false;
    return true;
  }
  bool any(const Word* mask) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (mask[w]) return true;
    return false;
  }
  Code highest(const Word* mask) const {
    for (std::size_t w = words_; w-- > 0;)
      if (mask[w]) return static_cast<Code>(w * 64 + 63 - static_cast<std::size_t>(std::countl_zero(mask[w])));
    return 0;
  }

  std::size_t prefix_size() const { return prefix_.size() / words_; }
  Word* prefix_at(std::size_t i) { return &prefix_[i * words_]; }
  void push_prefix() { prefix_.resize(prefix_.size() + words_, 0); }
  void pop_prefix() { prefix_.resize(prefix_.size() - words_); }

  // Adds one to count_[y] for every bit y of `mask`.
  void count_bits(const Word* mask) {
    for (std::size_t w = 0; w < words_; ++w)
      for (Word bits = mask[w]; bits; bits &= bits - 1)
        ++count_[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
  }

  void grow(const std::vector<Proj>& projs) {
    ++visited_;
    const auto m = prefix_size();
    if (options_.max_length && m > options_.max_length)
      throw PatternLimitExceeded("a frequent pattern is longer than the cap of " + std::to_string(options_.max_length) +
                                 " itemsets");
    if (prunable(projs)) return;

    const std::vector<Word> last(prefix_at(m - 1), prefix_at(m - 1) + words_);
    const Code last_max = highest(last.data());
    const auto n = static_cast<std::uint32_t>(projs.size());

    // Frequencies of i-extensions (items > last_max) and s-extensions.
    std::vector<Word> above(words_, 0);
    for (Code y = last_max + 1; y < alphabet_.size(); ++y) set_bit(above.data(), y);
    std::vector<Word> acc(words_);
    std::vector<std::uint32_t> i_count(alphabet_.size(), 0);
    std::fill(count_.begin(), count_.end(), 0);
    for (const auto& p : projs) {
      std::fill(acc.begin(), acc.end(), 0);
      for (auto j = p.prev_end + 1; j < static_cast<std::int32_t>(length_[p.seq]); ++j) {
        const auto* e = element(p.seq, j);
        if (!holds(e, last.data())) continue;
        for (std::size_t w = 0; w < words_; ++w) acc[w] |= e[w] & above[w];
      }
      count_bits(acc.data());
    }
    i_count.swap(count_);
    std::vector<std::uint32_t> s_count(alphabet_.size(), 0);
    count_.assign(alphabet_.size(), 0);
    for (const auto& p : projs) {
      std::fill(acc.begin(), acc.end(), 0);
      for (auto j = p.end + 1; j < static_cast<std::int32_t>(length_[p.seq]); ++j) {
        const auto* e = element(p.seq, j);
        for (std::size_t w = 0; w < words_; ++w) acc[w] |= e[w];
      }
      count_bits(acc.data());
    }
    s_count.swap(count_);
    count_.assign(alphabet_.size(), 0);

    bool forward_closed = true;
    for (Code y = 0; y < alphabet_.size(); ++y)
      if (i_count[y] == n || s_count[y] == n) forward_closed = false;
    if (forward_closed) {
      Candidate c{prefix_, {}};
      c.support.reserve(projs.size());
      for (const auto& p : projs) c.support.push_back(p.seq);
      candidates_.push_back(std::move(c));
    }

    std::vector<Proj> child;
    std::vector<Word> extended(words_);
    for (Code y = last_max + 1; y < alphabet_.size(); ++y) {
      if (i_count[y] < min_count_) continue;
      child.clear();
      std::copy(last.begin(), last.end(), extended.begin());
      set_bit(extended.data(), y);
      for (const auto& p : projs) {
        for (auto j = p.prev_end + 1; j < static_cast<std::int32_t>(length_[p.seq]); ++j) {
          if (holds(element(p.seq, j), extended.data())) {
            child.push_back(Proj{p.seq, p.prev_end, j});
            break;
          }
        }
      }
      std::copy(extended.begin(), extended.end(), prefix_at(m - 1));
      grow(child);
      std::copy(last.begin(), last.end(), prefix_at(m - 1));
    }
    for (Code y = 0; y < alphabet_.size(); ++y) {
      if (s_count[y] < min_count_) continue;
      child.clear();
      for (const auto& p : projs) {
        for (auto j = p.end + 1; j < static_cast<std::int32_t>(length_[p.seq]); ++j) {
          if (has(element(p.seq, j), y)) {
            child.push_back(Proj{p.seq, p.end, j});
            break;
          }
        }
      }
      push_prefix();
      set_bit(prefix_at(m), y);
      grow(child);
      pop_prefix();
    }
  }

  // Leftmost end positions f[0..m] (f[0] = -1) of each prefix of `pattern`.
  void leftmost(std::uint32_t s, const Word* pattern, std::size_t m, std::int32_t* f) const {
    f[0] = -1;
    std::int32_t j = 0;
    for (std::size_t i = 0; i < m; ++i) {
      while (!holds(element(s, j), pattern + i * words_)) ++j;
      f[i + 1] = j++;
    }
  }

  // Rightmost start positions r[1..m+1] (r[m+1] = length) of each suffix.
  void rightmost(std::uint32_t s, const Word* pattern, std::size_t m, std::int32_t* r) const {
    r[m + 1] = static_cast<std::int32_t>(length_[s]);
    std::int32_t j = r[m + 1] - 1;
    for (std::size_t i = m; i >= 1; --i) {
      while (!holds(element(s, j), pattern + (i - 1) * words_)) --j;
      r[i] = j--;
    }
  }

  // True when some bit survives `collect(k, acc)` intersected over every
  // k in [0, count); `collect` fills the items admitted by sequence k.
  template <typename Collect>
  bool common_item(std::size_t count, Collect&& collect) {
    Word* common = &scratch_[0];
    Word* acc = &scratch_[words_];
    std::fill(common, common + words_, ~Word{0});
    for (std::size_t k = 0; k < count; ++k) {
      std::fill(acc, acc + words_, 0);
      collect(k, acc);
      for (std::size_t w = 0; w < words_; ++w) common[w] &= acc[w];
      if (!any(common)) return false;
    }
    return count > 0;
  }

  bool prunable(const std::vector<Proj>& projs) {
    const auto m = prefix_size();
    const auto stride = m + 1;
    const Word* prefix = prefix_.data();
    f_.resize(projs.size() * stride);
    lf_.resize(projs.size() * stride);
    for (std::size_t k = 0; k < projs.size(); ++k) {
      const auto s = projs[k].seq;
      auto* f = &f_[k * stride];
      auto* lf = &lf_[k * stride];
      leftmost(s, prefix, m, f);
      lf[m] = f[m];
      for (std::size_t i = m - 1; i >= 1; --i) {
        auto j = lf[i + 1] - 1;
        while (!holds(element(s, j), prefix + (i - 1) * words_)) --j;
        lf[i] = j;
      }
    }
    const auto f = [&](std::size_t k, std::size_t i) { return f_[k * stride + i]; };
    const auto lf = [&](std::size_t k, std::size_t i) { return lf_[k * stride + i]; };

    for (std::size_t i = 1; i <= m; ++i) {
      // (a) new itemset before p_i
      if (common_item(projs.size(), [&](std::size_t k, Word* acc) {
            for (auto j = f(k, i - 1) + 1; j < lf(k, i); ++j) {
              const auto* e = element(projs[k].seq, j);
              for (std::size_t w = 0; w < words_; ++w) acc[w] |= e[w];
            }
          }))
        return true;
      // (b) item added to p_i, i < m
      const Word* pi = prefix + (i - 1) * words_;
      if (i < m && common_item(projs.size(), [&](std::size_t k, Word* acc) {
            for (auto j = f(k, i - 1) + 1; j < lf(k, i + 1); ++j) {
              const auto* e = element(projs[k].seq, j);
              if (!holds(e, pi)) continue;
              for (std::size_t w = 0; w < words_; ++w) acc[w] |= e[w] & ~pi[w];
            }
          }))
        return true;
    }
    // (c) item below max(p_m) present wherever p_m occurs after p_1..p_{m-1}
    const Word* last = prefix + (m - 1) * words_;
    const Code last_max = highest(last);
    Word* below = &scratch_[2 * words_];
    std::fill(below, below + words_, 0);
    for (Code y = 0; y < last_max; ++y)
      if (!has(last, y)) set_bit(below, y);
    if (!any(below)) return false;
    return common_item(projs.size(), [&](std::size_t k, Word* acc) {
      std::copy(below, below + words_, acc);
      const auto s = projs[k].seq;
      for (auto j = f(k, m - 1) + 1; j < static_cast<std::int32_t>(length_[s]); ++j) {
        const auto* e = element(s, j);
        if (!holds(e, last)) continue;
        for (std::size_t w = 0; w < words_; ++w) acc[w] &= e[w];
      }
    });
  }

  // No single-item insertion keeps every supporting sequence.
  bool is_closed(const Candidate& c) {
    const auto m = c.pattern.size() / words_;
    const auto stride = m + 2;
    const Word* pattern = c.pattern.data();
    std::vector<std::int32_t> f(c.support.size() * stride);
    std::vector<std::int32_t> r(c.support.size() * stride);
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      leftmost(c.support[k], pattern, m, &f[k * stride]);
      rightmost(c.support[k], pattern, m, &r[k * stride]);
    }
    for (std::size_t i = 1; i <= m + 1; ++i) {
      // new itemset before p_i (i = m + 1: after p_m)
      if (common_item(c.support.size(), [&](std::size_t k, Word* acc) {
            for (auto j = f[k * stride + i - 1] + 1; j < r[k * stride + i]; ++j) {
              const auto* e = element(c.support[k], j);
              for (std::size_t w = 0; w < words_; ++w) acc[w] |= e[w];
            }
          }))
        return false;
      if (i > m) break;
      // item added to p_i
      const Word* pi = pattern + (i - 1) * words_;
      if (common_item(c.support.size(), [&](std::size_t k, Word* acc) {
            for (auto j = f[k * stride + i - 1] + 1; j < r[k * stride + i + 1]; ++j) {
              const auto* e = element(c.support[k], j);
              if (!holds(e, pi)) continue;
              for (std::size_t w = 0; w < words_; ++w) acc[w] |= e[w] & ~pi[w];
            }
          }))
        return false;
    }
    return true;
  }

  std::vector<Sequence> keep_maximal(std::vector<Sequence> closed) const {
    std::vector<std::size_t> sizes;
    for (const auto& s : closed) sizes.push_back(item_count(s));
    std::vector<Sequence> out;
    for (std::size_t a = 0; a < closed.size(); ++a) {
      bool maximal = true;
      for (std::size_t b = 0; b < closed.size() && maximal; ++b)
        if (sizes[b] > sizes[a] && is_subsequence(closed[a], closed[b])) maximal = false;
      if (maximal) out.push_back(closed[a]);
    }
    return out;
  }

  Sequence decode(const std::vector<Word>& pattern) const {
    Sequence out;
    for (std::size_t i = 0; i < pattern.size() / words_; ++i) {
      std::vector<Item> items;
      for (Code y = 0; y < alphabet_.size(); ++y)
        if (has(&pattern[i * words_], y)) items.push_back(alphabet_[y]);
      out.emplace_back(std::move(items));
    }
    return out;
  }

  MiningOptions options_;
  std::vector<Item> alphabet_;
  std::size_t words_ = 1;
  std::vector<Word> masks_;              // every element of every sequence
  std::vector<std::size_t> start_;       // first element of each sequence
  std::vector<std::uint32_t> length_;
  std::size_t min_count_ = 1;
  std::vector<Word> prefix_;
  std::vector<Candidate> candidates_;
  std::vector<std::uint32_t> count_;
  std::size_t visited_ = 0;
  // scratch for the pruning checks (not reentrant)
  std::vector<Word> scratch_;
  std::vector<std::int32_t> f_;
  std::vector<std::int32_t> lf_;
};

}  // namespace detail

// Frequent closed (or, in maximal mode, maximal) sequential patterns of one
// community, each with supporters, support and growth rate against the rest
// of the network. Sorted in canonical order.
inline std::vector<Pattern> mine_closed(const SequenceDatabase& db, CommunityId community, const MiningOptions& options = {}) {
  detail::validate_mining(db, community, options);
  const auto& members = db.communities().members(community);
  const auto outside = complement_of(members, db);
  if (outside.empty()) throw EmptyComplement("community " + std::to_string(community) + " spans the whole network");
  detail::ClosedMiner miner(db, members, options);
  auto sequences = miner.run();
  log::debug("mined", "community", community, "prefixes", miner.visited(), "patterns", sequences.size());
  std::vector<Pattern> out;
  out.reserve(sequences.size());
  for (auto& s : sequences) out.push_back(make_pattern(std::move(s), community, members, outside, db));
  return out;
}

}  // namespace commchar
