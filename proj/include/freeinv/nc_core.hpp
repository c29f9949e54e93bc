#pragma once

// Set partitions, non-crossing partitions and the moment/free-cumulant
// transforms. Positions inside a partition are 0-based; to_string() prints
// them 1-based.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freeinv/errors.hpp"

namespace freeinv {

inline constexpr std::size_t kDefaultNcCap = 14;
inline constexpr std::size_t kDefaultPairingCap = 16;

/// Catalan number C_k, exact for k <= 35.
inline std::uint64_t catalan(unsigned k) {
  if (k > 35) throw ArgumentError("catalan: k > 35 overflows 64 bits");
  unsigned __int128 c = 1;
  for (unsigned j = 0; j < k; ++j) c = c * 2 * (2 * j + 1) / (j + 2);
  return static_cast<std::uint64_t>(c);
}

/// A partition of {0, ..., n-1} in canonical form: elements sorted inside each
/// block, blocks sorted by their least element.
class SetPartition {
 public:
  using Block = std::vector<std::size_t>;

  SetPartition() = default;

  SetPartition(std::size_t n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
    std::vector<char> seen(n_, 0);
    for (auto& b : blocks_) {
      if (b.empty()) throw ArgumentError("SetPartition: empty block");
      std::sort(b.begin(), b.end());
      for (std::size_t x : b) {
        if (x >= n_) throw ArgumentError("SetPartition: element out of range");
        if (seen[x]) throw ArgumentError("SetPartition: blocks overlap");
        seen[x] = 1;
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw ArgumentError("SetPartition: blocks do not cover the ground set");
    std::sort(blocks_.begin(), blocks_.end(),
              [](const Block& a, const Block& b) { return a.front() < b.front(); });
  }

  /// Builds the partition whose blocks are the level sets of `labels`.
  static SetPartition from_labels(std::span<const int> labels) {
    std::vector<Block> blocks;
    std::vector<std::pair<int, std::size_t>> slot;  // label -> block index
    for (std::size_t pos = 0; pos < labels.size(); ++pos) {
      auto it = std::find_if(slot.begin(), slot.end(),
                             [&](const auto& s) { return s.first == labels[pos]; });
      if (it == slot.end()) {
        slot.emplace_back(labels[pos], blocks.size());
        blocks.push_back({pos});
      } else {
        blocks[it->second].push_back(pos);
      }
    }
    return SetPartition(labels.size(), std::move(blocks));
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  /// Block index of every position.
  std::vector<std::size_t> labels() const {
    std::vector<std::size_t> out(n_);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (std::size_t x : blocks_[b]) out[x] = b;
    return out;
  }

  /// True iff there are no a < b < c < d with a, c in one block and b, d in another.
  bool is_noncrossing() const {
    const auto lab = labels();
    for (const auto& blk : blocks_) {
      for (std::size_t j = 0; j + 1 < blk.size(); ++j) {
        const std::size_t lo = blk[j];
        const std::size_t hi = blk[j + 1];
        for (std::size_t k = lo + 1; k < hi; ++k) {
          const auto& other = blocks_[lab[k]];
          if (other.front() < lo || other.back() > hi) return false;
        }
      }
    }
    return true;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (b) s += ",";
      s += "{";
      for (std::size_t j = 0; j < blocks_[b].size(); ++j) {
        if (j) s += ",";
        s += std::to_string(blocks_[b][j] + 1);
      }
      s += "}";
    }
    return s + "}";
  }

  friend bool operator==(const SetPartition&, const SetPartition&) = default;
  friend auto operator<=>(const SetPartition&, const SetPartition&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Block> blocks_;
};

/// A set partition known to be non-crossing.
class NCPartition {
 public:
  explicit NCPartition(SetPartition p) : p_(std::move(p)) {
    if (!p_.is_noncrossing()) throw ArgumentError("NCPartition: partition " + p_.to_string() + " is crossing");
  }

  const SetPartition& partition() const noexcept { return p_; }
  std::size_t size() const noexcept { return p_.size(); }
  const std::vector<SetPartition::Block>& blocks() const noexcept { return p_.blocks(); }

  friend bool operator==(const NCPartition&, const NCPartition&) = default;
  friend auto operator<=>(const NCPartition&, const NCPartition&) = default;

 private:
  SetPartition p_;
};

namespace detail {

// First-block recursion: the block holding the least open position splits the
// remaining positions into independent intervals. `pending` holds half-open
// intervals still to be partitioned.
using Interval = std::pair<std::size_t, std::size_t>;

template <class Visit>
void nc_recurse(std::vector<Interval> pending, std::vector<SetPartition::Block>& blocks, bool pairs_only,
                Visit& visit) {
  while (!pending.empty() && pending.back().first >= pending.back().second) pending.pop_back();
  if (pending.empty()) {
    visit(blocks);
    return;
  }
  const auto [lo, hi] = pending.back();
  pending.pop_back();

  if (pairs_only) {
    for (std::size_t b = lo + 1; b < hi; b += 2) {
      auto next = pending;
      next.emplace_back(b + 1, hi);
      next.emplace_back(lo + 1, b);
      blocks.push_back({lo, b});
      nc_recurse(std::move(next), blocks, pairs_only, visit);
      blocks.pop_back();
    }
    return;
  }
  // Remaining members of lo's block: every subset of (lo, hi).
  const std::size_t width = hi - lo - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << width); ++mask) {
    SetPartition::Block blk{lo};
    for (std::size_t j = 0; j < width; ++j)
      if (mask >> j & 1U) blk.push_back(lo + 1 + j);
    auto next = pending;
    next.emplace_back(blk.back() + 1, hi);
    for (std::size_t j = blk.size() - 1; j > 0; --j) next.emplace_back(blk[j - 1] + 1, blk[j]);
    blocks.push_back(std::move(blk));
    nc_recurse(std::move(next), blocks, pairs_only, visit);
    blocks.pop_back();
  }
}

}  // namespace detail

/// Calls `visit(blocks)` once per non-crossing partition of {0..n-1}. The
/// blocks are not canonicalized.
template <class Visit>
void for_each_nc(std::size_t n, Visit&& visit, bool pairs_only = false) {
  std::vector<SetPartition::Block> blocks;
  detail::nc_recurse({{0, n}}, blocks, pairs_only, visit);
}

/// All non-crossing partitions of {0..n-1}; there are Catalan(n) of them.
inline std::vector<NCPartition> enumerate_nc(std::size_t n, std::size_t cap = kDefaultNcCap) {
  if (n < 1) throw ArgumentError("enumerate_nc: n must be positive");
  if (n > cap) throw SizeLimitError("enumerate_nc: n above cap", static_cast<double>(n), static_cast<double>(cap));
  std::vector<NCPartition> out;
  out.reserve(catalan(static_cast<unsigned>(n)));
  for_each_nc(n, [&](const std::vector<SetPartition::Block>& blocks) {
    out.emplace_back(SetPartition(n, blocks));
  });
  return out;
}

/// Non-crossing pair partitions of {0..n-1}; empty for odd n.
inline std::vector<NCPartition> enumerate_nc_pairings(std::size_t n, std::size_t cap = kDefaultPairingCap) {
  if (n < 1) throw ArgumentError("enumerate_nc_pairings: n must be positive");
  if (n > cap)
    throw SizeLimitError("enumerate_nc_pairings: n above cap", static_cast<double>(n), static_cast<double>(cap));
  std::vector<NCPartition> out;
  if (n % 2 == 1) return out;
  for_each_nc(
      n, [&](const std::vector<SetPartition::Block>& blocks) { out.emplace_back(SetPartition(n, blocks)); },
      true);
  return out;
}

/// Partition of word positions by equal letters.
inline SetPartition kernel_of(std::span<const int> word) {
  if (word.empty()) throw ArgumentError("kernel_of: empty word");
  return SetPartition::from_labels(word);
}

/// True iff every block of `pi` lies inside a block of `sigma`.
inline bool is_refinement(const SetPartition& pi, const SetPartition& sigma) {
  if (pi.size() != sigma.size()) throw ArgumentError("is_refinement: ground sets differ in size");
  const auto lab = sigma.labels();
  for (const auto& blk : pi.blocks())
    for (std::size_t x : blk)
      if (lab[x] != lab[blk.front()]) return false;
  return true;
}

/// A real sequence indexed by order k = 1..K. The tag keeps moments and
/// cumulants from being mixed up.
template <class Tag>
class GradedSequence {
 public:
  GradedSequence() = default;
  explicit GradedSequence(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t max_order() const noexcept { return values_.size(); }

  /// Value at order k >= 1.
  double at(std::size_t k) const {
    if (k == 0 || k > values_.size()) throw CapacityError("sequence access", k, values_.size());
    return values_[k - 1];
  }

  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const GradedSequence&, const GradedSequence&) = default;

 private:
  std::vector<double> values_;
};

using MomentSequence = GradedSequence<struct MomentTag>;
using CumulantSequence = GradedSequence<struct CumulantTag>;

namespace detail {

// [z^j] M(z)^s for s = 0..K, j = 0..K, where M(z) = 1 + sum_k m_k z^k uses
// the first `known` moments only.
inline std::vector<std::vector<double>> series_powers(std::span<const double> m, std::size_t known, std::size_t K) {
  std::vector<double> base(K + 1, 0.0);
  base[0] = 1.0;
  for (std::size_t k = 1; k <= std::min(known, K); ++k) base[k] = m[k - 1];
  std::vector<std::vector<double>> pw(K + 1, std::vector<double>(K + 1, 0.0));
  pw[0][0] = 1.0;
  for (std::size_t s = 1; s <= K; ++s)
    for (std::size_t j = 0; j <= K - s; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= j; ++i) acc += base[i] * pw[s - 1][j - i];
      pw[s][j] = acc;
    }
  return pw;
}

}  // namespace detail

// Both transforms use the first-block decomposition
//   m_n = sum_{s=1}^{n} kappa_s [z^{n-s}] M(z)^s,
// which is the non-crossing moment-cumulant formula grouped by the block of 1.

inline CumulantSequence moments_to_free_cumulants(const MomentSequence& m) {
  const std::size_t K = m.max_order();
  if (K == 0) throw ArgumentError("moments_to_free_cumulants: empty sequence");
  const auto pw = detail::series_powers(m.values(), K, K);
  std::vector<double> kappa(K, 0.0);
  for (std::size_t n = 1; n <= K; ++n) {
    double acc = m.at(n);
    for (std::size_t s = 1; s < n; ++s) acc -= kappa[s - 1] * pw[s][n - s];
    kappa[n - 1] = acc;
  }
  return CumulantSequence(std::move(kappa));
}

inline MomentSequence free_cumulants_to_moments(const CumulantSequence& kappa) {
  const std::size_t K = kappa.max_order();
  if (K == 0) throw ArgumentError("free_cumulants_to_moments: empty sequence");
  std::vector<double> m(K, 0.0);
  for (std::size_t n = 1; n <= K; ++n) {
    // [z^{n-s}] M^s only involves m_1..m_{n-1}.
    const auto pw = detail::series_powers(m, n - 1, n);
    double acc = 0.0;
    for (std::size_t s = 1; s <= n; ++s) acc += kappa.at(s) * pw[s][n - s];
    m[n - 1] = acc;
  }
  return MomentSequence(std::move(m));
}

}  // namespace freeinv
