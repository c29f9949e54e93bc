#pragma once

// Graphs of {1..n_1+...+n_r}: sets of disjoint blocks (not necessarily
// covering). A graph respects the shape n_1 x ... x n_r when every block has
// at most one point in each segment. Used for graph contractions and the
// moment-growth constant C_{r,d} = #complete singleton-free graphs of d^{x2r}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freeinv/errors.hpp"
#include "freeinv/homsum.hpp"
#include "freeinv/wigner.hpp"
#include "freeinv/word_engine.hpp"

namespace freeinv {

inline constexpr int kDefaultGraphCap = 12;

class BlockGraph {
 public:
  using Block = std::vector<int>;  // 0-based positions

  BlockGraph() = default;

  BlockGraph(std::vector<int> shape, std::vector<Block> blocks) : shape_(std::move(shape)), blocks_(std::move(blocks)) {
    if (shape_.empty()) throw ArgumentError("BlockGraph: empty shape");
    for (int n : shape_)
      if (n < 1) throw ArgumentError("BlockGraph: segment sizes must be positive");
    total_ = std::accumulate(shape_.begin(), shape_.end(), 0);
    std::vector<char> seen(static_cast<std::size_t>(total_), 0);
    for (auto& b : blocks_) {
      if (b.empty()) throw ArgumentError("BlockGraph: empty block");
      std::sort(b.begin(), b.end());
      for (int x : b) {
        if (x < 0 || x >= total_) throw ArgumentError("BlockGraph: point out of range");
        if (seen[static_cast<std::size_t>(x)]) throw ArgumentError("BlockGraph: blocks overlap");
        seen[static_cast<std::size_t>(x)] = 1;
      }
    }
    std::sort(blocks_.begin(), blocks_.end(), [](const Block& a, const Block& b) { return a.front() < b.front(); });
  }

  const std::vector<int>& shape() const noexcept { return shape_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  int total() const noexcept { return total_; }

  int segment_of(int pos) const {
    int acc = 0;
    for (std::size_t s = 0; s < shape_.size(); ++s) {
      acc += shape_[s];
      if (pos < acc) return static_cast<int>(s);
    }
    throw ArgumentError("BlockGraph: point out of range");
  }

  bool respects() const {
    for (const auto& b : blocks_) {
      std::vector<int> segs;
      for (int x : b) segs.push_back(segment_of(x));
      std::sort(segs.begin(), segs.end());
      if (std::adjacent_find(segs.begin(), segs.end()) != segs.end()) return false;
    }
    return true;
  }

  bool has_singleton() const {
    return std::any_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.size() == 1; });
  }

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.size();
    return n;
  }

  bool complete() const { return vertex_count() == static_cast<std::size_t>(total_); }

  friend bool operator==(const BlockGraph&, const BlockGraph&) = default;
  friend auto operator<=>(const BlockGraph&, const BlockGraph&) = default;

 private:
  std::vector<int> shape_;
  std::vector<Block> blocks_;
  int total_ = 0;
};

namespace detail {

inline std::vector<int> segments_of_shape(std::span<const int> shape) {
  std::vector<int> seg;
  for (std::size_t s = 0; s < shape.size(); ++s)
    for (int j = 0; j < shape[s]; ++j) seg.push_back(static_cast<int>(s));
  return seg;
}

inline int checked_total(std::span<const int> shape, int cap) {
  if (shape.empty()) throw ArgumentError("enumerate_graphs: empty shape");
  int total = 0;
  for (int n : shape) {
    if (n < 1) throw ArgumentError("enumerate_graphs: segment sizes must be positive");
    total += n;
  }
  if (total > cap) throw SizeLimitError("enumerate_graphs: total size above cap", total, cap);
  return total;
}

}  // namespace detail

/// Visits every graph respecting `shape` with no singleton block (and covering
/// all points when `complete`). Blocks are passed in canonical order.
template <class Visit>
void for_each_graph(std::span<const int> shape, bool complete, Visit&& visit, int cap = kDefaultGraphCap) {
  const int total = detail::checked_total(shape, cap);
  const auto seg = detail::segments_of_shape(shape);
  std::vector<BlockGraph::Block> blocks;
  std::vector<std::uint32_t> used;  // segment mask per block

  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == total) {
      for (const auto& b : blocks)
        if (b.size() == 1) return;
      visit(blocks);
      return;
    }
    const std::uint32_t bit = 1U << seg[static_cast<std::size_t>(pos)];
    if (!complete) self(self, pos + 1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (used[b] & bit) continue;
      blocks[b].push_back(pos);
      used[b] |= bit;
      self(self, pos + 1);
      used[b] &= ~bit;
      blocks[b].pop_back();
    }
    blocks.push_back({pos});
    used.push_back(bit);
    self(self, pos + 1);
    used.pop_back();
    blocks.pop_back();
  };
  rec(rec, 0);
}

/// Sorted list of graphs in G*(shape), or its complete subset.
inline std::vector<BlockGraph> enumerate_graphs(std::span<const int> shape, bool complete, int cap = kDefaultGraphCap) {
  std::vector<BlockGraph> out;
  const std::vector<int> sh(shape.begin(), shape.end());
  for_each_graph(
      shape, complete, [&](const std::vector<BlockGraph::Block>& blocks) { out.emplace_back(sh, blocks); }, cap);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint64_t count_graphs(std::span<const int> shape, bool complete, int cap = kDefaultGraphCap) {
  std::uint64_t n = 0;
  for_each_graph(shape, complete, [&](const auto&) { ++n; }, cap);
  return n;
}

/// C_{r,d}: number of complete singleton-free graphs respecting d x ... x d (2r segments).
inline std::uint64_t hyper_constant(int r, int d, int cap = kDefaultGraphCap) {
  if (r < 1 || d < 1) throw ArgumentError("hyper_constant: r and d must be positive");
  if (2 * r * d > cap) throw SizeLimitError("hyper_constant: 2rd above cap", 2.0 * r * d, cap);
  const std::vector<int> shape(static_cast<std::size_t>(2 * r), d);
  return count_graphs(shape, true, cap);
}

/// C_gamma(f_1 x ... x f_r): positions covered by gamma are summed with all
/// positions of a block forced equal; uncovered positions stay as output
/// indices in their original order.
inline DiscreteKernel contract_graph(const BlockGraph& gamma, std::span<const DiscreteKernel> factors) {
  const auto& shape = gamma.shape();
  if (factors.size() != shape.size()) throw ArgumentError("contract_graph: factor count differs from shape");
  const int N = factors.empty() ? 1 : factors.front().N();
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (factors[j].degree() != shape[j]) throw ArgumentError("contract_graph: factor degree differs from shape");
    if (factors[j].N() != N) throw ArgumentError("contract_graph: factors on different index ranges");
  }
  if (!gamma.respects()) throw ArgumentError("contract_graph: graph does not respect the shape");

  const int total = gamma.total();
  std::vector<int> block_of(static_cast<std::size_t>(total), -1);
  for (std::size_t b = 0; b < gamma.blocks().size(); ++b)
    for (int x : gamma.blocks()[b]) block_of[static_cast<std::size_t>(x)] = static_cast<int>(b);
  const int out_rank = total - static_cast<int>(gamma.vertex_count());

  std::vector<int> value(gamma.blocks().size(), 0);  // 0 = unassigned
  std::vector<int> offset(shape.size(), 0);
  for (std::size_t j = 1; j < shape.size(); ++j) offset[j] = offset[j - 1] + shape[j - 1];

  DiscreteKernel out(N, out_rank);
  SparseArray::Index free_idx;
  auto rec = [&](auto&& self, std::size_t j, double prod) -> void {
    if (j == factors.size()) {
      out.add(free_idx, prod);
      return;
    }
    for (const auto& [idx, v] : factors[j].entries()) {
      std::vector<int> newly;
      bool ok = true;
      const std::size_t free_mark = free_idx.size();
      for (int k = 0; k < shape[j] && ok; ++k) {
        const int b = block_of[static_cast<std::size_t>(offset[j] + k)];
        const int i = idx[static_cast<std::size_t>(k)];
        if (b < 0) {
          free_idx.push_back(i);
        } else if (value[static_cast<std::size_t>(b)] == 0) {
          value[static_cast<std::size_t>(b)] = i;
          newly.push_back(b);
        } else if (value[static_cast<std::size_t>(b)] != i) {
          ok = false;
        }
      }
      if (ok) self(self, j + 1, prod * v);
      for (int b : newly) value[static_cast<std::size_t>(b)] = 0;
      free_idx.resize(free_mark);
    }
  };
  rec(rec, 0, 1.0);
  return out;
}

struct HyperCheck {
  double moment = 0.0;     // phi(Q^{2r})
  double mu = 0.0;         // sup_{i <= N, l <= 2^{rd-1}} phi(X_i^{2l})
  std::uint64_t constant = 0;
  double norm_power = 0.0;  // (sum f^2)^r
  double bound = 0.0;
  double ratio = 0.0;
  bool holds = false;
};

/// Compares phi(Q^{2r}) with C_{r,d} mu^N_{2^{rd-1}} (sum f^2)^r. The laws
/// must store moments up to order 2^{rd}.
inline HyperCheck hypercontractivity_check(const CoefficientTensor& f, const Assignment& laws, int r,
                                           const ExpansionOptions& opt = {}, MomentCache* cache = nullptr) {
  if (r < 1) throw ArgumentError("hypercontractivity_check: r must be positive");
  const auto pred = predicates(f);
  if (!pred.mirror_symmetric || !pred.vanishes_on_diagonals)
    throw ArgumentError("hypercontractivity_check: tensor must be mirror-symmetric and vanish on diagonals");
  const int d = f.degree();
  HyperCheck out;
  out.constant = hyper_constant(r, d);
  const std::size_t k = std::size_t{1} << (r * d - 1);
  for (int i = 1; i <= f.N(); ++i) {
    const Law& law = laws.law(i);
    if (2 * k > law.max_order()) throw CapacityError("hypercontractivity_check: law '" + law.name() + "'", 2 * k, law.max_order());
    for (std::size_t l = 1; l <= k; ++l) out.mu = std::max(out.mu, law.moment(2 * l));
  }
  out.moment = qn_moment(f, laws, static_cast<unsigned>(2 * r), opt, cache);
  out.norm_power = std::pow(pred.norm_sq, r);
  out.bound = static_cast<double>(out.constant) * out.mu * out.norm_power;
  out.ratio = out.bound > 0.0 ? out.moment / out.bound : 0.0;
  out.holds = out.moment <= out.bound + 1e-12 * std::max(1.0, out.bound);
  return out;
}

struct WordBoundCheck {
  double value = 0.0;  // phi(word)
  double mu = 0.0;     // sup over letters of the word, l <= 2^{r-1}, of phi(X^{2l})
  bool holds = false;
};

/// |phi(X_{i_1} ... X_{i_{2r}})| <= mu_{2^{r-1}}. Needs moments up to order 2^r.
inline WordBoundCheck word_bound_check(const Word& w, const Assignment& a) {
  if (w.empty() || w.size() % 2 != 0) throw ArgumentError("word_bound_check: word length must be even and positive");
  const std::size_t r = w.size() / 2;
  if (r > 30) throw ArgumentError("word_bound_check: word too long");
  const std::size_t k = std::size_t{1} << (r - 1);
  WordBoundCheck out;
  for (int v : w) {
    const Law& law = a.law(v);
    if (2 * k > law.max_order()) throw CapacityError("word_bound_check: law '" + law.name() + "'", 2 * k, law.max_order());
    for (std::size_t l = 1; l <= k; ++l) out.mu = std::max(out.mu, law.moment(2 * l));
  }
  out.value = word_moment(w, a);
  out.holds = std::abs(out.value) <= out.mu + 1e-12 * std::max(1.0, out.mu);
  return out;
}

}  // namespace freeinv
