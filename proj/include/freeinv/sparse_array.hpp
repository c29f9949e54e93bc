#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "freeinv/errors.hpp"

namespace freeinv {

/// Sparse real array over {1..N}^rank. Indices are 1-based; explicit zeros
/// are never stored. Rank 0 holds a single scalar under the empty index.
class SparseArray {
 public:
  using Index = std::vector<int>;

  SparseArray() = default;
  SparseArray(int extent, int rank) : extent_(extent), rank_(rank) {
    if (extent < 1) throw ArgumentError("SparseArray: extent must be positive");
    if (rank < 0) throw ArgumentError("SparseArray: negative rank");
  }

  int extent() const noexcept { return extent_; }
  int rank() const noexcept { return rank_; }

  void set(const Index& idx, double value) {
    check(idx);
    if (value == 0.0)
      entries_.erase(idx);
    else
      entries_[idx] = value;
  }

  void add(const Index& idx, double value) {
    check(idx);
    if (value == 0.0) return;
    auto [it, inserted] = entries_.try_emplace(idx, value);
    if (!inserted) {
      it->second += value;
      if (it->second == 0.0) entries_.erase(it);
    }
  }

  double at(const Index& idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? 0.0 : it->second;
  }

  const std::map<Index, double>& entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& [idx, v] : entries_) s += v * v;
    return s;
  }

  double norm() const { return std::sqrt(norm_sq()); }

  void scale(double s) {
    if (s == 0.0) {
      entries_.clear();
      return;
    }
    for (auto& [idx, v] : entries_) v *= s;
  }

 protected:
  void check(const Index& idx) const {
    if (static_cast<int>(idx.size()) != rank_)
      throw ArgumentError("SparseArray: index of length " + std::to_string(idx.size()) + " for rank " +
                          std::to_string(rank_));
    for (int i : idx)
      if (i < 1 || i > extent_) throw ArgumentError("SparseArray: index " + std::to_string(i) + " outside 1.." + std::to_string(extent_));
  }

  int extent_ = 1;
  int rank_ = 0;
  std::map<Index, double> entries_;
};

}  // namespace freeinv
