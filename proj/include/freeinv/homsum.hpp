#pragma once

// Homogeneous sums Q_N(x) = sum f(i_1..i_d) x_{i_1} ... x_{i_d} over
// non-commuting variables: coefficient tensors, symmetry predicates,
// influences, the families used in the experiments, and exact moments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "freeinv/errors.hpp"
#include "freeinv/sparse_array.hpp"
#include "freeinv/word_engine.hpp"

namespace freeinv {

/// f_N : {1..N}^d -> R, stored sparsely with 1-based indices.
class CoefficientTensor : public SparseArray {
 public:
  CoefficientTensor() = default;
  CoefficientTensor(int N, int d) : SparseArray(N, d) {
    if (d < 1) throw ArgumentError("CoefficientTensor: degree must be positive");
  }

  int N() const noexcept { return extent(); }
  int degree() const noexcept { return rank(); }
};

struct TensorPredicates {
  bool mirror_symmetric = false;
  bool fully_symmetric = false;
  bool vanishes_on_diagonals = false;
  double norm_sq = 0.0;
};

namespace detail {

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool has_repeat(const SparseArray::Index& idx) {
  for (std::size_t k = 0; k < idx.size(); ++k)
    for (std::size_t l = k + 1; l < idx.size(); ++l)
      if (idx[k] == idx[l]) return true;
  return false;
}

}  // namespace detail

inline TensorPredicates predicates(const CoefficientTensor& f, double tol = 1e-12) {
  TensorPredicates p;
  p.mirror_symmetric = true;
  p.fully_symmetric = true;
  p.vanishes_on_diagonals = true;
  p.norm_sq = f.norm_sq();
  for (const auto& [idx, v] : f.entries()) {
    if (detail::has_repeat(idx)) p.vanishes_on_diagonals = false;
    const SparseArray::Index rev(idx.rbegin(), idx.rend());
    if (!detail::close(f.at(rev), v, tol)) p.mirror_symmetric = false;
    if (p.fully_symmetric) {
      auto perm = idx;
      std::sort(perm.begin(), perm.end());
      do {
        if (!detail::close(f.at(perm), v, tol)) {
          p.fully_symmetric = false;
          break;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  return p;
}

/// Free influence: squared mass of entries with index i in any of the d slots,
/// counted once per slot.
inline double influence_free(const CoefficientTensor& f, int i) {
  if (i < 1 || i > f.N()) throw ArgumentError("influence_free: index out of range");
  double s = 0.0;
  for (const auto& [idx, v] : f.entries())
    for (int j : idx)
      if (j == i) s += v * v;
  return s;
}

/// Classical influence: squared mass of entries with index i in the first slot.
inline double influence_classical(const CoefficientTensor& f, int i) {
  if (i < 1 || i > f.N()) throw ArgumentError("influence_classical: index out of range");
  double s = 0.0;
  for (const auto& [idx, v] : f.entries())
    if (idx.front() == i) s += v * v;
  return s;
}

enum class InfluenceKind { free, classical };

struct InfluenceProfile {
  std::vector<double> per_index;  // position i-1 holds index i
  double tau = 0.0;
};

inline InfluenceProfile influence_profile(const CoefficientTensor& f, InfluenceKind kind = InfluenceKind::free) {
  InfluenceProfile prof;
  prof.per_index.assign(static_cast<std::size_t>(f.N()), 0.0);
  for (const auto& [idx, v] : f.entries()) {
    if (kind == InfluenceKind::classical) {
      prof.per_index[static_cast<std::size_t>(idx.front() - 1)] += v * v;
    } else {
      for (int j : idx) prof.per_index[static_cast<std::size_t>(j - 1)] += v * v;
    }
  }
  prof.tau = *std::max_element(prof.per_index.begin(), prof.per_index.end());
  return prof;
}

inline NCPolynomial to_polynomial(const CoefficientTensor& f) {
  NCPolynomial p;
  for (const auto& [idx, v] : f.entries()) p.add_term(idx, v);
  return p;
}

/// Exact phi(Q_N(X_1..X_N)^m) for free X_i distributed per `laws`.
inline double qn_moment(const CoefficientTensor& f, const Assignment& laws, unsigned m,
                        const ExpansionOptions& opt = {}, MomentCache* cache = nullptr) {
  for (const auto& [idx, v] : f.entries())
    for (int i : idx)
      if (!laws.contains(i)) throw ArgumentError("qn_moment: no law for variable " + std::to_string(i));
  return polynomial_moment(to_polynomial(f), laws, m, opt, cache);
}

inline CoefficientTensor normalized(const CoefficientTensor& f) {
  const double n2 = f.norm_sq();
  if (n2 == 0.0) throw ArgumentError("normalized: zero tensor");
  CoefficientTensor g = f;
  g.scale(1.0 / std::sqrt(n2));
  return g;
}

// Families.

/// f(i) = 1/sqrt(N): the normalized linear sum behind the free CLT.
inline CoefficientTensor constant_linear(int N) {
  if (N < 1) throw ArgumentError("constant_linear: N must be positive");
  CoefficientTensor f(N, 1);
  const double v = 1.0 / std::sqrt(static_cast<double>(N));
  for (int i = 1; i <= N; ++i) f.set({i}, v);
  return f;
}

/// (1/sqrt(2N-2)) sum_{i=2}^N (x_1 x_i + x_i x_1).
inline CoefficientTensor quadratic_star(int N) {
  if (N < 2) throw ArgumentError("quadratic_star: N must be at least 2");
  CoefficientTensor f(N, 2);
  const double v = 1.0 / std::sqrt(2.0 * N - 2.0);
  for (int i = 2; i <= N; ++i) {
    f.set({1, i}, v);
    f.set({i, 1}, v);
  }
  return f;
}

/// Degree-3 tensor f(i, 1, k) = f'_{N-1}(i-1, k-1) for i, k >= 2, where
/// f'_M(a, a+1) = f'_M(a+1, a) = 1/sqrt(2M-2). Mirror-symmetric, vanishing on
/// diagonals, norm one, but not fully symmetric; index 1 keeps influence one.
inline CoefficientTensor mirror_counterexample(int N) {
  if (N < 4) throw ArgumentError("mirror_counterexample: N must be at least 4");
  CoefficientTensor f(N, 3);
  const int M = N - 1;
  const double v = 1.0 / std::sqrt(2.0 * M - 2.0);
  for (int a = 1; a <= M - 1; ++a) {
    f.set({a + 1, 1, a + 2}, v);
    f.set({a + 2, 1, a + 1}, v);
  }
  return f;
}

/// (1/sqrt(N)) sum_{i=1}^{N-k} (x_i x_{i+1} ... x_{i+k} + x_{i+k} ... x_i).
/// The squared norm is 2(N-k)/N; use normalized() for a unit-norm version.
inline CoefficientTensor sliding_window(int N, int k) {
  if (k < 1) throw ArgumentError("sliding_window: k must be positive");
  if (N <= k) throw ArgumentError("sliding_window: N must exceed k");
  CoefficientTensor f(N, k + 1);
  const double v = 1.0 / std::sqrt(static_cast<double>(N));
  for (int i = 1; i <= N - k; ++i) {
    SparseArray::Index up, down;
    for (int j = 0; j <= k; ++j) {
      up.push_back(i + j);
      down.push_back(i + k - j);
    }
    f.add(up, v);
    f.add(down, v);
  }
  return f;
}

/// Fully symmetric tensor vanishing on diagonals, supported on index sets of
/// spread at most `width`, with weights uniform in [0.5, 1.5]; norm one.
inline CoefficientTensor random_symmetric_band(int N, int d, int width, std::uint64_t seed) {
  if (d < 1 || N < d) throw ArgumentError("random_symmetric_band: need 1 <= d <= N");
  if (width < d - 1) throw ArgumentError("random_symmetric_band: width must be at least d-1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  CoefficientTensor f(N, d);
  SparseArray::Index set(static_cast<std::size_t>(d));
  // Enumerate increasing d-tuples with spread <= width.
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == d) {
      const double w = weight(rng);
      auto perm = set;
      do f.set(perm, w);
      while (std::next_permutation(perm.begin(), perm.end()));
      return;
    }
    for (int i = start; i <= N; ++i) {
      if (pos > 0 && i - set[0] > width) break;
      set[static_cast<std::size_t>(pos)] = i;
      self(self, pos + 1, i + 1);
    }
  };
  rec(rec, 0, 1);
  return normalized(f);
}

struct RandomTensorSpec {
  int N = 4;
  int d = 2;
  std::size_t orbits = 4;  // number of independently drawn index tuples
  bool mirror = true;
  bool full = false;
  bool vanish_diagonals = true;
};

/// Random sparse tensor with the requested symmetry; values uniform in [-1, 1].
template <class Rng>
CoefficientTensor random_tensor(const RandomTensorSpec& spec, Rng& rng) {
  if (spec.vanish_diagonals && spec.N < spec.d)
    throw ArgumentError("random_tensor: cannot vanish on diagonals with N < d");
  CoefficientTensor f(spec.N, spec.d);
  std::uniform_int_distribution<int> pick(1, spec.N);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (std::size_t o = 0; o < spec.orbits; ++o) {
    SparseArray::Index idx(static_cast<std::size_t>(spec.d));
    do
      for (auto& i : idx) i = pick(rng);
    while (spec.vanish_diagonals && detail::has_repeat(idx));
    const double v = val(rng);
    if (spec.full) {
      auto perm = idx;
      std::sort(perm.begin(), perm.end());
      do f.set(perm, v);
      while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      f.set(idx, v);
      if (spec.mirror) f.set(SparseArray::Index(idx.rbegin(), idx.rend()), v);
    }
  }
  return f;
}

}  // namespace freeinv
