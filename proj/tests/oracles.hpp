#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond plain data types: set partitions come from
// restricted growth strings, crossings are tested pairwise, and cumulants are
// recovered by direct recursion over the non-crossing lattice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using Partition = std::vector<std::vector<int>>;  // 0-based blocks

/// Visits every set partition of {0..n-1}, via restricted growth strings.
inline void for_each_partition(int n, const std::function<void(const Partition&)>& visit) {
  if (n == 0) {
    visit({});
    return;
  }
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int pos, int maxv) {
    if (pos == n) {
      Partition p(static_cast<std::size_t>(maxv + 1));
      for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i);
      visit(p);
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      rgs[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, std::max(maxv, v));
    }
  };
  rec(0, -1);
}

inline std::vector<Partition> all_partitions(int n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](const Partition& p) { out.push_back(p); });
  return out;
}

/// a < b < c < d with a, c in one block and b, d in another.
inline bool crossing(const Partition& p) {
  for (std::size_t u = 0; u < p.size(); ++u)
    for (std::size_t v = 0; v < p.size(); ++v) {
      if (u == v) continue;
      for (int a : p[u])
        for (int b : p[v])
          for (int c : p[u])
            for (int d : p[v])
              if (a < b && b < c && c < d) return true;
    }
  return false;
}

/// Memoized per n; not thread-safe.
inline const std::vector<Partition>& nc_partitions(int n) {
  static std::map<int, std::vector<Partition>> memo;
  auto [it, fresh] = memo.try_emplace(n);
  if (fresh)
    for_each_partition(n, [&](const Partition& p) {
      if (!crossing(p)) it->second.push_back(p);
    });
  return it->second;
}

/// Free cumulants from moments by kappa_n = m_n - sum_{pi != 1_n} prod kappa.
inline std::vector<double> free_cumulants(const std::vector<double>& moments) {
  const int K = static_cast<int>(moments.size());
  std::vector<double> kappa(moments.size(), 0.0);
  for (int n = 1; n <= K; ++n) {
    double rest = 0.0;
    for (const auto& p : nc_partitions(n)) {
      if (p.size() == 1) continue;
      double prod = 1.0;
      for (const auto& b : p) prod *= kappa[b.size() - 1];
      rest += prod;
    }
    kappa[static_cast<std::size_t>(n - 1)] = moments[static_cast<std::size_t>(n - 1)] - rest;
  }
  return kappa;
}

/// phi(word) = sum over non-crossing pi whose blocks are constant on the word
/// of prod kappa_{|V|}(law of V). `cumulants` maps a letter to its sequence.
inline double word_moment(const std::vector<int>& word, const std::map<int, std::vector<double>>& cumulants) {
  if (word.empty()) return 1.0;
  double total = 0.0;
  for (const auto& p : nc_partitions(static_cast<int>(word.size()))) {
    double prod = 1.0;
    for (const auto& b : p) {
      const int letter = word[static_cast<std::size_t>(b.front())];
      bool same = true;
      for (int x : b) same = same && word[static_cast<std::size_t>(x)] == letter;
      if (!same) {
        prod = 0.0;
        break;
      }
      prod *= cumulants.at(letter)[b.size() - 1];
    }
    total += prod;
  }
  return total;
}

inline std::vector<double> rademacher_moments(int K) {
  std::vector<double> m(static_cast<std::size_t>(K), 0.0);
  for (int k = 2; k <= K; k += 2) m[static_cast<std::size_t>(k - 1)] = 1.0;
  return m;
}

inline std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

inline std::uint64_t catalan(int k) { return binomial(2 * k, k) / static_cast<std::uint64_t>(k + 1); }

/// phi((N^{-1/2} sum_i x_i)^m) for iid x_i by counting index tuples per
/// kernel: a kernel with b blocks is realized by N(N-1)...(N-b+1) tuples.
inline double linear_sum_moment(int N, int m, const std::vector<double>& cumulants) {
  double total = 0.0;
  for (const auto& kernel : all_partitions(m)) {
    const int b = static_cast<int>(kernel.size());
    if (b > N) continue;
    double count = 1.0;
    for (int j = 0; j < b; ++j) count *= N - j;
    std::vector<int> word(static_cast<std::size_t>(m));
    for (int j = 0; j < b; ++j)
      for (int x : kernel[static_cast<std::size_t>(j)]) word[static_cast<std::size_t>(x)] = j;
    std::map<int, std::vector<double>> cum;
    for (int j = 0; j < b; ++j) cum[j] = cumulants;
    total += count * word_moment(word, cum);
  }
  return total / std::pow(static_cast<double>(N), m / 2.0);
}

/// Graphs of shape (n_1..n_r) respecting the shape with no singleton, from
/// all set partitions of each subset of points.
inline std::uint64_t count_graphs(const std::vector<int>& shape, bool complete) {
  std::vector<int> seg;
  for (std::size_t s = 0; s < shape.size(); ++s)
    for (int j = 0; j < shape[s]; ++j) seg.push_back(static_cast<int>(s));
  const int n = static_cast<int>(seg.size());
  std::uint64_t count = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (complete && mask != (1U << n) - 1) continue;
    std::vector<int> pts;
    for (int i = 0; i < n; ++i)
      if (mask & (1U << i)) pts.push_back(i);
    for_each_partition(static_cast<int>(pts.size()), [&](const Partition& p) {
      bool ok = true;
      for (const auto& b : p) {
        if (b.size() < 2) ok = false;
        std::vector<int> used(shape.size(), 0);
        for (int x : b)
          if (used[static_cast<std::size_t>(seg[static_cast<std::size_t>(pts[static_cast<std::size_t>(x)])])]++) ok = false;
        if (!ok) break;
      }
      if (ok) ++count;
    });
  }
  return count;
}

}  // namespace oracle
