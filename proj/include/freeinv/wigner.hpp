#pragma once

// Wigner chaos over the orthonormal indicator basis e_i = 1_[i-1, i]. A
// kernel is the coefficient array of sum g(i_1..i_q) e_{i_1} x ... x e_{i_q},
// so L^2 inner products and contractions become finite sums.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "freeinv/errors.hpp"
#include "freeinv/homsum.hpp"
#include "freeinv/sparse_array.hpp"

namespace freeinv {

inline constexpr std::size_t kDefaultKernelEntryCap = 10'000'000;

class DiscreteKernel : public SparseArray {
 public:
  DiscreteKernel() = default;
  DiscreteKernel(int N, int q) : SparseArray(N, q) {}

  /// Degree-0 kernel holding a scalar.
  static DiscreteKernel scalar(int N, double c) {
    DiscreteKernel k(N, 0);
    k.set({}, c);
    return k;
  }

  int N() const noexcept { return extent(); }
  int degree() const noexcept { return rank(); }
  double scalar_value() const { return rank() == 0 ? at({}) : 0.0; }
};

/// Same coordinates, read as a kernel.
inline DiscreteKernel embed(const CoefficientTensor& f) {
  DiscreteKernel g(f.N(), f.degree());
  for (const auto& [idx, v] : f.entries()) g.set(idx, v);
  return g;
}

/// g*(t_1..t_q) = g(t_q..t_1).
inline DiscreteKernel adjoint(const DiscreteKernel& g) {
  DiscreteKernel out(g.N(), g.degree());
  for (const auto& [idx, v] : g.entries()) out.set(SparseArray::Index(idx.rbegin(), idx.rend()), v);
  return out;
}

inline double inner(const DiscreteKernel& a, const DiscreteKernel& b) {
  if (a.N() != b.N() || a.degree() != b.degree()) throw ArgumentError("inner: shape mismatch");
  double s = 0.0;
  const auto& small = a.nnz() <= b.nnz() ? a : b;
  const auto& large = a.nnz() <= b.nnz() ? b : a;
  for (const auto& [idx, v] : small.entries()) s += v * large.at(idx);
  return s;
}

/// r-th contraction: the last r indices of g are summed against the first r
/// indices of h taken in reverse order,
///   (g *_r h)(s, t) = sum_x g(s, x_1..x_r) h(x_r..x_1, t).
/// r = 0 is the tensor product; r = p = q gives <g, h*>.
inline DiscreteKernel contract(const DiscreteKernel& g, const DiscreteKernel& h, int r,
                               std::size_t entry_cap = kDefaultKernelEntryCap) {
  const int p = g.degree();
  const int q = h.degree();
  if (g.N() != h.N()) throw ArgumentError("contract: kernels live on different index ranges");
  if (r < 0 || r > std::min(p, q)) throw ArgumentError("contract: r outside 0..min(p, q)");
  const auto ur = static_cast<std::size_t>(r);

  // h grouped by its first r indices, stored reversed to match g's tail.
  std::map<SparseArray::Index, std::vector<std::pair<SparseArray::Index, double>>> by_head;
  for (const auto& [idx, v] : h.entries()) {
    SparseArray::Index head(idx.begin(), idx.begin() + r);
    std::reverse(head.begin(), head.end());
    by_head[std::move(head)].emplace_back(SparseArray::Index(idx.begin() + r, idx.end()), v);
  }

  DiscreteKernel out(g.N(), p + q - 2 * r);
  std::map<SparseArray::Index, double> acc;
  SparseArray::Index tail(ur);
  SparseArray::Index key;
  for (const auto& [idx, v] : g.entries()) {
    std::copy(idx.end() - r, idx.end(), tail.begin());
    auto it = by_head.find(tail);
    if (it == by_head.end()) continue;
    for (const auto& [rest, w] : it->second) {
      key.assign(idx.begin(), idx.end() - r);
      key.insert(key.end(), rest.begin(), rest.end());
      acc[key] += v * w;
      if (acc.size() > entry_cap)
        throw SizeLimitError("contract: kernel entries above cap", static_cast<double>(acc.size()),
                             static_cast<double>(entry_cap));
    }
  }
  for (const auto& [k, v] : acc) out.set(k, v);
  return out;
}

/// Finite sum of Wigner integrals, one kernel per degree.
class ChaosElement {
 public:
  ChaosElement() = default;
  explicit ChaosElement(int N) : N_(N) {}
  explicit ChaosElement(DiscreteKernel g) : N_(g.N()) { add(g); }

  static ChaosElement scalar(int N, double c) { return ChaosElement(DiscreteKernel::scalar(N, c)); }

  int N() const noexcept { return N_; }

  void add(const DiscreteKernel& g) {
    if (N_ == 0) N_ = g.N();
    if (g.N() != N_) throw ArgumentError("ChaosElement: kernel on a different index range");
    if (g.nnz() == 0) return;
    auto [it, inserted] = parts_.try_emplace(g.degree(), g);
    if (!inserted) {
      for (const auto& [idx, v] : g.entries()) it->second.add(idx, v);
      if (it->second.nnz() == 0) parts_.erase(it);
    }
  }

  const std::map<int, DiscreteKernel>& parts() const noexcept { return parts_; }

  /// phi of the element: its degree-0 part.
  double trace() const {
    auto it = parts_.find(0);
    return it == parts_.end() ? 0.0 : it->second.scalar_value();
  }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& [q, g] : parts_) n += g.nnz();
    return n;
  }

 private:
  int N_ = 0;
  std::map<int, DiscreteKernel> parts_;
};

/// Product formula I_p(f) I_q(g) = sum_{r=0}^{min(p,q)} I_{p+q-2r}(f *_r g),
/// extended bilinearly.
inline ChaosElement multiply(const ChaosElement& a, const ChaosElement& b,
                             std::size_t entry_cap = kDefaultKernelEntryCap) {
  if (a.N() != 0 && b.N() != 0 && a.N() != b.N()) throw ArgumentError("multiply: index ranges differ");
  ChaosElement out(a.N() != 0 ? a.N() : b.N());
  for (const auto& [p, f] : a.parts())
    for (const auto& [q, g] : b.parts())
      for (int r = 0; r <= std::min(p, q); ++r) {
        out.add(contract(f, g, r, entry_cap));
        if (out.nnz() > entry_cap)
          throw SizeLimitError("multiply: kernel entries above cap", static_cast<double>(out.nnz()),
                               static_cast<double>(entry_cap));
      }
  return out;
}

/// phi(a b): only the full contractions of equal-degree parts reach degree 0.
inline double trace_of_product(const ChaosElement& a, const ChaosElement& b) {
  double s = 0.0;
  for (const auto& [p, f] : a.parts()) {
    auto it = b.parts().find(p);
    if (it == b.parts().end()) continue;
    s += contract(f, it->second, p).scalar_value();
  }
  return s;
}

/// phi(I_d(g)^m). Powers are built by repeated multiplication up to
/// ceil(m/2); the final product only needs its trace.
inline double chaos_moment(const DiscreteKernel& g, unsigned m, std::size_t entry_cap = kDefaultKernelEntryCap) {
  if (m == 0) throw ArgumentError("chaos_moment: m must be positive");
  const ChaosElement base(g);
  if (m == 1) return base.trace();
  const unsigned lo = m / 2;
  const unsigned hi = m - lo;
  ChaosElement power = base;
  ChaosElement low;
  if (lo == 1) low = base;
  for (unsigned k = 2; k <= hi; ++k) {
    power = multiply(power, base, entry_cap);
    if (k == lo) low = power;
  }
  return trace_of_product(power, low);
}

struct FourthMomentReport {
  int degree = 0;
  std::vector<double> contraction_norms;  // r = 1..d-1
  double fourth_moment = 0.0;             // phi(I_d(g)^4)
  double row_mass_norm = 0.0;             // sqrt(sum_i (sum_k f(i,k)^2)^2)
  double influence_bound = 0.0;           // max_i sum_k f(i,k)^2
  double slack = 0.0;                     // |g *_{d-1} g| - influence_bound
  bool inequality_holds = true;
};

/// Contraction norms, the fourth moment and the lower bound
/// |g *_{d-1} g| >= max_i sum_{k} f(i, k_2..k_d)^2 valid for mirror-symmetric f.
inline FourthMomentReport fourth_moment_report(const CoefficientTensor& f, double tol = 1e-12) {
  const auto pred = predicates(f);
  if (!pred.mirror_symmetric) throw ArgumentError("fourth_moment_report: tensor is not mirror-symmetric");
  if (!pred.vanishes_on_diagonals) throw ArgumentError("fourth_moment_report: tensor does not vanish on diagonals");
  FourthMomentReport rep;
  rep.degree = f.degree();
  const auto g = embed(f);
  for (int r = 1; r < rep.degree; ++r) rep.contraction_norms.push_back(contract(g, g, r).norm());
  rep.fourth_moment = chaos_moment(g, 4);

  const auto rows = influence_profile(f, InfluenceKind::classical);
  double sq = 0.0;
  for (double x : rows.per_index) sq += x * x;
  rep.row_mass_norm = std::sqrt(sq);
  rep.influence_bound = rows.tau;
  if (rep.degree >= 2) {
    rep.slack = rep.contraction_norms.back() - rep.influence_bound;
    rep.inequality_holds = rep.slack >= -tol;
  }
  return rep;
}

}  // namespace freeinv
