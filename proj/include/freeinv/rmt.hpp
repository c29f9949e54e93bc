#pragma once

// Monte Carlo estimates of phi(Q_N^m) through n x n random matrices that are
// asymptotically free: independent GUE draws, or Haar-conjugated diagonals.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "freeinv/errors.hpp"
#include "freeinv/homsum.hpp"
#include "freeinv/laws.hpp"

namespace freeinv {

using CMatrix = Eigen::MatrixXcd;

inline constexpr std::size_t kDefaultMatrixMemoryCap = std::size_t{1} << 31;  // bytes

enum class ModelKind { gue, conjugated_atomic };

inline const char* to_string(ModelKind k) { return k == ModelKind::gue ? "gue" : "conjugated-atomic"; }

class MatrixModel {
 public:
  static MatrixModel gue(int n) {
    if (n < 1) throw ArgumentError("MatrixModel: dimension must be positive");
    MatrixModel m;
    m.n_ = n;
    return m;
  }

  /// Diagonal with value a_j repeated round(n p_j) times, largest remainders
  /// breaking ties so the counts add up to n.
  static MatrixModel conjugated_atomic(int n, std::vector<Atom> atoms) {
    if (n < 1) throw ArgumentError("MatrixModel: dimension must be positive");
    if (atoms.empty()) throw ArgumentError("MatrixModel: no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (!(a.weight > 0.0)) throw ArgumentError("MatrixModel: atom weights must be positive");
      total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("MatrixModel: atom weights must sum to 1");
    MatrixModel m;
    m.kind_ = ModelKind::conjugated_atomic;
    m.n_ = n;
    m.atoms_ = std::move(atoms);

    std::vector<int> count(m.atoms_.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int assigned = 0;
    for (std::size_t j = 0; j < m.atoms_.size(); ++j) {
      const double exact = n * m.atoms_[j].weight;
      count[j] = static_cast<int>(std::floor(exact));
      assigned += count[j];
      rem.emplace_back(exact - count[j], j);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < n - assigned; ++k) ++count[rem[static_cast<std::size_t>(k)].second];
    for (std::size_t j = 0; j < m.atoms_.size(); ++j)
      for (int k = 0; k < count[j]; ++k) m.diagonal_.push_back(m.atoms_[j].position);
    return m;
  }

  /// GUE for semicircular(1), +-1 halves for Rademacher, otherwise the law's atoms.
  static MatrixModel for_law(const Law& law, int n) {
    if (law.kind() == LawKind::semicircular) {
      if (std::abs(law.variance_parameter() - 1.0) > 1e-12)
        throw ArgumentError("MatrixModel: only unit-variance semicircular laws have a GUE model");
      return gue(n);
    }
    if (law.kind() == LawKind::rademacher) return conjugated_atomic(n, {{-1.0, 0.5}, {1.0, 0.5}});
    if (law.atoms().empty()) throw ArgumentError("MatrixModel: law '" + law.name() + "' has no matrix model");
    return conjugated_atomic(n, law.atoms());
  }

  ModelKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& diagonal() const noexcept { return diagonal_; }

 private:
  MatrixModel() = default;
  ModelKind kind_ = ModelKind::gue;
  int n_ = 0;
  std::vector<Atom> atoms_;
  std::vector<double> diagonal_;
};

namespace detail {

template <class Rng>
CMatrix ginibre(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      a(i, j) = {re, im};
    }
  return a;
}

template <class Rng>
CMatrix haar_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<CMatrix> qr(ginibre(n, rng));
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : std::complex<double>(1.0, 0.0);
  }
  return q;
}

template <class Rng>
CMatrix draw(const MatrixModel& model, Rng& rng) {
  const int n = model.n();
  if (model.kind() == ModelKind::gue) {
    const CMatrix a = ginibre(n, rng);
    return (a + a.adjoint()) / std::sqrt(2.0 * n);
  }
  const CMatrix u = haar_unitary(n, rng);
  CMatrix ud = u;
  for (int j = 0; j < n; ++j) ud.col(j) *= model.diagonal()[static_cast<std::size_t>(j)];
  return ud * u.adjoint();
}

inline double trace_of_product(const CMatrix& a, const CMatrix& b) {
  return a.transpose().cwiseProduct(b).sum().real();
}

/// Q evaluated on matrices by Horner over the prefix trie of the support.
class QnEvaluator {
 public:
  explicit QnEvaluator(const CoefficientTensor& f) : d_(f.degree()) {
    nodes_.emplace_back();
    for (const auto& [idx, v] : f.entries()) {
      std::size_t cur = 0;
      for (int i : idx) {
        auto it = nodes_[cur].child.find(i);
        if (it == nodes_[cur].child.end()) {
          nodes_.emplace_back();
          it = nodes_[cur].child.emplace(i, nodes_.size() - 1).first;
        }
        cur = it->second;
      }
      nodes_[cur].value = v;
    }
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  int degree() const noexcept { return d_; }

  CMatrix operator()(const std::vector<CMatrix>& x, int n) const { return eval(0, 0, x, n); }

 private:
  struct Node {
    std::map<int, std::size_t> child;
    double value = 0.0;
  };

  CMatrix eval(std::size_t node, int depth, const std::vector<CMatrix>& x, int n) const {
    CMatrix out = CMatrix::Zero(n, n);
    for (const auto& [i, c] : nodes_[node].child) {
      const CMatrix& xi = x[static_cast<std::size_t>(i - 1)];
      if (depth + 1 == d_)
        out += nodes_[c].value * xi;
      else
        out.noalias() += xi * eval(c, depth + 1, x, n);
    }
    return out;
  }

  int d_;
  std::vector<Node> nodes_;
};

}  // namespace detail

/// Independent draw for each model; every model must share the dimension.
template <class Rng>
std::vector<CMatrix> sample_family(const std::vector<MatrixModel>& models, Rng& rng) {
  std::vector<CMatrix> out;
  if (models.empty()) return out;
  const int n = models.front().n();
  for (const auto& m : models)
    if (m.n() != n) throw ArgumentError("sample_family: models of different dimension");
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(detail::draw(m, rng));
  return out;
}

/// Stream for draw k, independent of how draws are split across workers.
inline std::mt19937_64 draw_rng(std::uint64_t seed, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return std::mt19937_64(seq);
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(samples); 0 when samples == 1
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // samples == 1
};

struct McOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::size_t memory_cap = kDefaultMatrixMemoryCap;
};

/// Estimates of phi(Q^m) for each requested m from the same draws.
inline std::vector<McEstimate> estimate_qn_moments(const CoefficientTensor& f, const std::vector<MatrixModel>& models,
                                                   const std::vector<unsigned>& orders, const McOptions& opt) {
  if (opt.samples < 1) throw ArgumentError("estimate_qn_moments: samples must be positive");
  if (orders.empty()) return {};
  for (unsigned m : orders)
    if (m < 1) throw ArgumentError("estimate_qn_moments: moment orders must be positive");
  if (static_cast<int>(models.size()) < f.N()) throw ArgumentError("estimate_qn_moments: fewer models than variables");
  const int n = models.front().n();
  for (const auto& m : models)
    if (m.n() != n) throw ArgumentError("estimate_qn_moments: models of different dimension");

  const detail::QnEvaluator q(f);
  const unsigned max_m = *std::max_element(orders.begin(), orders.end());
  const std::size_t half = (max_m + 1) / 2;
  const unsigned workers = std::max(1U, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.samples)));
  const double per_matrix = 16.0 * n * n;
  const double need = per_matrix * workers * (static_cast<double>(models.size()) + f.degree() + half + 2);
  if (need > static_cast<double>(opt.memory_cap))
    throw SizeLimitError("estimate_qn_moments: matrix memory above cap", need, static_cast<double>(opt.memory_cap));

  // values[s][j]: tr(Q^{orders[j]})/n on draw s.
  std::vector<std::vector<double>> values(opt.samples, std::vector<double>(orders.size()));
  auto run = [&](unsigned w) {
    for (std::size_t s = w; s < opt.samples; s += workers) {
      auto rng = draw_rng(opt.seed, s);
      const auto x = sample_family(models, rng);
      std::vector<CMatrix> pw{q(x, n)};  // pw[k-1] = Q^k
      while (pw.size() < half) pw.push_back(pw.back() * pw.front());
      for (std::size_t j = 0; j < orders.size(); ++j) {
        const unsigned m = orders[j];
        const std::size_t lo = m / 2;
        const std::size_t hi = m - lo;
        const double tr = lo == 0 ? pw[0].trace().real() : detail::trace_of_product(pw[hi - 1], pw[lo - 1]);
        values[s][j] = tr / n;
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  std::vector<McEstimate> out(orders.size());
  for (std::size_t j = 0; j < orders.size(); ++j) {
    auto& e = out[j];
    e.samples = opt.samples;
    e.seed = opt.seed;
    double sum = 0.0;
    for (std::size_t s = 0; s < opt.samples; ++s) sum += values[s][j];
    e.mean = sum / static_cast<double>(opt.samples);
    if (opt.samples == 1) {
      e.degenerate = true;
      continue;
    }
    double ss = 0.0;
    for (std::size_t s = 0; s < opt.samples; ++s) ss += (values[s][j] - e.mean) * (values[s][j] - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(opt.samples - 1)) / std::sqrt(static_cast<double>(opt.samples));
  }
  return out;
}

inline McEstimate estimate_qn_moment(const CoefficientTensor& f, const std::vector<MatrixModel>& models, unsigned m,
                                     const McOptions& opt) {
  return estimate_qn_moments(f, models, {m}, opt).front();
}

/// |mean - exact| <= 3 stderr + C/n: a heuristic allowance for the O(1/n)
/// finite-dimension bias, not a theorem.
inline bool mc_consistent(const McEstimate& e, double exact, int n, double bias_constant = 1.0) {
  return std::abs(e.mean - exact) <= 3.0 * e.std_error + bias_constant / n;
}

}  // namespace freeinv
