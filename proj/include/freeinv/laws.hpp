#pragma once

// Probability laws of free random variables, represented by a finite moment
// sequence m_1..m_K together with the derived free cumulants.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "freeinv/errors.hpp"
#include "freeinv/nc_core.hpp"

namespace freeinv {

inline constexpr std::size_t kDefaultMaxOrder = 16;

enum class LawKind { semicircular, rademacher, atoms, moments };

inline const char* to_string(LawKind k) {
  switch (k) {
    case LawKind::semicircular: return "semicircular";
    case LawKind::rademacher: return "rademacher";
    case LawKind::atoms: return "atoms";
    case LawKind::moments: return "moments";
  }
  return "unknown";
}

struct Atom {
  double position = 0.0;
  double weight = 0.0;
};

class Law {
 public:
  /// Semicircular law S(0, variance): m_{2k} = C_k variance^k, odd moments 0.
  static Law semicircular(double variance = 1.0, std::size_t max_order = kDefaultMaxOrder) {
    if (!(variance > 0.0)) throw ArgumentError("semicircular: variance must be positive");
    check_order(max_order);
    std::vector<double> m(max_order, 0.0);
    for (std::size_t k = 2; k <= max_order; k += 2)
      m[k - 1] = static_cast<double>(catalan(static_cast<unsigned>(k / 2))) * std::pow(variance, static_cast<double>(k / 2));
    std::vector<double> kappa(max_order, 0.0);
    if (max_order >= 2) kappa[1] = variance;
    Law law(LawKind::semicircular, "semicircular", MomentSequence(std::move(m)), CumulantSequence(std::move(kappa)));
    law.variance_ = variance;
    return law;
  }

  /// Symmetric Bernoulli law (delta_{-1} + delta_{1}) / 2.
  static Law rademacher(std::size_t max_order = kDefaultMaxOrder) {
    check_order(max_order);
    std::vector<double> m(max_order, 0.0);
    for (std::size_t k = 2; k <= max_order; k += 2) m[k - 1] = 1.0;
    MomentSequence ms(std::move(m));
    auto kappa = moments_to_free_cumulants(ms);
    return Law(LawKind::rademacher, "rademacher", std::move(ms), std::move(kappa));
  }

  /// Finite atomic law sum_j weight_j delta_{position_j}. Weights must be
  /// positive and sum to one within 1e-12. A first moment within 1e-12 of zero
  /// (relative to the largest |position|) is stored as exactly zero.
  static Law from_atoms(std::vector<Atom> atoms, std::size_t max_order = kDefaultMaxOrder,
                        std::string name = "atoms") {
    check_order(max_order);
    if (atoms.empty()) throw ArgumentError("from_atoms: no atoms");
    double total = 0.0;
    double scale = 0.0;
    for (const auto& a : atoms) {
      if (!(a.weight > 0.0)) throw ArgumentError("from_atoms: weights must be positive");
      if (!std::isfinite(a.position)) throw ArgumentError("from_atoms: non-finite position");
      total += a.weight;
      scale = std::max(scale, std::abs(a.position));
    }
    if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("from_atoms: weights do not sum to 1");
    std::vector<double> m(max_order, 0.0);
    for (std::size_t k = 1; k <= max_order; ++k) {
      double acc = 0.0;
      for (const auto& a : atoms) acc += a.weight * std::pow(a.position, static_cast<double>(k));
      m[k - 1] = acc;
    }
    if (std::abs(m[0]) <= 1e-12 * std::max(1.0, scale)) m[0] = 0.0;
    MomentSequence ms(std::move(m));
    auto kappa = moments_to_free_cumulants(ms);
    Law law(LawKind::atoms, std::move(name), std::move(ms), std::move(kappa));
    law.atoms_ = std::move(atoms);
    return law;
  }

  /// Law given directly by its moments. Non-positive-semidefinite Hankel
  /// matrices only produce a warning.
  static Law from_moments(MomentSequence m, std::string name = "moments") {
    if (m.max_order() < 2) throw ArgumentError("from_moments: need at least two moments");
    auto kappa = moments_to_free_cumulants(m);
    Law law(LawKind::moments, std::move(name), std::move(m), std::move(kappa));
    if (!law.hankel_psd())
      law.warnings_.push_back("moment sequence has a Hankel matrix that is not positive semidefinite");
    if (!law.centered()) law.warnings_.push_back("law is not centered");
    return law;
  }

  const std::string& name() const noexcept { return name_; }
  LawKind kind() const noexcept { return kind_; }
  std::size_t max_order() const noexcept { return moments_.max_order(); }
  const MomentSequence& moments() const noexcept { return moments_; }
  const CumulantSequence& cumulants() const noexcept { return cumulants_; }

  /// Raw moment of order k; order 0 is 1.
  double moment(std::size_t k) const {
    if (k == 0) return 1.0;
    if (k > max_order()) throw CapacityError("law '" + name_ + "' moment", k, max_order());
    return moments_.at(k);
  }

  double cumulant(std::size_t k) const {
    if (k == 0 || k > max_order()) throw CapacityError("law '" + name_ + "' cumulant", k, max_order());
    return cumulants_.at(k);
  }

  bool centered(double tol = 1e-12) const { return std::abs(moments_.at(1)) <= tol; }
  bool unit_variance(double tol = 1e-12) const { return std::abs(moments_.at(2) - 1.0) <= tol; }

  /// Hankel matrices [m_{i+j}]_{0<=i,j<=h} with 2h <= K are positive semidefinite.
  bool hankel_psd(double tol = 1e-9) const {
    const std::size_t h = max_order() / 2;
    Eigen::MatrixXd H(h + 1, h + 1);
    for (std::size_t i = 0; i <= h; ++i)
      for (std::size_t j = 0; j <= h; ++j) H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = moment(i + j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    return es.eigenvalues().minCoeff() >= -tol * scale;
  }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  double variance_parameter() const noexcept { return variance_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Same stored moments (up to the shorter sequence) within `tol`.
  bool same_moments(const Law& other, double tol = 1e-12) const {
    const std::size_t K = std::min(max_order(), other.max_order());
    for (std::size_t k = 1; k <= K; ++k)
      if (std::abs(moment(k) - other.moment(k)) > tol) return false;
    return true;
  }

 private:
  Law(LawKind kind, std::string name, MomentSequence m, CumulantSequence kappa)
      : kind_(kind), name_(std::move(name)), moments_(std::move(m)), cumulants_(std::move(kappa)) {}

  static void check_order(std::size_t max_order) {
    if (max_order < 2) throw ArgumentError("law: max_order must be at least 2");
    if (max_order > 70) throw ArgumentError("law: max_order above 70 is not supported");
  }

  LawKind kind_;
  std::string name_;
  MomentSequence moments_;
  CumulantSequence cumulants_;
  double variance_ = 0.0;
  std::vector<Atom> atoms_;
  std::vector<std::string> warnings_;
};

/// Centered, unit-variance atomic law obtained by standardizing `atoms`.
inline Law standardized_atoms(std::vector<Atom> atoms, std::size_t max_order = kDefaultMaxOrder,
                              std::string name = "atoms") {
  double mean = 0.0;
  for (const auto& a : atoms) mean += a.weight * a.position;
  double var = 0.0;
  for (const auto& a : atoms) var += a.weight * (a.position - mean) * (a.position - mean);
  if (!(var > 0.0)) throw ArgumentError("standardized_atoms: degenerate law");
  const double sd = std::sqrt(var);
  for (auto& a : atoms) a.position = (a.position - mean) / sd;
  return Law::from_atoms(std::move(atoms), max_order, std::move(name));
}

}  // namespace freeinv
