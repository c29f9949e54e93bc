#include <gtest/gtest.h>

#include <cmath>

#include "freeinv/rmt.hpp"

using namespace freeinv;

namespace {

std::vector<MatrixModel> iid_models(const Law& law, int N, int n) {
  return std::vector<MatrixModel>(static_cast<std::size_t>(N), MatrixModel::for_law(law, n));
}

}  // namespace

TEST(MatrixModel, LargestRemainder) {
  const auto m = MatrixModel::conjugated_atomic(3, {{-1.0, 0.5}, {1.0, 0.5}});
  EXPECT_EQ(m.diagonal(), (std::vector<double>{-1.0, -1.0, 1.0}));
  const auto k = MatrixModel::conjugated_atomic(10, {{0.0, 0.34}, {1.0, 0.33}, {2.0, 0.33}});
  EXPECT_EQ(k.diagonal(), (std::vector<double>{0, 0, 0, 0, 1, 1, 1, 2, 2, 2}));
  EXPECT_THROW(MatrixModel::conjugated_atomic(4, {{1.0, 0.6}, {2.0, 0.6}}), ArgumentError);
  EXPECT_THROW(MatrixModel::conjugated_atomic(0, {{1.0, 1.0}}), ArgumentError);
  EXPECT_THROW(MatrixModel::gue(0), ArgumentError);
}

TEST(MatrixModel, ForLaw) {
  EXPECT_EQ(MatrixModel::for_law(Law::semicircular(), 4).kind(), ModelKind::gue);
  EXPECT_THROW(MatrixModel::for_law(Law::semicircular(2.0), 4), ArgumentError);
  EXPECT_EQ(MatrixModel::for_law(Law::rademacher(), 4).diagonal().size(), 4u);
  EXPECT_THROW(MatrixModel::for_law(Law::from_moments(MomentSequence({0, 1, 0, 2})), 4), ArgumentError);
  EXPECT_EQ(MatrixModel::for_law(Law::from_atoms({{2.0, 0.25}, {-2.0 / 3.0, 0.75}}), 8).diagonal().front(), 2.0);
}

TEST(Draws, HermitianAndSpectrum) {
  auto rng = draw_rng(5, 0);
  const auto g = detail::draw(MatrixModel::gue(16), rng);
  EXPECT_LT((g - g.adjoint()).norm(), 1e-12);
  const auto u = detail::haar_unitary(16, rng);
  EXPECT_LT((u * u.adjoint() - CMatrix::Identity(16, 16)).norm(), 1e-10);
  const auto r = detail::draw(MatrixModel::for_law(Law::rademacher(), 16), rng);
  EXPECT_LT((r * r - CMatrix::Identity(16, 16)).norm(), 1e-10);
  EXPECT_NEAR(r.trace().real(), 0.0, 1e-10);
}

TEST(Estimate, SquaresOfSignMatricesAreExact) {
  McOptions opt;
  opt.samples = 5;
  const auto e = estimate_qn_moments(constant_linear(1), iid_models(Law::rademacher(), 1, 12), {2, 4}, opt);
  EXPECT_NEAR(e[0].mean, 1.0, 1e-12);
  EXPECT_NEAR(e[1].mean, 1.0, 1e-12);
  EXPECT_LT(e[0].std_error, 1e-12);
}

TEST(Estimate, DeterministicAndThreadIndependent) {
  McOptions opt;
  opt.samples = 6;
  opt.seed = 42;
  const auto f = quadratic_star(3);
  const auto models = iid_models(Law::semicircular(), 3, 10);
  const auto a = estimate_qn_moments(f, models, {2, 3, 4}, opt);
  const auto b = estimate_qn_moments(f, models, {2, 3, 4}, opt);
  opt.threads = 3;
  const auto c = estimate_qn_moments(f, models, {2, 3, 4}, opt);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(a[j].mean, b[j].mean);
    EXPECT_EQ(a[j].mean, c[j].mean);
    EXPECT_EQ(a[j].std_error, c[j].std_error);
  }
  opt.seed = 43;
  EXPECT_NE(estimate_qn_moments(f, models, {2}, opt)[0].mean, a[0].mean);
  // Separate calls per order reuse the same draws.
  opt.seed = 42;
  opt.threads = 1;
  EXPECT_EQ(estimate_qn_moment(f, models, 4, opt).mean, a[2].mean);
}

TEST(Estimate, SingleSampleIsDegenerate) {
  McOptions opt;
  opt.samples = 1;
  const auto e = estimate_qn_moment(constant_linear(2), iid_models(Law::semicircular(), 2, 8), 2, opt);
  EXPECT_TRUE(e.degenerate);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.samples, 1u);
}

TEST(Estimate, Errors) {
  McOptions opt;
  opt.samples = 2;
  const auto f = constant_linear(2);
  EXPECT_THROW(estimate_qn_moment(f, iid_models(Law::semicircular(), 1, 4), 2, opt), ArgumentError);
  std::vector<MatrixModel> mixed{MatrixModel::gue(4), MatrixModel::gue(5)};
  EXPECT_THROW(estimate_qn_moment(f, mixed, 2, opt), ArgumentError);
  EXPECT_THROW(estimate_qn_moment(f, iid_models(Law::semicircular(), 2, 4), 0, opt), ArgumentError);
  opt.samples = 0;
  EXPECT_THROW(estimate_qn_moment(f, iid_models(Law::semicircular(), 2, 4), 2, opt), ArgumentError);
  opt.samples = 2;
  opt.memory_cap = 1000;
  EXPECT_THROW(estimate_qn_moment(f, iid_models(Law::semicircular(), 2, 64), 2, opt), SizeLimitError);
}

TEST(Estimate, SmallGueMoments) {
  McOptions opt;
  opt.samples = 40;
  opt.seed = 9;
  const int n = 48;
  const auto e = estimate_qn_moments(constant_linear(1), iid_models(Law::semicircular(), 1, n), {1, 2, 3, 4}, opt);
  EXPECT_TRUE(mc_consistent(e[0], 0.0, n));
  EXPECT_TRUE(mc_consistent(e[1], 1.0, n));
  EXPECT_TRUE(mc_consistent(e[2], 0.0, n));
  EXPECT_TRUE(mc_consistent(e[3], 2.0, n));
  EXPECT_FALSE(mc_consistent(e[3], 2.5, n));
}

TEST(Estimate, TetillaAtModerateSize) {
  McOptions opt;
  opt.samples = 20;
  const int n = 64;
  const auto e = estimate_qn_moment(quadratic_star(4), iid_models(Law::semicircular(), 4, n), 4, opt);
  EXPECT_TRUE(mc_consistent(e, 2.5, n)) << e.mean << " +- " << e.std_error;
}
