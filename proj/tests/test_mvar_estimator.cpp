#include <gtest/gtest.h>

#include <random>

#include "mgm/error.hpp"
#include "mgm/mvar.hpp"
#include "mgm/samplers.hpp"
#include "support.hpp"

using namespace mgm;

namespace {

Dataset ar1(int n, double phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, 1);
  x(0, 0) = z(rng);
  for (int t = 1; t < n; ++t) x(t, 0) = phi * x(t - 1, 0) + z(rng);
  return test::gaussian_dataset(x);
}

}  // namespace

TEST(FitMvar, RecoversExampleEffects) {
  const Dataset data = sample_mvar(test::example_mvar_model(), 200, 2000);
  const MvarFit fit = fit_mvar(data, {1}, MvarOptions{});
  ASSERT_EQ(fit.wadj.size(), 1u);
  const auto found = test::directed_set(fit.wadj[0]);
  for (const auto& e : test::example_mvar_effects()) EXPECT_TRUE(found.count(e)) << e.first << "<-" << e.second;
  EXPECT_EQ(fit.signs[0](4, 5), Sign::positive);
  EXPECT_EQ(fit.signs[0](0, 2), Sign::undefined);
}

TEST(FitMvar, AutoregressiveCoefficientMatchesLeastSquares) {
  const Dataset data = ar1(2000, 0.5, 1);
  MvarOptions o;
  o.selection.threshold = ThresholdMode::none;
  o.selection.n_lambda = 100;
  o.selection.min_ratio = 1e-6;
  const MvarFit fit = fit_mvar(data, {1}, o);
  // Least-squares AR oracle on the same rows.
  const Eigen::VectorXd y = data.values.col(0).tail(1999);
  const Eigen::VectorXd x = data.values.col(0).head(1999);
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd xc = x.array() - x.mean();
  const double phi = xc.dot(yc) / xc.squaredNorm();
  EXPECT_NEAR(phi, 0.5, 0.05);
  // wadj is on the standardized scale, which for a stationary AR(1) is
  // phi times the ratio of the lagged and current sds (about 1).
  const double ratio = std::sqrt(xc.squaredNorm() / yc.squaredNorm());
  EXPECT_NEAR(fit.wadj[0](0, 0), phi * ratio, 0.05);
}

TEST(FitMvar, WhiteNoiseGivesEmptyModel) {
  MvarOptions o;
  o.selection.method = LambdaSelection::ebic;
  int empty = 0;
  for (int r = 0; r < 50; ++r) {
    std::mt19937_64 rng(400 + r);
    const MvarFit fit = fit_mvar(test::gaussian_dataset(test::gaussian_matrix(200, 3, rng)), {1}, o);
    if (fit.wadj[0].isZero(0.0)) ++empty;
  }
  EXPECT_GE(empty, 45);
}

TEST(FitMvar, InclusionMaskFollowsConsec) {
  std::mt19937_64 rng(7);
  Dataset data = test::gaussian_dataset(test::gaussian_matrix(12, 2, rng));
  data.consec = std::vector<int>{1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6};
  MvarOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MvarFit fit = fit_mvar(data, {1}, o);
  EXPECT_EQ(std::count(fit.inclusion_mask.begin(), fit.inclusion_mask.end(), true), 10);
  EXPECT_FALSE(fit.inclusion_mask[0]);
  EXPECT_FALSE(fit.inclusion_mask[6]);
}

TEST(FitMvar, MultipleLags) {
  const Dataset data = sample_mvar(test::example_mvar_model(), 200, 3);
  MvarOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MvarFit fit = fit_mvar(data, {1, 3}, o);
  EXPECT_EQ(fit.wadj.size(), 2u);
  EXPECT_EQ(fit.lags, (std::vector<int>{1, 3}));
}

TEST(FitMvar, OptionValidation) {
  const Dataset data = sample_mvar(test::example_mvar_model(), 50, 4);
  EXPECT_THROW(fit_mvar(data, {}, MvarOptions{}), ModelError);
  EXPECT_THROW(fit_mvar(data, {2, 1}, MvarOptions{}), ModelError);
  EXPECT_THROW(fit_mvar(data, {0}, MvarOptions{}), ModelError);
}

TEST(VarEdgeTables, OrientationAndSelfLoops) {
  MvarFit fit;
  fit.specs.assign(6, VariableSpec::gaussian());
  fit.lags = {1};
  fit.wadj = {Eigen::MatrixXd::Zero(6, 6)};
  fit.signs = {SignMatrix(6, 6)};
  fit.wadj[0](4, 5) = 0.31;
  fit.signs[0](4, 5) = Sign::positive;
  fit.wadj[0](2, 2) = 0.2;
  const auto tables = var_edge_tables(fit);
  ASSERT_EQ(tables.size(), 1u);
  ASSERT_EQ(tables[0].size(), 2u);
  bool cross = false;
  bool loop = false;
  for (const auto& e : tables[0]) {
    if (e.source == 5 && e.target == 4) {
      cross = true;
      EXPECT_DOUBLE_EQ(e.weight, 0.31);
      EXPECT_EQ(e.sign, Sign::positive);
    }
    if (e.source == 2 && e.target == 2) loop = true;
  }
  EXPECT_TRUE(cross);
  EXPECT_TRUE(loop);
  fit.wadj[0].setZero();
  EXPECT_TRUE(var_edge_tables(fit)[0].empty());
}

TEST(FitMvar, DeterministicAcrossThreadCounts) {
  const Dataset data = sample_mvar(test::example_mvar_model(), 150, 8);
  MvarOptions o;
  const MvarFit a = fit_mvar(data, {1}, o);
  o.threads = 3;
  const MvarFit b = fit_mvar(data, {1}, o);
  EXPECT_EQ(a.wadj[0], b.wadj[0]);
  EXPECT_EQ(a.signs[0], b.signs[0]);
}
