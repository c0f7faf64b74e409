#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mgm/error.hpp"
#include "mgm/mgm.hpp"
#include "mgm/mvar.hpp"
#include "mgm/prediction.hpp"
#include "mgm/samplers.hpp"
#include "support.hpp"

using namespace mgm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

int metric_index(const PredictionResult& r, const std::string& name) {
  for (std::size_t i = 0; i < r.metric_names.size(); ++i)
    if (r.metric_names[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST(Metrics, HandCountedClassification) {
  const Eigen::VectorXd truth = vec({0, 0, 0, 1});
  EXPECT_EQ(metric_cc(truth, vec({0, 0, 1, 1})), 0.75);
  EXPECT_EQ(metric_ncc(truth, vec({0, 0, 1, 1})), 0.0);
  EXPECT_EQ(metric_cc(truth, truth), 1.0);
  EXPECT_EQ(metric_ncc(truth, truth), 1.0);
}

TEST(Metrics, NccClampedBelowBaseline) {
  const Eigen::VectorXd truth = vec({0, 0, 0, 1});
  const Eigen::VectorXd pred = vec({1, 1, 0, 1});
  EXPECT_EQ(metric_cc(truth, pred), 0.5);
  EXPECT_EQ(metric_ncc_raw(truth, pred), -1.0);
  EXPECT_EQ(metric_ncc(truth, pred), 0.0);
  EXPECT_TRUE(std::isnan(metric_ncc(vec({1, 1, 1}), vec({1, 1, 0}))));
}

TEST(Metrics, ContinuousFormulas) {
  const Eigen::VectorXd truth = vec({1, 2, 3, 4});
  const Eigen::VectorXd pred = vec({1, 2, 3, 6});
  EXPECT_DOUBLE_EQ(metric_rmse(truth, pred), 1.0);
  EXPECT_DOUBLE_EQ(metric_r2_raw(truth, pred), 1.0 - 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(metric_r2(truth, vec({4, 3, 2, 1})), 0.0);
  EXPECT_LT(metric_r2_raw(truth, vec({4, 3, 2, 1})), 0.0);
  EXPECT_TRUE(std::isnan(metric_r2(vec({2, 2, 2}), vec({1, 2, 3}))));
}

TEST(Metrics, WeightsAndLookup) {
  const Eigen::VectorXd truth = vec({0, 1});
  const Eigen::VectorXd pred = vec({0, 0});
  EXPECT_DOUBLE_EQ(metric_cc(truth, pred, vec({3, 1})), 0.75);
  EXPECT_THROW(metric_cc(truth, vec({0})), Error);
  EXPECT_EQ(builtin_metric("nCC").name, "nCC");
  EXPECT_TRUE(builtin_metric("CC").categorical);
  EXPECT_THROW(builtin_metric("AUC"), Error);
}

TEST(PredictMgm, InterceptOnlyPredictsModalCategory) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.3);
  std::normal_distribution<double> z;
  Dataset d;
  d.specs = {VariableSpec::categorical(2), VariableSpec::gaussian()};
  d.values.resize(300, 2);
  for (int i = 0; i < 300; ++i) d.values.row(i) << (coin(rng) ? 1 : 0), z(rng);
  MgmOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MgmFit fit = fit_mgm(d, o);
  ASSERT_TRUE(fit.wadj.isZero(0.0));
  const PredictionResult r = predict(fit, d);
  EXPECT_TRUE((r.predicted.col(0).array() == 0.0).all());
  const double marginal = 1.0 - d.values.col(0).mean();
  EXPECT_NEAR(r.errors(0, metric_index(r, "CC")), marginal, 1e-12);
  EXPECT_NEAR(r.errors(0, metric_index(r, "nCC")), 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(r.errors(0, metric_index(r, "RMSE"))));
  EXPECT_EQ(r.probabilities[0].cols(), 2);
}

TEST(PredictMgm, DeterministicRelationship) {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd x = test::gaussian_matrix(200, 2, rng);
  x.col(1) = x.col(0) + 1e-3 * x.col(1);
  MgmOptions o;
  o.selection.threshold = ThresholdMode::none;
  const MgmFit fit = fit_mgm(test::gaussian_dataset(x), o);
  const PredictionResult r = predict(fit, test::gaussian_dataset(x));
  EXPECT_GT(r.errors(1, metric_index(r, "R2")), 0.99);
}

TEST(PredictMgm, SchemaMismatch) {
  const Dataset data = sample_mgm(test::example_mgm_model(), 100, 3);
  MgmOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MgmFit fit = fit_mgm(data, o);
  Dataset other = data;
  other.specs[0] = VariableSpec::poisson();
  EXPECT_THROW(predict(fit, other), Error);
}

TEST(PredictMvar, RowsOutsideMaskAreMissing) {
  const Dataset data = sample_mvar(test::example_mvar_model(), 120, 4);
  MvarOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MvarFit fit = fit_mvar(data, {1, 2}, o);
  const PredictionResult r = predict(fit, data);
  EXPECT_FALSE(r.predicted_rows[0]);
  EXPECT_FALSE(r.predicted_rows[1]);
  EXPECT_TRUE(std::isnan(r.predicted(1, 4)));
  EXPECT_TRUE(r.predicted_rows[2]);
  EXPECT_FALSE(std::isnan(r.predicted(2, 4)));
  EXPECT_FALSE(std::isnan(r.errors(4, metric_index(r, "RMSE"))));
}

TEST(PredictTv, SinglePointMethodsAgree) {
  const Dataset data = sample_mgm(test::example_mgm_model(), 150, 5);
  MgmOptions o;
  o.selection.method = LambdaSelection::ebic;
  TvMgmFit tv;
  tv.estpoints = {0.4};
  tv.bandwidth = 0.2;
  tv.fits = {fit_mgm(data, o)};
  tv.local_n = {150.0};
  const PredictionResult a = predict(tv, data, TvMethod::weighted);
  const PredictionResult b = predict(tv, data, TvMethod::closest);
  EXPECT_TRUE(a.predicted.isApprox(b.predicted));
}

TEST(PredictTv, IdenticalModelsMatchStationary) {
  const Dataset data = sample_mgm(test::example_mgm_model(), 150, 6);
  MgmOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MgmFit fit = fit_mgm(data, o);
  TvMgmFit tv;
  tv.estpoints = {0.0, 0.5, 1.0};
  tv.bandwidth = 0.3;
  tv.fits = {fit, fit, fit};
  tv.local_n = {1.0, 1.0, 1.0};
  const PredictionResult s = predict(fit, data);
  const PredictionResult w = predict(tv, data, TvMethod::weighted);
  EXPECT_LT((s.predicted - w.predicted).cwiseAbs().maxCoeff(), 1e-9);
  ASSERT_TRUE(w.tv_errors.has_value());
  EXPECT_EQ(w.tv_errors->size(), 3u);
}

TEST(PredictTv, ClosestUsesModelAtEstimationPoint) {
  const Dataset a = sample_mgm(test::example_mgm_model(), 101, 7);
  MgmOptions o;
  o.selection.method = LambdaSelection::ebic;
  const MgmFit early = fit_mgm(a, o);
  MgmFit late = early;
  for (auto& nm : late.nodemodels) nm.intercept.setZero();
  TvMgmFit tv;
  tv.estpoints = {0.0, 1.0};
  tv.bandwidth = 0.2;
  tv.fits = {early, late};
  tv.local_n = {1.0, 1.0};
  const PredictionResult r = predict(tv, a, TvMethod::closest);
  const PredictionResult e = predict(early, a);
  const PredictionResult l = predict(late, a);
  EXPECT_EQ(r.predicted.row(0), e.predicted.row(0));
  EXPECT_EQ(r.predicted.row(100), l.predicted.row(100));
}
