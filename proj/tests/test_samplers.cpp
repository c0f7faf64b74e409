#include <gtest/gtest.h>

#include <cmath>

#include "mgm/error.hpp"
#include "mgm/samplers.hpp"
#include "support.hpp"

using namespace mgm;

namespace {

double lag_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size() - 1;
  const Eigen::VectorXd x = a.head(n).array() - a.head(n).mean();
  const Eigen::VectorXd y = b.tail(n).array() - b.tail(n).mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd x = a.array() - a.mean();
  const Eigen::VectorXd y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

FactorModel binary_pair(double cell11) {
  FactorModel m;
  m.specs.assign(2, VariableSpec::categorical(2));
  m.thresholds.assign(2, {0.0, 0.0});
  m.sds.assign(2, 1.0);
  NdArray a({2, 2});
  a[3] = cell11;
  m.factors.push_back({{0, 1}, a});
  return m;
}

FactorModel gaussian_pair(double theta) {
  FactorModel m;
  m.specs.assign(2, VariableSpec::gaussian());
  m.thresholds.assign(2, {0.0});
  m.sds.assign(2, 1.0);
  m.factors.push_back({{0, 1}, NdArray({1, 1}, std::vector<double>{theta})});
  return m;
}

MvarModel gaussian_var(double ar, double cross) {
  MvarModel m;
  m.specs.assign(2, VariableSpec::gaussian());
  m.coefficients = MvarCoefficients(2, 1, {1});
  m.coefficients.at(0, 0, 0, 0, 0) = ar;
  m.coefficients.at(1, 0, 0, 0, 0) = cross;
  m.thresholds.assign(2, {0.0});
  m.sds.assign(2, 1.0);
  return m;
}

}  // namespace

TEST(ExactJoint, SingleBinaryNode) {
  FactorModel m;
  m.specs = {VariableSpec::categorical(2)};
  m.thresholds = {{0.0, 0.0}};
  m.sds = {1.0};
  JointTable t = exact_joint_small(m);
  EXPECT_DOUBLE_EQ(t.probabilities[0], 0.5);
  m.thresholds = {{0.0, 1.0}};
  t = exact_joint_small(m);
  EXPECT_NEAR(t.probabilities[0], 1.0 / (1.0 + std::exp(1.0)), 1e-15);
  EXPECT_NEAR(t.probabilities[0], 0.269, 1e-3);
  EXPECT_NEAR(t.probabilities[1], 0.731, 1e-3);
}

TEST(ExactJoint, TwoBinaryNodes) {
  const JointTable t = exact_joint_small(binary_pair(1.0));
  const double e = std::exp(1.0);
  EXPECT_NEAR(t.probabilities[3], e / (3.0 + e), 1e-15);
  EXPECT_NEAR(t.log_normalizer, std::log(3.0 + e), 1e-12);
}

TEST(ExactJoint, RejectsContinuousVariables) {
  EXPECT_THROW(exact_joint_small(test::example_mgm_model()), ModelError);
}

TEST(SampleMgm, IndependentGaussians) {
  FactorModel m = gaussian_pair(0.0);
  const int n = 5000;
  const Dataset d = sample_mgm(m, n, 1);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd c = d.values.col(j);
    const double mean = c.mean();
    const double sd = std::sqrt((c.array() - mean).square().sum() / (n - 1));
    EXPECT_LT(std::abs(mean), 3.0 / std::sqrt(n));
    EXPECT_NEAR(sd, 1.0, 0.1);
  }
}

TEST(SampleMgm, BinaryPairMatchesEnumeration) {
  const FactorModel m = binary_pair(1.3);
  const JointTable t = exact_joint_small(m);
  const int n = 50000;
  const Dataset d = sample_mgm(m, n, 2);
  std::vector<double> freq(4, 0.0);
  for (int i = 0; i < n; ++i) freq[static_cast<int>(d.values(i, 0) * 2 + d.values(i, 1))] += 1.0 / n;
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(freq[c], t.probabilities[c], 0.02);
}

TEST(SampleMgm, Deterministic) {
  const Dataset a = sample_mgm(test::example_mgm_model(), 100, 3);
  const Dataset b = sample_mgm(test::example_mgm_model(), 100, 3);
  const Dataset c = sample_mgm(test::example_mgm_model(), 100, 4);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.specs, test::example_mgm_model().specs);
}

TEST(SampleMgm, InvalidModel) {
  FactorModel m = test::example_mgm_model();
  m.factors[0].members = {0, 0};
  try {
    sample_mgm(m, 10, 1);
    FAIL() << "expected an error";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("invalid model"), std::string::npos);
  }
}

TEST(SampleMgm, NonNormalizableDiverges) {
  try {
    sample_mgm(gaussian_pair(1.5), 1000, 5);
    FAIL() << "expected an error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("non-normalizable specification suspected"), std::string::npos);
  }
}

TEST(SampleMvar, ZeroCoefficientsAreSeriallyIndependent) {
  const int n = 5000;
  const Dataset d = sample_mvar(gaussian_var(0.0, 0.0), n, 6);
  for (int j = 0; j < 2; ++j)
    EXPECT_LT(std::abs(lag_correlation(d.values.col(j), d.values.col(j))), 3.0 / std::sqrt(n));
}

TEST(SampleMvar, Ar1Autocorrelation) {
  const Dataset d = sample_mvar(gaussian_var(0.4, 0.0), 5000, 7);
  EXPECT_NEAR(lag_correlation(d.values.col(0), d.values.col(0)), 0.4, 0.05);
}

TEST(SampleMvar, ExampleModelCategoriesInRange) {
  const Dataset d = sample_mvar(test::example_mvar_model(), 200, 8);
  EXPECT_EQ(d.n(), 200);
  EXPECT_NO_THROW(validate_dataset(d));
  EXPECT_EQ(d.values, sample_mvar(test::example_mvar_model(), 200, 8).values);
}

TEST(SampleTv, ConstantModelsMatchStationary) {
  const int n = 5000;
  FactorModel m = gaussian_pair(0.5);
  m.thresholds = {{1.0}, {-0.5}};
  const Dataset tv = sample_tvmgm(std::vector<FactorModel>(n, m), n, 9);
  const Dataset st = sample_mgm(m, n, 10);
  for (int j = 0; j < 2; ++j) {
    const double se = std::sqrt(2.0 * 2.0 / n);  // conditional variance is at most ~2 here
    EXPECT_NEAR(tv.values.col(j).mean(), st.values.col(j).mean(), 3.0 * se);
  }
}

TEST(SampleTv, GrowingInteractionRaisesWindowedCorrelation) {
  const int n = 4000;
  std::vector<FactorModel> models;
  for (int t = 0; t < n; ++t) models.push_back(gaussian_pair(0.8 * t / (n - 1)));
  const Dataset d = sample_tvmgm(models, n, 11);
  const int w = n / 4;
  const double first = correlation(d.values.col(0).head(w), d.values.col(1).head(w));
  const double last = correlation(d.values.col(0).tail(w), d.values.col(1).tail(w));
  EXPECT_GT(last, first + 0.3);
}

TEST(SampleTv, StepInLaggedEffect) {
  const int n = 4000;
  std::vector<MvarModel> models;
  for (int t = 0; t < n; ++t) models.push_back(gaussian_var(0.0, t < n / 2 ? 0.0 : 0.4));
  const Dataset d = sample_tvmvar(models, n, 12);
  const double before = lag_correlation(d.values.col(0).head(n / 2), d.values.col(1).head(n / 2));
  const double after = lag_correlation(d.values.col(0).tail(n / 2), d.values.col(1).tail(n / 2));
  EXPECT_LT(std::abs(before), 0.1);
  EXPECT_GT(after, 0.25);
}

TEST(SampleTv, SequenceLengthMustMatch) {
  EXPECT_THROW(sample_tvmgm(std::vector<FactorModel>(5, gaussian_pair(0.1)), 6, 1), ModelError);
  EXPECT_THROW(sample_tvmvar(std::vector<MvarModel>(5, gaussian_var(0.1, 0.0)), 6, 1), ModelError);
}
