#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "mgm/model.hpp"

namespace mgm::test {

// Four-variable mixed model used for the MGM sampling and recovery example
// (0-based): gaussian, binary, 4-category, gaussian with factors {0,3},
// {1,2} and {0,1}.
inline FactorModel example_mgm_model() {
  FactorModel m;
  m.specs = {VariableSpec::gaussian(), VariableSpec::categorical(2), VariableSpec::categorical(4),
             VariableSpec::gaussian()};
  m.thresholds = {{0.0}, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, {0.0}};
  m.sds = {1.0, 1.0, 1.0, 1.0};
  m.factors.push_back({{0, 3}, NdArray({1, 1}, std::vector<double>{0.5})});
  NdArray b({2, 4});
  b[0] = 1.0;  // [0,0]
  b[1] = 1.0;  // [0,1]
  m.factors.push_back({{1, 2}, b});
  NdArray c({1, 2});
  c[0] = 1.0;
  m.factors.push_back({{0, 1}, c});
  return m;
}

inline std::set<std::pair<int, int>> example_mgm_edges() { return {{0, 1}, {1, 2}, {0, 3}}; }

// Six-variable mixed VAR(1) example: two binary, two 4-category and two
// gaussian variables with effects 5 -> 4, 4 -> 0 and 2 -> 0 (0-based).
inline MvarModel example_mvar_model() {
  MvarModel m;
  m.specs = {VariableSpec::categorical(2), VariableSpec::categorical(2), VariableSpec::categorical(4),
             VariableSpec::categorical(4), VariableSpec::gaussian(),       VariableSpec::gaussian()};
  m.coefficients = MvarCoefficients(6, 4, {1});
  m.coefficients.at(4, 5, 0, 0, 0) = 0.4;
  m.coefficients.at(0, 4, 1, 0, 0) = 1.0;
  m.coefficients.at(0, 2, 0, 0, 0) = 1.0;
  m.coefficients.at(0, 2, 0, 1, 0) = 1.0;
  m.coefficients.at(0, 2, 1, 2, 0) = 1.0;
  m.coefficients.at(0, 2, 1, 3, 0) = 1.0;
  for (const auto& s : m.specs) m.thresholds.push_back(std::vector<double>(s.levels, 0.0));
  m.sds.assign(6, 1.0);
  return m;
}

// (target, predictor) pairs of the true lagged effects.
inline std::set<std::pair<int, int>> example_mvar_effects() { return {{4, 5}, {0, 4}, {0, 2}}; }

inline std::set<std::pair<int, int>> edge_set(const Eigen::MatrixXd& wadj) {
  std::set<std::pair<int, int>> out;
  for (int i = 0; i < wadj.rows(); ++i)
    for (int j = i + 1; j < wadj.cols(); ++j)
      if (wadj(i, j) > 0.0) out.insert({i, j});
  return out;
}

inline std::set<std::pair<int, int>> directed_set(const Eigen::MatrixXd& wadj) {
  std::set<std::pair<int, int>> out;
  for (int i = 0; i < wadj.rows(); ++i)
    for (int j = 0; j < wadj.cols(); ++j)
      if (wadj(i, j) > 0.0) out.insert({i, j});
  return out;
}

inline Eigen::MatrixXd gaussian_matrix(int n, int q, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) x(i, j) = z(rng);
  return x;
}

inline Dataset gaussian_dataset(const Eigen::MatrixXd& x) {
  Dataset d;
  d.values = x;
  d.specs.assign(static_cast<std::size_t>(x.cols()), VariableSpec::gaussian());
  return d;
}

// Spearman rank correlation (average ranks for ties).
inline double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const Eigen::Map<const Eigen::VectorXd> x(ra.data(), static_cast<Eigen::Index>(ra.size()));
  const Eigen::Map<const Eigen::VectorXd> y(rb.data(), static_cast<Eigen::Index>(rb.size()));
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double den = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
  return den > 0.0 ? xc.dot(yc) / den : 0.0;
}

}  // namespace mgm::test
