#include "mgm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mgm/error.hpp"

namespace mgm {

namespace {

constexpr double kDivergence = 1e6;
constexpr double kMaxLogRate = 30.0;

using Rng = std::mt19937_64;

void require_valid(const ModelDiagnostics& d) {
  if (!d.valid()) throw ModelError("invalid model: " + d.violations.front());
}

int draw_category(const std::vector<double>& potential, Rng& rng) {
  const double m = *std::max_element(potential.begin(), potential.end());
  std::vector<double> w(potential.size());
  double total = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) total += (w[c] = std::exp(potential[c] - m));
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (u < w[c]) return static_cast<int>(c);
    u -= w[c];
  }
  return static_cast<int>(w.size()) - 1;
}

double draw_value(const VariableSpec& spec, const std::vector<double>& potential, double sd, Rng& rng) {
  double x = 0.0;
  switch (spec.kind) {
    case VarKind::gaussian:
      x = sd * potential[0] + sd * std::normal_distribution<double>(0.0, 1.0)(rng);
      break;
    case VarKind::poisson:
      x = static_cast<double>(
          std::poisson_distribution<long long>(std::exp(std::min(potential[0], kMaxLogRate)))(rng));
      break;
    case VarKind::categorical:
      return draw_category(potential, rng);
  }
  if (!std::isfinite(x) || std::abs(x) > kDivergence) {
    throw NumericalError("non-normalizable specification suspected");
  }
  return x;
}

// Node conditionals of a factor model.
class Gibbs {
 public:
  explicit Gibbs(const FactorModel& model) : m_(model), touching_(model.p()) {
    for (std::size_t f = 0; f < model.factors.size(); ++f) {
      const auto& members = model.factors[f].members;
      for (std::size_t a = 0; a < members.size(); ++a) touching_[members[a]].push_back({f, a});
    }
  }

  double stat(int r, double x) const {
    switch (m_.specs[r].kind) {
      case VarKind::gaussian: return x / m_.sds[r];
      case VarKind::poisson: return x;
      case VarKind::categorical: return 1.0;
    }
    return x;
  }

  void sweep(std::vector<double>& x, Rng& rng) const {
    for (int s = 0; s < m_.p(); ++s) {
      const auto& spec = m_.specs[s];
      std::vector<double> pot = m_.thresholds[s];
      for (const auto& [f, pos] : touching_[s]) {
        const Factor& factor = m_.factors[f];
        std::vector<int> idx(factor.members.size(), 0);
        double scale = 1.0;
        for (std::size_t a = 0; a < factor.members.size(); ++a) {
          if (a == pos) continue;
          const int r = factor.members[a];
          if (m_.specs[r].categorical()) {
            idx[a] = static_cast<int>(x[r]);
          } else {
            scale *= stat(r, x[r]);
          }
        }
        for (std::size_t c = 0; c < pot.size(); ++c) {
          idx[pos] = static_cast<int>(c);
          pot[c] += scale * factor.params.at(idx);
        }
      }
      x[s] = draw_value(spec, pot, spec.kind == VarKind::gaussian ? m_.sds[s] : 1.0, rng);
    }
  }

 private:
  const FactorModel& m_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> touching_;
};

std::vector<double> mvar_potential(const MvarModel& m, int s, const Eigen::MatrixXd& data, int t) {
  std::vector<double> pot = m.thresholds[s];
  const auto& c = m.coefficients;
  for (std::size_t l = 0; l < c.lags.size(); ++l) {
    const int row = t - c.lags[l];
    for (int j = 0; j < m.p(); ++j) {
      const double v = data(row, j);
      for (std::size_t k = 0; k < pot.size(); ++k) {
        if (m.specs[j].categorical()) {
          pot[k] += c.at(s, j, static_cast<int>(k), static_cast<int>(v), static_cast<int>(l));
        } else {
          pot[k] += c.at(s, j, static_cast<int>(k), 0, static_cast<int>(l)) * v;
        }
      }
    }
  }
  return pot;
}

void draw_mvar_row(const MvarModel& m, Eigen::MatrixXd& data, int t, bool marginal, Rng& rng) {
  for (int s = 0; s < m.p(); ++s) {
    const std::vector<double> pot = marginal ? m.thresholds[s] : mvar_potential(m, s, data, t);
    const auto& spec = m.specs[s];
    if (spec.kind == VarKind::gaussian) {
      // Means are on the raw scale for lagged models.
      const double x = pot[0] + m.sds[s] * std::normal_distribution<double>(0.0, 1.0)(rng);
      if (!std::isfinite(x) || std::abs(x) > kDivergence) {
        throw NumericalError("non-normalizable specification suspected");
      }
      data(t, s) = x;
    } else {
      data(t, s) = draw_value(spec, pot, 1.0, rng);
    }
  }
}

int max_lag(const MvarModel& m) { return *std::max_element(m.coefficients.lags.begin(), m.coefficients.lags.end()); }

}  // namespace

Dataset sample_mgm(const FactorModel& model, int n, std::uint64_t seed, const GibbsOptions& options) {
  require_valid(validate_model(model));
  if (n < 1) throw ModelError("sample size must be positive");
  if (options.burn_in < 0 || options.thin < 1) throw ModelError("invalid burn-in or thinning");
  const Gibbs gibbs(model);
  Rng rng(seed);
  std::vector<double> x(model.p(), 0.0);
  for (int b = 0; b < options.burn_in; ++b) gibbs.sweep(x, rng);
  Dataset out;
  out.specs = model.specs;
  out.values.resize(n, model.p());
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < options.thin; ++t) gibbs.sweep(x, rng);
    for (int s = 0; s < model.p(); ++s) out.values(i, s) = x[s];
  }
  return out;
}

JointTable exact_joint_small(const FactorModel& model) {
  require_valid(validate_model(model));
  std::vector<int> shape;
  double states = 1.0;
  for (const auto& s : model.specs) {
    if (!s.categorical()) throw ModelError("exact enumeration needs all variables categorical");
    shape.push_back(s.levels);
    states *= s.levels;
  }
  if (states > 1e6) throw ModelError("state space too large for enumeration");
  JointTable out{NdArray(shape), 0.0};
  std::vector<double> logp(out.probabilities.size());
  std::size_t flat = 0;
  for_each_index(shape, [&](std::span<const int> x) {
    double e = 0.0;
    for (int s = 0; s < model.p(); ++s) e += model.thresholds[s][x[s]];
    for (const auto& f : model.factors) {
      std::vector<int> idx;
      for (int r : f.members) idx.push_back(x[r]);
      e += f.params.at(idx);
    }
    logp[flat++] = e;
  });
  const double m = *std::max_element(logp.begin(), logp.end());
  double total = 0.0;
  for (double v : logp) total += std::exp(v - m);
  out.log_normalizer = m + std::log(total);
  for (std::size_t i = 0; i < logp.size(); ++i) out.probabilities[i] = std::exp(logp[i] - out.log_normalizer);
  return out;
}

Dataset sample_mvar(const MvarModel& model, int n, std::uint64_t seed) {
  require_valid(validate_model(model));
  const int lmax = max_lag(model);
  if (n <= lmax) throw ModelError("sample size must exceed the largest lag");
  Rng rng(seed);
  Dataset out;
  out.specs = model.specs;
  out.values = Eigen::MatrixXd::Zero(n, model.p());
  for (int t = 0; t < n; ++t) draw_mvar_row(model, out.values, t, t < lmax, rng);
  return out;
}

Dataset sample_tvmgm(const std::vector<FactorModel>& models, int n, std::uint64_t seed,
                     const TvGibbsOptions& options) {
  if (static_cast<int>(models.size()) != n) throw ModelError("model sequence length differs from N");
  if (n < 1) throw ModelError("sample size must be positive");
  if (options.burn_in < 0 || options.sweeps_per_row < 1) throw ModelError("invalid sweep counts");
  for (const auto& m : models) {
    require_valid(validate_model(m));
    if (m.specs != models.front().specs) throw ModelError("variable specs change over time");
  }
  Rng rng(seed);
  const int p = models.front().p();
  std::vector<double> x(p, 0.0);
  {
    const Gibbs first(models.front());
    for (int b = 0; b < options.burn_in; ++b) first.sweep(x, rng);
  }
  Dataset out;
  out.specs = models.front().specs;
  out.values.resize(n, p);
  for (int t = 0; t < n; ++t) {
    const Gibbs gibbs(models[t]);
    for (int k = 0; k < options.sweeps_per_row; ++k) gibbs.sweep(x, rng);
    for (int s = 0; s < p; ++s) out.values(t, s) = x[s];
  }
  return out;
}

Dataset sample_tvmvar(const std::vector<MvarModel>& models, int n, std::uint64_t seed) {
  if (static_cast<int>(models.size()) != n) throw ModelError("model sequence length differs from N");
  for (const auto& m : models) {
    require_valid(validate_model(m));
    if (m.specs != models.front().specs) throw ModelError("variable specs change over time");
    if (m.coefficients.lags != models.front().coefficients.lags) throw ModelError("lag set changes over time");
  }
  const int lmax = max_lag(models.front());
  if (n <= lmax) throw ModelError("sample size must exceed the largest lag");
  Rng rng(seed);
  Dataset out;
  out.specs = models.front().specs;
  out.values = Eigen::MatrixXd::Zero(n, models.front().p());
  for (int t = 0; t < n; ++t) draw_mvar_row(models[t], out.values, t, t < lmax, rng);
  return out;
}

}  // namespace mgm
