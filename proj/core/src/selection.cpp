#include "mgm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mgm/error.hpp"

namespace mgm {

namespace {
constexpr double kFoldTolerance = 1e-5;
}  // namespace

double ebic(double loglik, int s0, double n_eff, int p_model, double gamma) {
  return -2.0 * loglik + s0 * std::log(n_eff) + 2.0 * gamma * s0 * std::log(static_cast<double>(p_model));
}

std::vector<int> assign_folds(const Eigen::VectorXd& weights, int n, int folds, std::uint64_t seed) {
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  std::vector<int> rows;
  for (int i = 0; i < n; ++i)
    if (weights.size() == 0 || weights[i] > 0.0) rows.push_back(i);
  if (static_cast<int>(rows.size()) < 2 * folds) {
    throw DataError("too few observations for " + std::to_string(folds) + " folds (each fold needs 2)");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = rows.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(rows[i - 1], rows[j]);
  }
  std::vector<int> fold(n, -1);
  for (std::size_t i = 0; i < rows.size(); ++i) fold[rows[i]] = static_cast<int>(i % folds);
  return fold;
}

double heldout_loss(const GlmSolution& s, const GlmProblem& pr, const std::vector<int>& rows) {
  double total = 0.0;
  double wsum = 0.0;
  for (int i : rows) {
    const double w = pr.weights.size() ? pr.weights[i] : 1.0;
    if (w == 0.0) continue;
    const Eigen::VectorXd eta = s.intercept + s.beta.transpose() * pr.x.row(i).transpose();
    double loss = 0.0;
    switch (pr.family) {
      case Family::gaussian: loss = 0.5 * (pr.y[i] - eta[0]) * (pr.y[i] - eta[0]); break;
      case Family::poisson: {
        const double mu = std::exp(std::clamp(eta[0], -30.0, 30.0));
        const double y = pr.y[i];
        loss = (y > 0 ? y * std::log(y / mu) : 0.0) - (y - mu);
        break;
      }
      case Family::multinomial: {
        const double m = eta.maxCoeff();
        const double lse = m + std::log((eta.array() - m).exp().sum());
        loss = lse - eta[static_cast<Eigen::Index>(pr.y[i])];
        break;
      }
    }
    total += w * loss;
    wsum += w;
  }
  return wsum > 0.0 ? total / wsum : 0.0;
}

LambdaChoice select_lambda(const GlmProblem& pr, const std::vector<double>& lambdas, const SelectionSpec& spec,
                           double n_eff) {
  if (lambdas.empty()) throw DataError("empty lambda path");
  LambdaChoice out;
  GlmControl control;
  control.early_stop = true;
  out.path = fit_path(pr, lambdas, control);
  out.lambdas.assign(lambdas.begin(), lambdas.begin() + static_cast<std::ptrdiff_t>(out.path.size()));
  const std::size_t m = out.lambdas.size();
  out.criterion.assign(m, 0.0);

  if (spec.method == LambdaSelection::ebic) {
    const int p_model = std::max(1, static_cast<int>(pr.x.cols()));
    for (std::size_t l = 0; l < m; ++l) {
      out.criterion[l] = ebic(out.path[l].loglik, out.path[l].s0, n_eff, p_model, spec.gamma);
    }
  } else if (m > 1) {
    const int n = static_cast<int>(pr.x.rows());
    // Held-out losses only need a few digits; the selected model comes from
    // the full-data path at the default tolerance.
    GlmControl fold_control;
    fold_control.tol = kFoldTolerance;
    const std::vector<int> fold = assign_folds(pr.weights, n, spec.folds, spec.seed);
    int used = 0;
    for (int f = 0; f < spec.folds; ++f) {
      // Only the positively weighted training rows enter the fold fit.
      std::vector<int> test, keep;
      for (int i = 0; i < n; ++i) {
        if (fold[i] == f) {
          test.push_back(i);
        } else if (fold[i] >= 0) {
          keep.push_back(i);
        }
      }
      GlmProblem train;
      train.family = pr.family;
      train.classes = pr.classes;
      train.alpha = pr.alpha;
      train.x = pr.x(keep, Eigen::all);
      train.y = pr.y(keep);
      if (pr.weights.size() != 0) train.weights = pr.weights(keep);
      std::vector<GlmSolution> path;
      try {
        path = fit_path(train, out.lambdas, fold_control);
      } catch (const DegenerateResponseError&) {
        continue;  // the training rows of this fold hold a single response value
      }
      ++used;
      for (std::size_t l = 0; l < m; ++l) out.criterion[l] += heldout_loss(path[l], pr, test);
    }
    if (used == 0) throw DegenerateResponseError();
    for (double& c : out.criterion) c /= used;
  }

  int best = 0;
  for (std::size_t l = 1; l < m; ++l) {
    if (out.criterion[l] < out.criterion[best]) best = static_cast<int>(l);
  }
  out.index = best;
  return out;
}

ThresholdResult tau_threshold(const Eigen::MatrixXd& beta, double n_eff, int p_model, ThresholdMode mode) {
  ThresholdResult out{beta, 0.0};
  if (mode == ThresholdMode::none || n_eff <= 0.0 || p_model < 1) return out;
  const double rate = std::sqrt(std::log(static_cast<double>(p_model)) / n_eff);
  for (Eigen::Index c = 0; c < beta.cols(); ++c) {
    const double s0 = static_cast<double>((beta.col(c).array() != 0.0).count());
    const double tau = s0 * rate;
    out.tau = std::max(out.tau, tau);
    for (Eigen::Index j = 0; j < beta.rows(); ++j) {
      if (std::abs(out.beta(j, c)) < tau) out.beta(j, c) = 0.0;
    }
  }
  return out;
}

AlphaChoice select_alpha(const GlmProblem& pr, const SelectionSpec& spec, double n_eff) {
  if (spec.alpha_seq.empty()) throw DataError("alpha sequence is empty");
  std::vector<double> alphas = spec.alpha_seq;
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  AlphaChoice best;
  bool have = false;
  for (double a : alphas) {
    GlmProblem p = pr;
    p.alpha = a;
    const auto lambdas = lambda_path(p, spec.n_lambda, spec.min_ratio);
    LambdaChoice choice = select_lambda(p, lambdas, spec, n_eff);
    const double crit = choice.criterion[choice.index];
    if (!have || crit < best.criterion) {
      best = AlphaChoice{a, crit, std::move(choice)};
      have = true;
    }
  }
  return best;
}

}  // namespace mgm
