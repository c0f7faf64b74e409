#include "mgm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgm/error.hpp"

namespace mgm {

namespace {

constexpr double kEtaClamp = 30.0;
constexpr double kProbFloor = 1e-5;
constexpr double kSdFloor = 1e-8;
constexpr double kMultinomialRidge = 1e-8;
constexpr std::size_t kMinPathFits = 5;
constexpr double kDevianceChange = 1e-5;
constexpr double kMaxDevianceRatio = 0.999;

Eigen::VectorXd normalized_weights(const GlmProblem& pr) {
  const Eigen::Index n = pr.x.rows();
  Eigen::VectorXd w = pr.weights.size() == 0 ? Eigen::VectorXd::Ones(n) : pr.weights;
  return w / w.sum();
}

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double penalty(const Eigen::MatrixXd& beta, double lambda, double alpha) {
  return lambda * (alpha * beta.cwiseAbs().sum() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

// Coordinate descent on 0.5 * Σ W_i r_i^2 + l1 |β|_1 + l2/2 |β|^2 with an
// unpenalized intercept, where r = z - b0 - xβ is kept up to date.
struct WlsResult {
  long sweeps = 0;
  bool converged = false;
};

WlsResult cd_wls(const Eigen::MatrixXd& x, const Eigen::VectorXd& W, double l1, double l2, double& b0,
                 Eigen::Ref<Eigen::VectorXd> beta, Eigen::VectorXd& r, double tol, long budget) {
  const Eigen::Index n = x.rows();
  const Eigen::Index q = x.cols();
  const double sum_w = W.sum();
  Eigen::VectorXd xw(q);
  for (Eigen::Index j = 0; j < q; ++j) xw[j] = W.dot(x.col(j).cwiseAbs2());
  const double* wp = W.data();
  double* rp = r.data();

  auto update_intercept = [&]() {
    if (!(sum_w > 0.0)) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += wp[i] * rp[i];
    const double d = s / sum_w;
    if (d == 0.0) return 0.0;
    b0 += d;
    for (Eigen::Index i = 0; i < n; ++i) rp[i] -= d;
    return std::abs(d);
  };
  auto update = [&](Eigen::Index j) {
    const double old = beta[j];
    const double* xp = x.col(j).data();
    double nb = 0.0;
    if (xw[j] > 0.0) {
      double g = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) g += wp[i] * rp[i] * xp[i];
      nb = soft(g + xw[j] * old, l1) / (xw[j] + l2);
    }
    const double d = nb - old;
    if (d == 0.0) return 0.0;
    beta[j] = nb;
    for (Eigen::Index i = 0; i < n; ++i) rp[i] -= d * xp[i];
    return std::abs(d);
  };

  WlsResult res;
  std::vector<Eigen::Index> active;
  while (res.sweeps < budget) {
    double delta = update_intercept();
    for (Eigen::Index j = 0; j < q; ++j) delta = std::max(delta, update(j));
    ++res.sweeps;
    if (delta < tol) {
      res.converged = true;
      break;
    }
    active.clear();
    for (Eigen::Index j = 0; j < q; ++j)
      if (beta[j] != 0.0) active.push_back(j);
    while (res.sweeps < budget) {
      double d = update_intercept();
      for (Eigen::Index j : active) d = std::max(d, update(j));
      ++res.sweeps;
      if (d < tol) break;
    }
  }
  return res;
}

bool degenerate(const GlmProblem& pr) {
  const Eigen::Index n = pr.y.size();
  bool seen = false;
  double first = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pr.weights.size() != 0 && !(pr.weights[i] > 0.0)) continue;
    if (!seen) {
      first = pr.y[i];
      seen = true;
    } else if (pr.y[i] != first) {
      return false;
    }
  }
  return true;
}

Eigen::MatrixXd indicator_response(const GlmProblem& pr) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(pr.y.size(), pr.classes);
  for (Eigen::Index i = 0; i < pr.y.size(); ++i) y(i, static_cast<Eigen::Index>(pr.y[i])) = 1.0;
  return y;
}

// Intercept-only solution and the mean response per class.
GlmSolution null_solution(const GlmProblem& pr, const Eigen::VectorXd& v, Eigen::MatrixXd& mu0) {
  const int k = pr.family == Family::multinomial ? pr.classes : 1;
  GlmSolution s;
  s.intercept = Eigen::VectorXd::Zero(k);
  s.beta = Eigen::MatrixXd::Zero(pr.x.cols(), k);
  mu0.resize(1, k);
  switch (pr.family) {
    case Family::gaussian:
      mu0(0, 0) = v.dot(pr.y);
      s.intercept[0] = mu0(0, 0);
      break;
    case Family::poisson:
      mu0(0, 0) = v.dot(pr.y);
      s.intercept[0] = std::log(std::max(mu0(0, 0), 1e-10));
      break;
    case Family::multinomial: {
      mu0.setZero();
      for (Eigen::Index i = 0; i < pr.y.size(); ++i) mu0(0, static_cast<Eigen::Index>(pr.y[i])) += v[i];
      for (int c = 0; c < k; ++c) s.intercept[c] = std::log(std::max(mu0(0, c), 1e-10));
      s.intercept.array() -= s.intercept.mean();
      break;
    }
  }
  return s;
}

Eigen::MatrixXd mean_response(const GlmProblem& pr, const Eigen::MatrixXd& eta) {
  switch (pr.family) {
    case Family::gaussian: return eta;
    case Family::poisson: return eta.array().min(kEtaClamp).max(-kEtaClamp).exp().matrix();
    case Family::multinomial: return softmax_rows(eta);
  }
  return eta;
}

double smooth_loss(const GlmProblem& pr, const Eigen::VectorXd& v, const Eigen::MatrixXd& eta) {
  double loss = 0.0;
  const Eigen::Index n = pr.y.size();
  switch (pr.family) {
    case Family::gaussian:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = pr.y[i] - eta(i, 0);
        loss += 0.5 * v[i] * r * r;
      }
      break;
    case Family::poisson:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double e = std::clamp(eta(i, 0), -kEtaClamp, kEtaClamp);
        loss += v[i] * (std::exp(e) - pr.y[i] * e);
      }
      break;
    case Family::multinomial:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (v[i] == 0.0) continue;
        const double m = eta.row(i).maxCoeff();
        const double lse = m + std::log((eta.row(i).array() - m).exp().sum());
        loss += v[i] * (lse - eta(i, static_cast<Eigen::Index>(pr.y[i])));
      }
      break;
  }
  return loss;
}

// Loss of a model reproducing every response exactly.
double saturated_loss(const GlmProblem& pr, const Eigen::VectorXd& v) {
  if (pr.family != Family::poisson) return 0.0;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < pr.y.size(); ++i) {
    const double y = pr.y[i];
    if (y > 0.0) loss += v[i] * (y - y * std::log(y));
  }
  return loss;
}

double full_objective(const GlmProblem& pr, const Eigen::VectorXd& v, const Eigen::MatrixXd& eta,
                      const Eigen::MatrixXd& beta, double lambda, double ridge) {
  return smooth_loss(pr, v, eta) + penalty(beta, lambda, pr.alpha) + 0.5 * ridge * beta.squaredNorm();
}

GlmSolution finish(const GlmProblem& pr, GlmSolution s) {
  s.s0 = static_cast<int>((s.beta.array() != 0.0).count());
  if (pr.family == Family::gaussian) {
    const Eigen::VectorXd v = normalized_weights(pr);
    const Eigen::VectorXd r = pr.y - linear_predictor(s, pr.x).col(0);
    s.residual_sd = std::sqrt(v.dot(r.cwiseAbs2()));
  }
  s.loglik = log_likelihood(s, pr);
  return s;
}

void fit_gaussian(const GlmProblem& pr, const Eigen::VectorXd& v, double lambda, GlmSolution& s,
                  const GlmControl& ctl) {
  double b0 = s.intercept[0];
  Eigen::VectorXd r = pr.y - pr.x * s.beta.col(0);
  r.array() -= b0;
  const auto res = cd_wls(pr.x, v, lambda * pr.alpha, lambda * (1.0 - pr.alpha), b0, s.beta.col(0), r,
                          ctl.tol, ctl.max_sweeps);
  s.intercept[0] = b0;
  s.sweeps = res.sweeps;
  s.converged = res.converged;
}

void fit_poisson(const GlmProblem& pr, const Eigen::VectorXd& v, double lambda, GlmSolution& s,
                 const GlmControl& ctl) {
  const double l1 = lambda * pr.alpha;
  const double l2 = lambda * (1.0 - pr.alpha);
  Eigen::VectorXd eta = pr.x * s.beta.col(0);
  eta.array() += s.intercept[0];
  double obj = full_objective(pr, v, eta, s.beta, lambda, 0.0);
  bool clamped = false;
  s.converged = false;
  long sweeps = 0;
  while (sweeps < ctl.max_sweeps) {
    Eigen::VectorXd W(eta.size()), r(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      if (std::abs(eta[i]) > kEtaClamp) clamped = true;
      const double mu = std::max(std::exp(std::clamp(eta[i], -kEtaClamp, kEtaClamp)), 1e-10);
      W[i] = v[i] * mu;
      r[i] = (pr.y[i] - mu) / mu;
    }
    const double old_b0 = s.intercept[0];
    const Eigen::VectorXd old_beta = s.beta.col(0);
    double b0 = old_b0;
    Eigen::VectorXd beta = old_beta;
    const auto res = cd_wls(pr.x, W, l1, l2, b0, beta, r, ctl.tol, ctl.max_sweeps - sweeps);
    sweeps += res.sweeps;

    Eigen::VectorXd new_eta = pr.x * beta;
    new_eta.array() += b0;
    Eigen::MatrixXd bm = beta;
    double new_obj = full_objective(pr, v, new_eta, bm, lambda, 0.0);
    for (int h = 0; h < 30 && new_obj > obj + 1e-13 * std::abs(obj); ++h) {
      b0 = 0.5 * (b0 + old_b0);
      beta = 0.5 * (beta + old_beta);
      new_eta = pr.x * beta;
      new_eta.array() += b0;
      bm = beta;
      new_obj = full_objective(pr, v, new_eta, bm, lambda, 0.0);
    }
    const double delta =
        std::max(std::abs(b0 - old_b0), old_beta.size() ? (beta - old_beta).cwiseAbs().maxCoeff() : 0.0);
    s.intercept[0] = b0;
    s.beta.col(0) = beta;
    eta = new_eta;
    obj = new_obj;
    if (delta < ctl.tol && res.converged) {
      s.converged = true;
      break;
    }
  }
  s.sweeps = sweeps;
  if (clamped) s.warnings.push_back("poisson linear predictor clamped at |eta| = 30");
}

// Per-class partial Newton steps. exp(eta - m) is cached with per-row shifts
// m refreshed every outer iteration, so a class update only exponentiates its
// own column.
void fit_multinomial(const GlmProblem& pr, const Eigen::VectorXd& v, double lambda, GlmSolution& s,
                     const GlmControl& ctl) {
  const int k = pr.classes;
  const double ridge = lambda == 0.0 ? kMultinomialRidge : 0.0;
  const double l1 = lambda * pr.alpha;
  const double l2 = lambda * (1.0 - pr.alpha) + ridge;
  const Eigen::Index n = pr.x.rows();
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<int>(pr.y[i]);

  Eigen::MatrixXd eta = linear_predictor(s, pr.x);
  Eigen::VectorXd m(n), sum(n), yeta(n);
  Eigen::MatrixXd e(n, k);
  auto refresh = [&]() {
    m = eta.rowwise().maxCoeff();
    e = (eta.colwise() - m).array().exp().matrix();
    sum = e.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) yeta[i] = eta(i, y[i]);
  };
  auto smooth = [&](const Eigen::VectorXd& sm, const Eigen::VectorXd& ye) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (v[i] != 0.0) loss += v[i] * (m[i] + std::log(sm[i]) - ye[i]);
    return loss;
  };
  auto pen = [&](const Eigen::MatrixXd& beta) {
    return penalty(beta, lambda, pr.alpha) + 0.5 * ridge * beta.squaredNorm();
  };

  refresh();
  double obj = smooth(sum, yeta) + pen(s.beta);
  s.converged = false;
  long sweeps = 0;
  Eigen::VectorXd W(n), r(n), col(n), ecol(n), trial_sum(n), trial_yeta(n);
  // Inner solves only need to be a little more accurate than the outer
  // iterate is stable.
  double inner_tol = std::max(ctl.tol, 1e-4);
  while (sweeps < ctl.max_sweeps) {
    double delta = 0.0;
    bool inner_ok = true;
    refresh();
    for (int c = 0; c < k && sweeps < ctl.max_sweeps; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double p = e(i, c) / sum[i];
        const double h = std::max(p * (1.0 - p), kProbFloor);
        W[i] = v[i] * h;
        r[i] = ((y[i] == c ? 1.0 : 0.0) - p) / h;
      }
      const double old_b0 = s.intercept[c];
      const Eigen::VectorXd old_beta = s.beta.col(c);
      double b0 = old_b0;
      Eigen::VectorXd beta = old_beta;
      const auto res = cd_wls(pr.x, W, l1, l2, b0, beta, r, inner_tol, ctl.max_sweeps - sweeps);
      sweeps += res.sweeps;
      inner_ok = inner_ok && res.converged && inner_tol <= ctl.tol;

      Eigen::MatrixXd trial_beta = s.beta;
      const Eigen::VectorXd others = sum - e.col(c);
      auto apply = [&]() {
        trial_beta.col(c) = beta;
        col.noalias() = pr.x * beta;
        col.array() += b0;
        ecol = (col - m).array().exp().matrix();
        trial_sum = others + ecol;
        trial_yeta = yeta;
        for (Eigen::Index i = 0; i < n; ++i)
          if (y[i] == c) trial_yeta[i] = col[i];
        if (!trial_sum.allFinite() || trial_sum.minCoeff() <= 0.0) {
          Eigen::MatrixXd trial_eta = eta;
          trial_eta.col(c) = col;
          return full_objective(pr, v, trial_eta, trial_beta, lambda, ridge);
        }
        return smooth(trial_sum, trial_yeta) + pen(trial_beta);
      };
      double new_obj = apply();
      for (int h = 0; h < 30 && new_obj > obj + 1e-13 * std::abs(obj); ++h) {
        b0 = 0.5 * (b0 + old_b0);
        beta = 0.5 * (beta + old_beta);
        new_obj = apply();
      }
      delta = std::max(delta, std::abs(b0 - old_b0));
      if (old_beta.size()) delta = std::max(delta, (beta - old_beta).cwiseAbs().maxCoeff());
      s.intercept[c] = b0;
      s.beta = trial_beta;
      eta.col(c) = col;
      obj = new_obj;
      if (trial_sum.allFinite() && trial_sum.minCoeff() > 0.0) {
        e.col(c) = ecol;
        sum = trial_sum;
        yeta = trial_yeta;
      } else {
        refresh();
      }
    }
    const double shift = s.intercept.mean();
    s.intercept.array() -= shift;
    eta.array() -= shift;
    if (delta < ctl.tol && inner_ok) {
      s.converged = true;
      break;
    }
    inner_tol = std::max(ctl.tol, std::min(inner_tol, 0.1 * delta));
  }
  s.sweeps = sweeps;
}

}  // namespace

void validate_problem(const GlmProblem& pr) {
  const Eigen::Index n = pr.x.rows();
  if (n == 0) throw DataError("empty design");
  if (pr.y.size() != n) throw DataError("response length differs from design rows");
  if (pr.weights.size() != 0 && pr.weights.size() != n) throw DataError("weight length differs from design rows");
  if (!(pr.alpha >= 0.0 && pr.alpha <= 1.0)) throw DataError("alpha must lie in [0, 1]");
  if (!pr.x.allFinite() || !pr.y.allFinite()) throw DataError("non-finite value in regression problem");
  if (pr.weights.size() != 0) {
    if ((pr.weights.array() < 0.0).any() || !pr.weights.allFinite()) {
      throw DataError("observation weights must be nonnegative");
    }
    if ((pr.weights.array() > 0.0).count() < 2) throw DataError("need at least two positive weights");
  } else if (n < 2) {
    throw DataError("need at least two observations");
  }
  if (pr.family == Family::multinomial) {
    if (pr.classes < 2) throw DataError("multinomial family needs at least 2 classes");
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = pr.y[i];
      if (c != std::floor(c) || c < 0 || c >= pr.classes) throw DataError("class code out of range");
    }
  } else if (pr.family == Family::poisson) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pr.y[i] < 0 || pr.y[i] != std::floor(pr.y[i])) throw DataError("poisson response must be a count");
    }
  }
}

double lambda_max(const GlmProblem& pr) {
  validate_problem(pr);
  if (degenerate(pr)) throw DegenerateResponseError();
  const Eigen::VectorXd v = normalized_weights(pr);
  Eigen::MatrixXd mu0;
  const GlmSolution s = null_solution(pr, v, mu0);
  const Eigen::MatrixXd g = nll_gradient(s, pr);
  const double gmax = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  if (!(gmax > 1e-13)) throw ZeroLambdaMaxError();
  return gmax / std::max(pr.alpha, 0.001);
}

std::vector<double> log_spaced(double max, int n, double min_ratio) {
  if (n < 1) throw DataError("path length must be positive");
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw DataError("min_ratio must lie in (0, 1)");
  std::vector<double> out(n);
  out[0] = max;
  if (n == 1) return out;
  const double step = std::log(min_ratio) / (n - 1);
  for (int i = 1; i < n; ++i) out[i] = max * std::exp(step * i);
  out[n - 1] = max * min_ratio;
  return out;
}

std::vector<double> lambda_path(const GlmProblem& pr, int n_lambda, std::optional<double> min_ratio) {
  if (n_lambda < 2) throw DataError("n_lambda must be at least 2");
  const double lmax = lambda_max(pr);
  double n_eff = static_cast<double>(pr.x.rows());
  if (pr.weights.size() != 0) n_eff = pr.weights.sum();
  const double ratio = min_ratio.value_or(n_eff > static_cast<double>(pr.x.cols()) ? 1e-4 : 1e-2);
  return log_spaced(lmax, n_lambda, ratio);
}

GlmSolution intercept_only(const GlmProblem& pr) {
  validate_problem(pr);
  Eigen::MatrixXd mu0;
  return finish(pr, null_solution(pr, normalized_weights(pr), mu0));
}

GlmSolution fit_glm(const GlmProblem& pr, double lambda, const GlmSolution* warm, const GlmControl& ctl) {
  validate_problem(pr);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DataError("lambda must be nonnegative");
  if (degenerate(pr)) throw DegenerateResponseError();
  const Eigen::VectorXd v = normalized_weights(pr);
  Eigen::MatrixXd mu0;
  GlmSolution s = null_solution(pr, v, mu0);
  s.lambda = lambda;

  // At or above λ_max the intercept-only fit is exact.
  const Eigen::MatrixXd g0 = nll_gradient(s, pr);
  const double gmax = g0.size() ? g0.cwiseAbs().maxCoeff() : 0.0;
  if (gmax <= lambda * pr.alpha) return finish(pr, std::move(s));

  if (warm && warm->beta.rows() == s.beta.rows() && warm->beta.cols() == s.beta.cols()) {
    s.intercept = warm->intercept;
    s.beta = warm->beta;
  }
  switch (pr.family) {
    case Family::gaussian: fit_gaussian(pr, v, lambda, s, ctl); break;
    case Family::poisson: fit_poisson(pr, v, lambda, s, ctl); break;
    case Family::multinomial: fit_multinomial(pr, v, lambda, s, ctl); break;
  }
  return finish(pr, std::move(s));
}

std::vector<GlmSolution> fit_path(const GlmProblem& pr, const std::vector<double>& lambdas,
                                  const GlmControl& ctl) {
  if (lambdas.empty()) throw DataError("empty lambda sequence");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] < lambdas[i - 1])) throw DataError("lambda sequence must be strictly descending");
  }
  std::vector<GlmSolution> out;
  out.reserve(lambdas.size());
  const Eigen::VectorXd v = normalized_weights(pr);
  double null_loss = 0.0;
  double span = 0.0;
  if (ctl.early_stop) {
    const GlmSolution null = intercept_only(pr);
    null_loss = smooth_loss(pr, v, linear_predictor(null, pr.x));
    span = null_loss - saturated_loss(pr, v);
  }
  double prev_ratio = 0.0;
  for (double l : lambdas) {
    out.push_back(fit_glm(pr, l, out.empty() ? nullptr : &out.back(), ctl));
    if (!ctl.early_stop || !(span > 0.0)) continue;
    const double ratio = (null_loss - smooth_loss(pr, v, linear_predictor(out.back(), pr.x))) / span;
    if (out.size() >= kMinPathFits && (ratio - prev_ratio < kDevianceChange * ratio || ratio > kMaxDevianceRatio)) {
      break;
    }
    prev_ratio = ratio;
  }
  return out;
}

Eigen::MatrixXd linear_predictor(const GlmSolution& s, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd eta = x * s.beta;
  eta.rowwise() += s.intercept.transpose();
  return eta;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& eta) {
  Eigen::MatrixXd p(eta.rows(), eta.cols());
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    const double m = eta.row(i).maxCoeff();
    p.row(i) = (eta.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

double log_likelihood(const GlmSolution& s, const GlmProblem& pr) {
  const Eigen::Index n = pr.y.size();
  const Eigen::MatrixXd eta = linear_predictor(s, pr.x);
  auto w = [&](Eigen::Index i) { return pr.weights.size() ? pr.weights[i] : 1.0; };
  double ll = 0.0;
  switch (pr.family) {
    case Family::gaussian: {
      const double sd = std::max(s.residual_sd, kSdFloor);
      const double c = -0.5 * std::log(2.0 * M_PI * sd * sd);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = (pr.y[i] - eta(i, 0)) / sd;
        ll += w(i) * (c - 0.5 * r * r);
      }
      break;
    }
    case Family::poisson:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) == 0.0) continue;
        const double e = std::clamp(eta(i, 0), -kEtaClamp, kEtaClamp);
        ll += w(i) * (pr.y[i] * e - std::exp(e) - std::lgamma(pr.y[i] + 1.0));
      }
      break;
    case Family::multinomial:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) == 0.0) continue;
        const double m = eta.row(i).maxCoeff();
        const double lse = m + std::log((eta.row(i).array() - m).exp().sum());
        ll += w(i) * (eta(i, static_cast<Eigen::Index>(pr.y[i])) - lse);
      }
      break;
  }
  return ll;
}

Eigen::MatrixXd nll_gradient(const GlmSolution& s, const GlmProblem& pr) {
  const Eigen::VectorXd v = normalized_weights(pr);
  const Eigen::MatrixXd mu = mean_response(pr, linear_predictor(s, pr.x));
  Eigen::MatrixXd resid(mu.rows(), mu.cols());
  if (pr.family == Family::multinomial) {
    resid = indicator_response(pr) - mu;
  } else {
    resid.col(0) = pr.y - mu.col(0);
  }
  resid.array().colwise() *= v.array();
  return -(pr.x.transpose() * resid);
}

double objective(const GlmSolution& s, const GlmProblem& pr) {
  const Eigen::VectorXd v = normalized_weights(pr);
  const double ridge = pr.family == Family::multinomial && s.lambda == 0.0 ? kMultinomialRidge : 0.0;
  return full_objective(pr, v, linear_predictor(s, pr.x), s.beta, s.lambda, ridge);
}

double kkt_residual(const GlmSolution& s, const GlmProblem& pr) {
  const Eigen::MatrixXd g = nll_gradient(s, pr);
  const double lambda = s.lambda;
  const double ridge = pr.family == Family::multinomial && lambda == 0.0 ? kMultinomialRidge : 0.0;
  const double l1 = lambda * pr.alpha;
  const double l2 = lambda * (1.0 - pr.alpha) + ridge;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      const double b = s.beta(j, c);
      const double viol = b != 0.0 ? std::abs(g(j, c) + l2 * b + l1 * (b > 0 ? 1.0 : -1.0))
                                   : std::max(0.0, std::abs(g(j, c)) - l1);
      worst = std::max(worst, viol);
    }
  }
  // Intercepts are unpenalized, so their gradient must vanish.
  const Eigen::VectorXd v = normalized_weights(pr);
  const Eigen::MatrixXd mu = mean_response(pr, linear_predictor(s, pr.x));
  if (pr.family == Family::multinomial) {
    const Eigen::MatrixXd y = indicator_response(pr);
    for (Eigen::Index c = 0; c < mu.cols(); ++c) worst = std::max(worst, std::abs(v.dot(y.col(c) - mu.col(c))));
  } else {
    worst = std::max(worst, std::abs(v.dot(pr.y - mu.col(0))));
  }
  return worst;
}

}  // namespace mgm
