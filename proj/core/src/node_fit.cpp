#include "mgm/node_fit.hpp"

#include <cmath>

#include "mgm/error.hpp"
#include "mgm/glm.hpp"
#include "mgm/selection.hpp"

namespace mgm {

namespace {

GlmProblem make_problem(const NodeFitRequest& req, Eigen::MatrixXd x) {
  GlmProblem pr;
  pr.family = family_for(req.spec);
  pr.classes = req.spec.categorical() ? req.spec.levels : 1;
  pr.x = std::move(x);
  pr.y = req.response;
  pr.weights = req.weights;
  return pr;
}

double training_error(const NodeModel& m, const GlmProblem& pr, double scale) {
  const Eigen::MatrixXd eta = linear_predictor(
      GlmSolution{0.0, m.intercept, m.beta, 0.0, 0, true, 1.0, 0, {}}, pr.x);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    const double w = pr.weights.size() ? pr.weights[i] : 1.0;
    if (w == 0.0) continue;
    double e = 0.0;
    switch (m.family) {
      case Family::gaussian: e = std::pow((pr.y[i] - eta(i, 0)) * scale, 2); break;
      case Family::poisson: e = std::pow(pr.y[i] - std::exp(std::min(eta(i, 0), 30.0)), 2); break;
      case Family::multinomial: {
        Eigen::Index best = 0;
        eta.row(i).maxCoeff(&best);
        e = best == static_cast<Eigen::Index>(pr.y[i]) ? 1.0 : 0.0;
        break;
      }
    }
    num += w * e;
    den += w;
  }
  if (den == 0.0) return 0.0;
  return m.family == Family::multinomial ? num / den : std::sqrt(num / den);
}

NodeFitResult assemble(const NodeFitRequest& req, const GlmProblem& pr, const ScaleRecord& record,
                       const GlmSolution& sol, const Eigen::MatrixXd& beta) {
  NodeFitResult out;
  out.model.node = req.node;
  out.model.family = pr.family;
  out.model.classes = pr.classes;
  out.model.scaling = record;
  out.model.intercept = sol.intercept;
  out.model.beta = beta;
  out.model.residual_sd = sol.residual_sd;
  out.raw_beta = Eigen::MatrixXd::Zero(req.design->q(), sol.intercept.size());
  for (std::size_t c = 0; c < record.kept.size(); ++c) out.raw_beta.row(record.kept[c]) = beta.row(c);
  out.meta.lambda = sol.lambda;
  out.meta.s0 = static_cast<int>((beta.array() != 0.0).count());
  out.meta.deviance = -2.0 * sol.loglik;
  out.meta.n_eff = req.n_eff;
  out.meta.converged = sol.converged;
  out.meta.train_error = training_error(out.model, pr, req.response_scale);
  out.warnings = record.warnings;
  for (const auto& w : sol.warnings) out.warnings.push_back(w);
  return out;
}

}  // namespace

NodeFitResult intercept_only_node(const NodeFitRequest& req) {
  NodeFitRequest r = req;
  if (r.weights.size() != 0 && (r.weights.array() > 0.0).count() < 2) r.weights.resize(0);
  const StandardizedDesign sd = standardize(*req.design);
  GlmProblem pr = make_problem(r, sd.design.x);
  GlmProblem empty = pr;
  empty.x.resize(pr.x.rows(), 0);
  GlmSolution sol = intercept_only(empty);
  sol.beta = Eigen::MatrixXd::Zero(pr.x.cols(), sol.intercept.size());
  return assemble(r, pr, sd.record, sol, sol.beta);
}

NodeFitResult fit_node(const NodeFitRequest& req, const SelectionSpec& selection) {
  try {
    const StandardizedDesign sd = standardize(*req.design);
    GlmProblem pr = make_problem(req, sd.design.x);
    if (pr.x.cols() == 0) {
      NodeFitResult out = intercept_only_node(req);
      out.warnings.push_back("no usable predictors; intercept-only fit");
      return out;
    }
    AlphaChoice choice;
    try {
      choice = select_alpha(pr, selection, req.n_eff);
    } catch (const ZeroLambdaMaxError&) {
      return intercept_only_node(req);
    } catch (const DegenerateResponseError&) {
      if (!req.tolerate_degenerate) throw;
      NodeFitResult out = intercept_only_node(req);
      out.warnings.push_back("degenerate response; intercept-only fit");
      return out;
    }
    const GlmSolution& sol = choice.lambda.path[choice.lambda.index];
    const ThresholdResult th =
        tau_threshold(sol.beta, req.n_eff, static_cast<int>(pr.x.cols()), selection.threshold);
    pr.alpha = choice.alpha;
    NodeFitResult out = assemble(req, pr, sd.record, sol, th.beta);
    out.meta.alpha = choice.alpha;
    out.meta.tau = th.tau;
    if (!sol.converged) out.warnings.push_back("solver did not converge");
    return out;
  } catch (const NodeError&) {
    throw;
  } catch (const Error& e) {
    throw NodeError(req.node, e.what());
  }
}

Eigen::MatrixXd node_linear_predictor(const NodeModel& m, const DesignMatrix& raw) {
  const Eigen::MatrixXd x = apply_scaling(raw, m.scaling);
  Eigen::MatrixXd eta = x * m.beta;
  eta.rowwise() += m.intercept.transpose();
  return eta;
}

Eigen::VectorXd node_linear_predictor(const NodeModel& m, const DesignMatrix& raw, int row) {
  Eigen::VectorXd eta = m.intercept;
  for (std::size_t c = 0; c < m.scaling.kept.size(); ++c) {
    const double x = (raw.x(row, m.scaling.kept[c]) - m.scaling.center[c]) / m.scaling.scale[c];
    eta += x * m.beta.row(static_cast<Eigen::Index>(c)).transpose();
  }
  return eta;
}

}  // namespace mgm
