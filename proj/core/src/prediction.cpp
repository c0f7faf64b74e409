#include "mgm/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mgm/design.hpp"
#include "mgm/error.hpp"
#include "mgm/glm.hpp"
#include "mgm/node_fit.hpp"
#include "mgm/timevarying.hpp"

namespace mgm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double weight_at(const Eigen::VectorXd& w, Eigen::Index i) { return w.size() ? w[i] : 1.0; }

void check_lengths(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  if (truth.size() != pred.size() || (w.size() && w.size() != truth.size())) {
    throw DataError("metric inputs have different lengths");
  }
}

struct RawPrediction {
  Eigen::MatrixXd predicted;
  std::vector<Eigen::MatrixXd> probabilities;
  std::vector<bool> rows;
};

void check_schema(const std::vector<VariableSpec>& fit_specs, const Dataset& data) {
  validate_dataset(data);
  if (data.specs != fit_specs) throw DataError("data schema does not match the fitted model");
}

void fill_node(RawPrediction& out, const NodeModel& m, const VariableSpec& spec, const VariableScaling& scaling,
               int s, const DesignMatrix& design, const std::vector<int>& rows) {
  const Eigen::MatrixXd eta = node_linear_predictor(m, design);
  if (spec.categorical()) out.probabilities[s] = Eigen::MatrixXd::Constant(out.predicted.rows(), spec.levels, kNaN);
  const Eigen::MatrixXd prob = spec.categorical() ? softmax_rows(eta) : Eigen::MatrixXd();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    const auto ii = static_cast<Eigen::Index>(i);
    switch (spec.kind) {
      case VarKind::gaussian: out.predicted(r, s) = eta(ii, 0) * scaling.sd[s] + scaling.mean[s]; break;
      case VarKind::poisson: out.predicted(r, s) = std::exp(std::clamp(eta(ii, 0), -30.0, 30.0)); break;
      case VarKind::categorical: {
        Eigen::Index best = 0;
        prob.row(ii).maxCoeff(&best);
        out.predicted(r, s) = static_cast<double>(best);
        out.probabilities[s].row(r) = prob.row(ii);
        break;
      }
    }
  }
}

RawPrediction raw_predict(const MgmFit& fit, const Dataset& data) {
  check_schema(fit.specs, data);
  const int n = data.n();
  const int p = data.p();
  RawPrediction out{Eigen::MatrixXd::Constant(n, p, kNaN), std::vector<Eigen::MatrixXd>(p), std::vector<bool>(n, true)};
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  for (int s = 0; s < p; ++s) {
    const NodeDesign d =
        build_mgm_design(data, fit.scaling, s, fit.options.k, DesignOptions{fit.options.overparameterize, false});
    fill_node(out, fit.nodemodels[s], data.specs[s], fit.scaling, s, d.design, rows);
  }
  return out;
}

RawPrediction raw_predict(const MvarFit& fit, const Dataset& data) {
  check_schema(fit.specs, data);
  const int n = data.n();
  const int p = data.p();
  RawPrediction out{Eigen::MatrixXd::Constant(n, p, kNaN), std::vector<Eigen::MatrixXd>(p), std::vector<bool>(n, false)};
  for (int s = 0; s < p; ++s) {
    const VarDesign d =
        build_var_design(data, fit.scaling, s, fit.lags, DesignOptions{fit.options.overparameterize, false});
    if (s == 0) out.rows = d.inclusion_mask;
    fill_node(out, fit.nodemodels[s], data.specs[s], fit.scaling, s, d.design, d.rows);
  }
  return out;
}

Eigen::MatrixXd error_table(const Dataset& data, const RawPrediction& pred, const std::vector<NamedMetric>& metrics,
                            const Eigen::VectorXd& row_weights) {
  const int p = data.p();
  Eigen::MatrixXd table = Eigen::MatrixXd::Constant(p, static_cast<Eigen::Index>(metrics.size()), kNaN);
  std::vector<int> rows;
  for (int i = 0; i < data.n(); ++i)
    if (pred.rows[i]) rows.push_back(i);
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0) return table;
  for (int s = 0; s < p; ++s) {
    Eigen::VectorXd truth(m), guess(m), w(row_weights.size() ? m : 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      truth[i] = data.values(rows[i], s);
      guess[i] = pred.predicted(rows[i], s);
      if (row_weights.size()) w[i] = row_weights[rows[i]];
    }
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      if (metrics[k].categorical == data.specs[s].categorical()) {
        table(s, static_cast<Eigen::Index>(k)) = metrics[k].fn(truth, guess, w);
      }
    }
  }
  return table;
}

PredictionResult finish(const Dataset& data, RawPrediction pred, const std::vector<NamedMetric>& metrics) {
  PredictionResult out;
  out.errors = error_table(data, pred, metrics, {});
  for (const auto& m : metrics) out.metric_names.push_back(m.name);
  out.predicted = std::move(pred.predicted);
  out.probabilities = std::move(pred.probabilities);
  out.predicted_rows = std::move(pred.rows);
  return out;
}

template <class Fit>
PredictionResult predict_tv_impl(const TvFit<Fit>& fit, const Dataset& data, TvMethod method,
                                 const std::vector<NamedMetric>& metrics) {
  if (fit.fits.empty()) throw ModelError("time-varying fit has no estimation points");
  const int n = data.n();
  const int p = data.p();
  const std::size_t ne = fit.fits.size();
  const std::vector<double> pos = time_positions(data);
  std::vector<RawPrediction> per_point;
  for (const auto& f : fit.fits) per_point.push_back(raw_predict(f, data));

  RawPrediction combined{Eigen::MatrixXd::Constant(n, p, kNaN), std::vector<Eigen::MatrixXd>(p),
                         per_point.front().rows};
  for (int s = 0; s < p; ++s) {
    if (data.specs[s].categorical()) {
      combined.probabilities[s] = Eigen::MatrixXd::Constant(n, data.specs[s].levels, kNaN);
    }
  }
  auto closest = [&](int r) {
    std::size_t best = 0;
    for (std::size_t e = 1; e < ne; ++e) {
      if (std::abs(fit.estpoints[e] - pos[r]) < std::abs(fit.estpoints[best] - pos[r])) best = e;
    }
    return best;
  };
  for (int r = 0; r < n; ++r) {
    if (!combined.rows[r]) continue;
    std::vector<double> w(ne, 0.0);
    double wsum = 0.0;
    if (method == TvMethod::weighted) {
      for (std::size_t e = 0; e < ne; ++e) {
        const double d = pos[r] - fit.estpoints[e];
        wsum += (w[e] = std::exp(-d * d / (2.0 * fit.bandwidth * fit.bandwidth)));
      }
    }
    if (!(wsum > 0.0)) {
      std::fill(w.begin(), w.end(), 0.0);
      w[closest(r)] = 1.0;
      wsum = 1.0;
    }
    for (int s = 0; s < p; ++s) {
      if (data.specs[s].categorical()) {
        Eigen::RowVectorXd prob = Eigen::RowVectorXd::Zero(data.specs[s].levels);
        for (std::size_t e = 0; e < ne; ++e)
          if (w[e] > 0.0) prob += w[e] * per_point[e].probabilities[s].row(r);
        prob /= wsum;
        Eigen::Index best = 0;
        prob.maxCoeff(&best);
        combined.probabilities[s].row(r) = prob;
        combined.predicted(r, s) = static_cast<double>(best);
      } else {
        double v = 0.0;
        for (std::size_t e = 0; e < ne; ++e)
          if (w[e] > 0.0) v += w[e] * per_point[e].predicted(r, s);
        combined.predicted(r, s) = v / wsum;
      }
    }
  }

  PredictionResult out = finish(data, std::move(combined), metrics);
  std::vector<Eigen::MatrixXd> tv(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Eigen::VectorXd w = kernel_weights(pos, fit.estpoints[e], fit.bandwidth).weights;
    tv[e] = error_table(data, per_point[e], metrics, w);
  }
  out.tv_errors = std::move(tv);
  return out;
}

}  // namespace

double metric_rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  check_lengths(truth, pred, w);
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - pred[i];
    num += weight_at(w, i) * d * d;
    den += weight_at(w, i);
  }
  return den > 0.0 ? std::sqrt(num / den) : kNaN;
}

double metric_r2_raw(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  check_lengths(truth, pred, w);
  double den = 0.0, mean = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    mean += weight_at(w, i) * truth[i];
    den += weight_at(w, i);
  }
  if (!(den > 0.0)) return kNaN;
  mean /= den;
  double rss = 0.0, tss = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    rss += weight_at(w, i) * (truth[i] - pred[i]) * (truth[i] - pred[i]);
    tss += weight_at(w, i) * (truth[i] - mean) * (truth[i] - mean);
  }
  return tss > 0.0 ? 1.0 - rss / tss : kNaN;
}

double metric_r2(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  const double r2 = metric_r2_raw(truth, pred, w);
  return std::isnan(r2) ? r2 : std::max(r2, 0.0);
}

double metric_cc(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  check_lengths(truth, pred, w);
  double hit = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    hit += weight_at(w, i) * (truth[i] == pred[i] ? 1.0 : 0.0);
    den += weight_at(w, i);
  }
  return den > 0.0 ? hit / den : kNaN;
}

double metric_ncc_raw(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  const double cc = metric_cc(truth, pred, w);
  std::map<double, double> freq;
  double den = 0.0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    freq[truth[i]] += weight_at(w, i);
    den += weight_at(w, i);
  }
  double top = 0.0;
  for (const auto& [k, v] : freq) top = std::max(top, v / den);
  if (!(den > 0.0) || top >= 1.0) return kNaN;
  return (cc - top) / (1.0 - top);
}

double metric_ncc(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& w) {
  const double v = metric_ncc_raw(truth, pred, w);
  return std::isnan(v) ? v : std::max(v, 0.0);
}

NamedMetric builtin_metric(const std::string& name) {
  if (name == "RMSE") return {name, false, metric_rmse};
  if (name == "R2") return {name, false, metric_r2};
  if (name == "CC") return {name, true, metric_cc};
  if (name == "nCC") return {name, true, metric_ncc};
  throw DataError("unknown metric '" + name + "'");
}

std::vector<NamedMetric> default_metrics() {
  return {builtin_metric("RMSE"), builtin_metric("R2"), builtin_metric("CC"), builtin_metric("nCC")};
}

PredictionResult predict(const MgmFit& fit, const Dataset& data, const std::vector<NamedMetric>& metrics) {
  return finish(data, raw_predict(fit, data), metrics);
}

PredictionResult predict(const MvarFit& fit, const Dataset& data, const std::vector<NamedMetric>& metrics) {
  return finish(data, raw_predict(fit, data), metrics);
}

PredictionResult predict(const TvMgmFit& fit, const Dataset& data, TvMethod method,
                         const std::vector<NamedMetric>& metrics) {
  return predict_tv_impl(fit, data, method, metrics);
}

PredictionResult predict(const TvMvarFit& fit, const Dataset& data, TvMethod method,
                         const std::vector<NamedMetric>& metrics) {
  return predict_tv_impl(fit, data, method, metrics);
}

}  // namespace mgm
