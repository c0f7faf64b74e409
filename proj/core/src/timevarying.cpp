#include "mgm/timevarying.hpp"

#include <algorithm>
#include <cmath>

#include "mgm/design.hpp"
#include "mgm/error.hpp"
#include "mgm/mgm.hpp"
#include "mgm/mvar.hpp"
#include "mgm/node_fit.hpp"
#include "mgm/parallel.hpp"

namespace mgm {

namespace {

void check_bandwidth(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ModelError("bandwidth must be positive");
}

void check_estpoints(const std::vector<double>& estpoints) {
  if (estpoints.empty()) throw ModelError("need at least one estimation point");
  for (double t : estpoints) {
    if (!(t >= 0.0 && t <= 1.0)) throw ModelError("estimation points must lie in [0, 1]");
  }
}

// Positions of the design rows.
Eigen::VectorXd row_positions(const std::vector<double>& positions, const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = positions[rows[i]];
  return out;
}

Eigen::VectorXd kernel(const Eigen::VectorXd& pos, double t_e, double sigma) {
  return (-(pos.array() - t_e).square() / (2.0 * sigma * sigma)).exp().matrix();
}

// Fits every node at one estimation point given row weights over the
// shared design rows.
template <class Design>
std::vector<NodeFitResult> fit_point(const std::vector<VariableSpec>& specs, const std::vector<Design>& designs,
                                     const VariableScaling& scaling, const Eigen::VectorXd& weights,
                                     double local_n, const SelectionSpec& selection, bool zero_fit) {
  const int p = static_cast<int>(specs.size());
  std::vector<NodeFitResult> nodes(p);
  for (int s = 0; s < p; ++s) {
    NodeFitRequest req;
    req.node = s;
    req.spec = specs[s];
    req.design = &designs[s].design;
    req.response = designs[s].response;
    req.weights = weights;
    req.n_eff = local_n;
    req.response_scale = scaling.sd[s];
    req.tolerate_degenerate = true;
    nodes[s] = zero_fit ? intercept_only_node(req) : fit_node(req, selection);
  }
  return nodes;
}

std::string zero_fit_warning(std::size_t e, double local_n) {
  return "estimation point " + std::to_string(e) + ": local sample size " + std::to_string(local_n) +
         " below 2; estimates set to zero";
}

}  // namespace

std::vector<double> time_positions(const Dataset& data) {
  const int n = data.n();
  std::vector<double> out(n, 0.0);
  if (data.timepoints) {
    const auto& t = *data.timepoints;
    const double lo = t.front();
    const double span = t.back() - lo;
    for (int i = 0; i < n; ++i) out[i] = span > 0.0 ? (t[i] - lo) / span : 0.0;
  } else {
    for (int i = 0; i < n; ++i) out[i] = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
  }
  return out;
}

KernelWeights kernel_weights(const std::vector<double>& positions, double t_e, double sigma) {
  check_bandwidth(sigma);
  KernelWeights out;
  out.t_e = t_e;
  out.sigma = sigma;
  const Eigen::VectorXd pos = Eigen::Map<const Eigen::VectorXd>(positions.data(),
                                                                 static_cast<Eigen::Index>(positions.size()));
  out.weights = kernel(pos, t_e, sigma);
  out.local_n = out.weights.sum();
  return out;
}

std::vector<double> equally_spaced_estpoints(int count) {
  if (count < 1) throw ModelError("need at least one estimation point");
  std::vector<double> out(count, 0.0);
  for (int i = 0; i < count; ++i) out[i] = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
  return out;
}

std::vector<double> normalize_estpoints(const std::vector<double>& points, const Dataset& data) {
  const bool raw = std::any_of(points.begin(), points.end(), [](double v) { return v > 1.0; });
  if (!raw) return points;
  double lo = 0.0;
  double hi = data.n() - 1;
  if (data.timepoints) {
    lo = data.timepoints->front();
    hi = data.timepoints->back();
  }
  std::vector<double> out;
  for (double v : points) {
    if (v < lo || v > hi) throw ModelError("estimation point outside the time range");
    out.push_back(hi > lo ? (v - lo) / (hi - lo) : 0.0);
  }
  return out;
}

TvMgmFit fit_tvmgm(const Dataset& data, const MgmOptions& options, const std::vector<double>& estpoints,
                   double bandwidth) {
  validate_dataset(data);
  validate_options(options, data.p());
  check_bandwidth(bandwidth);
  check_estpoints(estpoints);
  const int p = data.p();
  const VariableScaling scaling = compute_variable_scaling(data);
  std::vector<NodeDesign> designs(p);
  parallel_for(p, options.threads, [&](int s) {
    try {
      designs[s] = build_mgm_design(data, scaling, s, options.k, DesignOptions{options.overparameterize, true});
    } catch (const Error& e) {
      throw NodeError(s, e.what());
    }
  });
  const Eigen::VectorXd pos = row_positions(time_positions(data), designs[0].rows);
  const int ne = static_cast<int>(estpoints.size());

  TvMgmFit out;
  out.estpoints = estpoints;
  out.bandwidth = bandwidth;
  out.fits.resize(ne);
  out.local_n.resize(ne);
  parallel_for(ne, options.threads, [&](int e) {
    const Eigen::VectorXd w = kernel(pos, estpoints[e], bandwidth);
    const double local_n = w.sum();
    const bool zero = local_n < 2.0;
    auto nodes = fit_point(data.specs, designs, scaling, w, local_n, options.selection, zero);
    out.fits[e] = assemble_mgm_fit(data.specs, column_names(data), options, scaling, designs, std::move(nodes));
    out.local_n[e] = local_n;
  });
  for (int e = 0; e < ne; ++e) {
    if (out.local_n[e] < 2.0) out.warnings.push_back(zero_fit_warning(e, out.local_n[e]));
  }
  return out;
}

TvMvarFit fit_tvmvar(const Dataset& data, const std::vector<int>& lags, const MvarOptions& options,
                     const std::vector<double>& estpoints, double bandwidth) {
  validate_dataset(data);
  validate_options(options, lags);
  check_bandwidth(bandwidth);
  check_estpoints(estpoints);
  const int p = data.p();
  const VariableScaling scaling = compute_variable_scaling(data);
  std::vector<VarDesign> designs(p);
  designs[0] = build_var_design(data, scaling, 0, lags, DesignOptions{options.overparameterize, true});
  parallel_for(p, options.threads, [&](int s) {
    if (s == 0) return;
    try {
      designs[s] = build_var_design(data, scaling, s, lags, DesignOptions{options.overparameterize, true});
    } catch (const Error& e) {
      throw NodeError(s, e.what());
    }
  });
  const Eigen::VectorXd pos = row_positions(time_positions(data), designs[0].rows);
  const int ne = static_cast<int>(estpoints.size());

  TvMvarFit out;
  out.estpoints = estpoints;
  out.bandwidth = bandwidth;
  out.fits.resize(ne);
  out.local_n.resize(ne);
  parallel_for(ne, options.threads, [&](int e) {
    const Eigen::VectorXd w = kernel(pos, estpoints[e], bandwidth);
    const double local_n = w.sum();
    const bool zero = local_n < 2.0;
    auto nodes = fit_point(data.specs, designs, scaling, w, local_n, options.selection, zero);
    out.fits[e] = assemble_mvar_fit(data.specs, column_names(data), lags, options, scaling, designs,
                                    std::move(nodes));
    out.local_n[e] = local_n;
  });
  for (int e = 0; e < ne; ++e) {
    if (out.local_n[e] < 2.0) out.warnings.push_back(zero_fit_warning(e, out.local_n[e]));
  }
  return out;
}

std::vector<std::vector<int>> bw_test_sets(int usable, int folds, int foldsize) {
  if (folds < 1) throw ModelError("bw_folds must be at least 1");
  if (foldsize < 1) throw ModelError("bw_foldsize must be at least 1");
  if (foldsize >= usable) throw ModelError("bw_foldsize must be smaller than the number of usable rows");
  if (folds > foldsize + 1) {
    throw ModelError("too many folds for the fold size");
  }
  std::vector<std::vector<int>> out(folds);
  for (int j = 1; j <= folds; ++j) {
    const double a = j;
    const double b = usable - foldsize + j - 1;
    for (int i = 0; i < foldsize; ++i) {
      const double v = foldsize > 1 ? a + (b - a) * i / (foldsize - 1) : a;
      out[j - 1].push_back(static_cast<int>(std::lround(v)) - 1);
    }
  }
  return out;
}

BwSelectResult bw_select(const Dataset& data, const BwSelectOptions& o) {
  validate_dataset(data);
  if (o.bw_seq.empty()) throw ModelError("bandwidth sequence is empty");
  for (double s : o.bw_seq) check_bandwidth(s);
  const int p = data.p();
  const VariableScaling scaling = compute_variable_scaling(data);
  const bool mvar = o.type == ModelType::mvar;
  const SelectionSpec& selection = mvar ? o.mvar.selection : o.mgm.selection;
  const int threads = mvar ? o.mvar.threads : o.mgm.threads;

  std::vector<NodeDesign> designs(p);
  if (mvar) {
    validate_options(o.mvar, o.lags);
    for (int s = 0; s < p; ++s) {
      designs[s] = build_var_design(data, scaling, s, o.lags, DesignOptions{o.mvar.overparameterize, true});
    }
  } else {
    validate_options(o.mgm, p);
    for (int s = 0; s < p; ++s) {
      designs[s] = build_mgm_design(data, scaling, s, o.mgm.k, DesignOptions{o.mgm.overparameterize, true});
    }
  }
  const std::vector<int>& rows = designs[0].rows;
  const int usable = static_cast<int>(rows.size());
  const Eigen::VectorXd pos = row_positions(time_positions(data), rows);
  const auto tests = bw_test_sets(usable, o.folds, o.foldsize);

  BwSelectResult out;
  out.bandwidths = o.bw_seq;
  for (const auto& t : tests) {
    std::vector<int> r;
    for (int i : t) r.push_back(rows[i]);
    out.test_rows.push_back(r);
  }

  // One task per (fold, test point): per-variable squared error or 0/1 loss.
  std::vector<std::pair<int, int>> tasks;
  for (int f = 0; f < o.folds; ++f)
    for (int i = 0; i < o.foldsize; ++i) tasks.push_back({f, tests[f][i]});

  for (double sigma : o.bw_seq) {
    std::vector<Eigen::VectorXd> loss(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), threads, [&](int k) {
      const auto [f, row] = tasks[k];
      Eigen::VectorXd w = kernel(pos, pos[row], sigma);
      for (int i : tests[f]) w[i] = 0.0;
      const double local_n = w.sum();
      const auto nodes = fit_point(data.specs, designs, scaling, w, local_n, selection, local_n < 2.0);
      loss[k].resize(p);
      for (int s = 0; s < p; ++s) {
        const Eigen::VectorXd eta = node_linear_predictor(nodes[s].model, designs[s].design, row);
        const double y = designs[s].response[row];
        switch (nodes[s].model.family) {
          case Family::gaussian: loss[k][s] = (y - eta[0]) * (y - eta[0]); break;
          case Family::poisson: {
            const double mu = std::exp(std::min(eta[0], 30.0));
            loss[k][s] = (y - mu) * (y - mu);
            break;
          }
          case Family::multinomial: {
            Eigen::Index best = 0;
            eta.maxCoeff(&best);
            loss[k][s] = best == static_cast<Eigen::Index>(y) ? 0.0 : 1.0;
            break;
          }
        }
      }
    });
    double total = 0.0;
    for (int f = 0; f < o.folds; ++f) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
      for (std::size_t k = 0; k < tasks.size(); ++k)
        if (tasks[k].first == f) acc += loss[k];
      acc /= o.foldsize;
      for (int s = 0; s < p; ++s) {
        if (!data.specs[s].categorical()) acc[s] = std::sqrt(acc[s]);
      }
      total += acc.mean();
    }
    out.errors.push_back(total / o.folds);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.errors.size(); ++i) {
    const double e = out.errors[i];
    const double b = out.errors[best];
    if (e < b || (e == b && o.bw_seq[i] > o.bw_seq[best])) best = i;
  }
  out.selected = o.bw_seq[best];
  return out;
}

}  // namespace mgm
