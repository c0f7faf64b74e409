#include "mgm/mvar.hpp"

#include <algorithm>
#include <cmath>

#include "mgm/error.hpp"
#include "mgm/parallel.hpp"

namespace mgm {

namespace {

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

Sign to_sign(int s) { return s > 0 ? Sign::positive : (s < 0 ? Sign::negative : Sign::undefined); }

}  // namespace

void validate_options(const MvarOptions& o, const std::vector<int>& lags) {
  if (lags.empty()) throw ModelError("lag set is empty");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] < 1) throw ModelError("lags must be positive");
    if (i > 0 && lags[i] <= lags[i - 1]) throw ModelError("lags must be strictly increasing");
  }
  const auto& s = o.selection;
  if (s.alpha_seq.empty()) throw ModelError("alpha sequence is empty");
  for (double a : s.alpha_seq) {
    if (!(a >= 0.0 && a <= 1.0)) throw ModelError("alpha values must lie in [0, 1]");
  }
  if (s.n_lambda < 2) throw ModelError("n_lambda must be at least 2");
  if (s.method == LambdaSelection::cv && s.folds < 2) throw ModelError("need at least 2 CV folds");
  if (!(s.gamma >= 0.0)) throw ModelError("EBIC gamma must be nonnegative");
  if (o.threads < 0) throw ModelError("thread count must be nonnegative");
}

MvarFit assemble_mvar_fit(const std::vector<VariableSpec>& specs, const std::vector<std::string>& names,
                          const std::vector<int>& lags, const MvarOptions& options,
                          const VariableScaling& scaling, const std::vector<VarDesign>& designs,
                          std::vector<NodeFitResult> nodes) {
  const int p = static_cast<int>(specs.size());
  const int nl = static_cast<int>(lags.size());
  MvarFit fit;
  fit.specs = specs;
  fit.names = names;
  fit.lags = lags;
  fit.options = options;
  fit.scaling = scaling;
  fit.inclusion_mask = designs.front().inclusion_mask;
  fit.wadj.assign(nl, Eigen::MatrixXd::Zero(p, p));
  fit.signs.assign(nl, SignMatrix(p, p));

  for (int i = 0; i < p; ++i) {
    const DesignMatrix& d = designs[i].design;
    const Eigen::MatrixXd& beta = nodes[i].raw_beta;
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
      const int j = d.groups[g].vars.front();
      const int l = static_cast<int>(std::find(lags.begin(), lags.end(), d.groups[g].lag) - lags.begin());
      double sum_abs = 0.0;
      int count = 0;
      int sign = 0;
      for (int c = 0; c < d.q(); ++c) {
        if (d.group[c] != static_cast<int>(g)) continue;
        const int pcat = std::max(d.columns[c].cats.front(), 0);
        for (Eigen::Index k = 0; k < beta.cols(); ++k) {
          sum_abs += std::abs(beta(c, k));
          ++count;
          const bool tcell = specs[i].categorical() ? k == 1 : k == 0;
          const bool pcell = specs[j].categorical() ? pcat == 1 : true;
          if (tcell && pcell) sign = sign_of(beta(c, k));
        }
      }
      const double w = count > 0 ? sum_abs / count : 0.0;
      fit.wadj[l](i, j) = w;
      if (!(w > 0.0)) continue;
      const bool ci = !specs[i].categorical();
      const bool cj = !specs[j].categorical();
      const bool defined =
          (ci && cj) || (options.binary_sign && (ci || specs[i].binary()) && (cj || specs[j].binary()));
      if (defined) fit.signs[l](i, j) = to_sign(sign);
    }
  }
  for (int s = 0; s < p; ++s) {
    fit.intercepts.push_back(nodes[s].model.intercept);
    fit.nodemeta.push_back(nodes[s].meta);
    for (const auto& w : nodes[s].warnings) fit.warnings.push_back("node " + std::to_string(s) + ": " + w);
    fit.nodemodels.push_back(std::move(nodes[s].model));
  }
  return fit;
}

MvarFit fit_mvar(const Dataset& data, const std::vector<int>& lags, const MvarOptions& options) {
  validate_dataset(data);
  validate_options(options, lags);
  const int p = data.p();
  const VariableScaling scaling = compute_variable_scaling(data);
  std::vector<VarDesign> designs(p);
  std::vector<NodeFitResult> nodes(p);
  // The design of node 0 surfaces data errors (e.g. no usable rows) before
  // any parallel work starts.
  designs[0] = build_var_design(data, scaling, 0, lags, DesignOptions{options.overparameterize, true});
  parallel_for(p, options.threads, [&](int s) {
    if (s > 0) {
      try {
        designs[s] = build_var_design(data, scaling, s, lags, DesignOptions{options.overparameterize, true});
      } catch (const Error& e) {
        throw NodeError(s, e.what());
      }
    }
    NodeFitRequest req;
    req.node = s;
    req.spec = data.specs[s];
    req.design = &designs[s].design;
    req.response = designs[s].response;
    req.n_eff = static_cast<double>(designs[s].rows.size());
    req.response_scale = scaling.sd[s];
    nodes[s] = fit_node(req, options.selection);
  });
  return assemble_mvar_fit(data.specs, column_names(data), lags, options, scaling, designs, std::move(nodes));
}

std::vector<std::vector<DirectedEdge>> var_edge_tables(const MvarFit& fit) {
  std::vector<std::vector<DirectedEdge>> out(fit.wadj.size());
  for (std::size_t l = 0; l < fit.wadj.size(); ++l) {
    const Eigen::MatrixXd& w = fit.wadj[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (w(i, j) > 0.0) {
          out[l].push_back({static_cast<int>(j), static_cast<int>(i), w(i, j), fit.signs[l](i, j)});
        }
      }
    }
  }
  return out;
}

}  // namespace mgm
