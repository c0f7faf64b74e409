#include "mgm/mgm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mgm/error.hpp"
#include "mgm/parallel.hpp"

namespace mgm {

namespace {

void subsets(int p, int size, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < p; ++i) {
    cur.push_back(i);
    subsets(p, size, i + 1, cur, out);
    cur.pop_back();
  }
}

FactorEstimate block_estimate(const std::vector<VariableSpec>& specs, const std::vector<int>& members, int s,
                              const DesignMatrix& d, const Eigen::MatrixXd& raw_beta, int gid) {
  std::vector<int> shape;
  for (int m : members) shape.push_back(specs[m].levels);
  FactorEstimate est;
  est.regression = s;
  est.params = NdArray(shape);
  double sum_abs = 0.0;
  int count = 0;
  std::vector<int> idx(members.size());
  for (int j = 0; j < d.q(); ++j) {
    if (d.group[j] != gid) continue;
    const ColumnMeta& meta = d.columns[j];
    for (Eigen::Index c = 0; c < raw_beta.cols(); ++c) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        const int m = members[a];
        if (m == s) {
          idx[a] = specs[s].categorical() ? static_cast<int>(c) : 0;
        } else {
          const auto pos = std::find(meta.vars.begin(), meta.vars.end(), m) - meta.vars.begin();
          idx[a] = std::max(meta.cats[pos], 0);
        }
      }
      const double b = raw_beta(j, c);
      est.params.at(idx) = b;
      sum_abs += std::abs(b);
      ++count;
      if (b != 0.0) est.nonzero = true;
    }
  }
  est.block_mean_abs = count > 0 ? sum_abs / count : 0.0;
  return est;
}

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

RawFactor combine_nodewise(const std::vector<int>& members, const std::vector<FactorEstimate>& estimates,
                           CombineRule rule, bool aligned) {
  if (estimates.empty()) throw ModelError("factor has no estimates");
  const auto& shape = estimates.front().params.shape();
  for (const auto& e : estimates) {
    if (e.params.shape() != shape) throw ModelError("misaligned parameter shapes");
  }
  RawFactor out{members, NdArray(shape), 0.0};
  const bool all = std::all_of(estimates.begin(), estimates.end(), [](const auto& e) { return e.nonzero; });
  const bool any = std::any_of(estimates.begin(), estimates.end(), [](const auto& e) { return e.nonzero; });
  if (rule == CombineRule::and_rule ? !all : !any) return out;

  const double d = static_cast<double>(estimates.size());
  for (const auto& e : estimates) {
    for (std::size_t i = 0; i < out.params.size(); ++i) out.params[i] += e.params[i] / d;
  }
  if (aligned) {
    out.weight = out.params.mean_abs();
  } else {
    for (const auto& e : estimates) out.weight += e.block_mean_abs / d;
  }
  return out;
}

EdgeAggregate aggregate_edges(const std::vector<VariableSpec>& specs, const std::vector<RawFactor>& combined,
                              const std::vector<std::vector<FactorEstimate>>& estimates, bool binary_sign) {
  const int p = static_cast<int>(specs.size());
  EdgeAggregate out{Eigen::MatrixXd::Zero(p, p), SignMatrix(p, p)};
  for (std::size_t f = 0; f < combined.size(); ++f) {
    const RawFactor& rf = combined[f];
    if (rf.members.size() != 2 || !(rf.weight > 0.0)) continue;
    const int a = rf.members[0];
    const int b = rf.members[1];
    out.wadj(a, b) = out.wadj(b, a) = rf.weight;

    int sign = 0;
    const bool ca = !specs[a].categorical();
    const bool cb = !specs[b].categorical();
    if (ca && cb) {
      sign = sign_of(rf.params[0]);
    } else if (binary_sign && (ca || specs[a].binary()) && (cb || specs[b].binary())) {
      // Read the sign at the cell where binary members sit at category 1,
      // preferring the regression on a binary node.
      const std::vector<int> cell{ca ? 0 : 1, cb ? 0 : 1};
      std::vector<const FactorEstimate*> order;
      for (const auto& e : estimates[f])
        if (specs[e.regression].categorical()) order.push_back(&e);
      for (const auto& e : estimates[f])
        if (!specs[e.regression].categorical()) order.push_back(&e);
      for (const FactorEstimate* e : order) {
        sign = sign_of(e->params.at(cell));
        if (sign != 0) break;
      }
    }
    const Sign s = sign > 0 ? Sign::positive : (sign < 0 ? Sign::negative : Sign::undefined);
    out.signs(a, b) = out.signs(b, a) = s;
  }
  return out;
}

FactorGraph extract_factor_graph(int p, const std::vector<RawFactor>& rawfactors) {
  FactorGraph g;
  g.variables = p;
  for (const auto& rf : rawfactors) {
    if (!(rf.weight > 0.0)) continue;
    const int id = static_cast<int>(g.factors.size());
    g.factors.push_back({rf.members, rf.weight});
    for (int m : rf.members) g.edges.push_back({id, m, rf.weight});
  }
  return g;
}

void validate_options(const MgmOptions& o, int p) {
  if (o.k < 2) throw ModelError("interaction order k must be at least 2");
  if (p < 2) throw ModelError("an MGM needs at least 2 variables");
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

MgmFit assemble_mgm_fit(const std::vector<VariableSpec>& specs, const std::vector<std::string>& names,
                        const MgmOptions& options, const VariableScaling& scaling,
                        const std::vector<NodeDesign>& designs, std::vector<NodeFitResult> nodes) {
  const int p = static_cast<int>(specs.size());
  MgmFit fit;
  fit.specs = specs;
  fit.names = names;
  fit.options = options;
  fit.scaling = scaling;

  std::vector<std::map<std::vector<int>, int>> group_index(p);
  for (int s = 0; s < p; ++s) {
    const auto& groups = designs[s].design.groups;
    for (std::size_t g = 0; g < groups.size(); ++g) group_index[s][groups[g].vars] = static_cast<int>(g);
  }

  std::vector<RawFactor> combined;
  std::vector<std::vector<FactorEstimate>> estimates;
  const int max_order = std::min(options.k, p);
  for (int d = 2; d <= max_order; ++d) {
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur;
    subsets(p, d, 0, cur, tuples);
    for (const auto& members : tuples) {
      std::vector<FactorEstimate> est;
      bool categorical = false;
      for (int s : members) {
        categorical = categorical || specs[s].categorical();
        std::vector<int> rest;
        for (int m : members)
          if (m != s) rest.push_back(m);
        const auto it = group_index[s].find(rest);
        if (it == group_index[s].end()) throw ModelError("design lacks a group for a factor");
        est.push_back(block_estimate(specs, members, s, designs[s].design, nodes[s].raw_beta, it->second));
      }
      RawFactor rf = combine_nodewise(members, est, options.rule, options.overparameterize || !categorical);
      if (rf.weight > 0.0) {
        combined.push_back(std::move(rf));
        estimates.push_back(std::move(est));
      }
    }
  }
  EdgeAggregate edges = aggregate_edges(specs, combined, estimates, options.binary_sign);
  fit.wadj = std::move(edges.wadj);
  fit.signs = std::move(edges.signs);
  fit.rawfactors = std::move(combined);

  for (int s = 0; s < p; ++s) {
    fit.intercepts.push_back(nodes[s].model.intercept);
    fit.nodemeta.push_back(nodes[s].meta);
    for (const auto& w : nodes[s].warnings) fit.warnings.push_back("node " + std::to_string(s) + ": " + w);
    fit.nodemodels.push_back(std::move(nodes[s].model));
  }
  return fit;
}

MgmFit fit_mgm(const Dataset& data, const MgmOptions& options) {
  validate_dataset(data);
  validate_options(options, data.p());
  const int p = data.p();
  const VariableScaling scaling = compute_variable_scaling(data);
  std::vector<NodeDesign> designs(p);
  std::vector<NodeFitResult> nodes(p);
  parallel_for(p, options.threads, [&](int s) {
    try {
      designs[s] = build_mgm_design(data, scaling, s, options.k, DesignOptions{options.overparameterize, true});
    } catch (const Error& e) {
      throw NodeError(s, e.what());
    }
    NodeFitRequest req;
    req.node = s;
    req.spec = data.specs[s];
    req.design = &designs[s].design;
    req.response = designs[s].response;
    req.n_eff = data.n();
    req.response_scale = scaling.sd[s];
    nodes[s] = fit_node(req, options.selection);
  });
  return assemble_mgm_fit(data.specs, column_names(data), options, scaling, designs, std::move(nodes));
}

}  // namespace mgm
