#include "mgm/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgm/error.hpp"

namespace mgm {

namespace {

struct Block {
  std::vector<int> cats;               // -1 for a continuous source
  std::vector<Eigen::VectorXd> cols;
  ColumnKind kind = ColumnKind::continuous;
};

ColumnKind kind_of(const VariableSpec& spec) {
  switch (spec.kind) {
    case VarKind::gaussian: return ColumnKind::continuous;
    case VarKind::poisson: return ColumnKind::count;
    case VarKind::categorical: return ColumnKind::indicator;
  }
  return ColumnKind::continuous;
}

ColumnKind combine_kind(ColumnKind a, ColumnKind b) {
  if (a == ColumnKind::continuous || b == ColumnKind::continuous) return ColumnKind::continuous;
  if (a == ColumnKind::count || b == ColumnKind::count) return ColumnKind::count;
  return ColumnKind::indicator;
}

Block encode_block(const Eigen::VectorXd& values, const VariableSpec& spec, const DesignOptions& opt) {
  Block b;
  b.kind = kind_of(spec);
  if (!spec.categorical()) {
    b.cats.push_back(-1);
    b.cols.push_back(values);
    return b;
  }
  const Eigen::MatrixXd ind =
      encode_categorical(values, spec.levels, opt.overparameterize, opt.require_all_levels);
  const int first = opt.overparameterize ? 0 : 1;
  for (int c = 0; c < ind.cols(); ++c) {
    b.cats.push_back(first + c);
    b.cols.push_back(ind.col(c));
  }
  return b;
}

void append_group(DesignMatrix& d, std::vector<Eigen::VectorXd>& cols, const std::vector<int>& vars,
                  const std::vector<const Block*>& blocks, int lag) {
  const int gid = static_cast<int>(d.groups.size());
  d.groups.push_back({vars, lag});
  // Cartesian product of member blocks, last member varying fastest.
  std::vector<std::size_t> pos(blocks.size(), 0);
  while (true) {
    ColumnMeta meta;
    meta.vars = vars;
    meta.lag = lag;
    meta.kind = ColumnKind::indicator;
    Eigen::VectorXd col = blocks[0]->cols[pos[0]];
    for (std::size_t m = 0; m < blocks.size(); ++m) {
      if (m > 0) col.array() *= blocks[m]->cols[pos[m]].array();
      meta.cats.push_back(blocks[m]->cats[pos[m]]);
      meta.kind = m == 0 ? blocks[0]->kind : combine_kind(meta.kind, blocks[m]->kind);
    }
    cols.push_back(std::move(col));
    d.columns.push_back(std::move(meta));
    d.group.push_back(gid);
    std::size_t m = blocks.size();
    while (m-- > 0) {
      if (++pos[m] < blocks[m]->cols.size()) break;
      pos[m] = 0;
    }
    if (m == static_cast<std::size_t>(-1)) break;
  }
}

DesignMatrix assemble(std::vector<Eigen::VectorXd>& cols, DesignMatrix d, int rows) {
  d.x.resize(rows, static_cast<Eigen::Index>(cols.size()));
  d.constant.assign(cols.size(), false);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    d.x.col(static_cast<Eigen::Index>(j)) = cols[j];
    d.constant[j] = rows == 0 || cols[j].maxCoeff() == cols[j].minCoeff();
  }
  return d;
}

void combinations(const std::vector<int>& pool, int size, std::size_t start, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    combinations(pool, size, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Eigen::MatrixXd encode_categorical(const Eigen::VectorXd& column, int levels, bool overparameterize,
                                   bool require_all_levels) {
  if (levels < 2) throw DataError("categorical encoding needs at least 2 levels");
  const Eigen::Index n = column.size();
  std::vector<int> counts(levels, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = column[i];
    if (v != std::floor(v) || v < 0 || v >= levels) {
      throw DataError("categorical code out of range at row " + std::to_string(i));
    }
    ++counts[static_cast<int>(v)];
  }
  if (require_all_levels) {
    for (int c = 0; c < levels; ++c) {
      if (counts[c] == 0) throw DataError("empty category " + std::to_string(c));
    }
  }
  const int first = overparameterize ? 0 : 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, levels - first);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(column[i]);
    if (c >= first) out(i, c - first) = 1.0;
  }
  return out;
}

VariableScaling compute_variable_scaling(const Dataset& data) {
  const int p = data.p();
  const int n = data.n();
  VariableScaling s{std::vector<double>(p, 0.0), std::vector<double>(p, 1.0)};
  for (int j = 0; j < p; ++j) {
    if (data.specs[j].kind != VarKind::gaussian) continue;
    const double mean = data.values.col(j).mean();
    const double ss = (data.values.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0)) throw DataError("gaussian variable " + std::to_string(j) + " has zero variance");
    s.mean[j] = mean;
    s.sd[j] = sd;
  }
  return s;
}

Eigen::MatrixXd apply_variable_scaling(const Dataset& data, const VariableScaling& scaling) {
  Eigen::MatrixXd out = data.values;
  for (int j = 0; j < data.p(); ++j) {
    if (data.specs[j].kind == VarKind::gaussian) {
      out.col(j) = (out.col(j).array() - scaling.mean[j]) / scaling.sd[j];
    }
  }
  return out;
}

NodeDesign build_mgm_design(const Dataset& data, int target, int k, bool overparameterize) {
  return build_mgm_design(data, compute_variable_scaling(data), target, k,
                          DesignOptions{overparameterize, true});
}

NodeDesign build_mgm_design(const Dataset& data, const VariableScaling& scaling, int target, int k,
                            const DesignOptions& options) {
  const int p = data.p();
  const int n = data.n();
  if (k < 2) throw ModelError("interaction order k must be at least 2");
  if (p < 2) throw DataError("an MGM needs at least 2 variables");
  if (target < 0 || target >= p) throw DataError("target index out of range");

  const Eigen::MatrixXd z = apply_variable_scaling(data, scaling);
  std::vector<int> others;
  std::vector<Block> blocks(p);
  for (int r = 0; r < p; ++r) {
    if (r == target) continue;
    others.push_back(r);
    blocks[r] = encode_block(z.col(r), data.specs[r], options);
  }

  DesignMatrix d;
  std::vector<Eigen::VectorXd> cols;
  const int max_size = std::min(k - 1, p - 1);
  for (int size = 1; size <= max_size; ++size) {
    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    combinations(others, size, 0, cur, subsets);
    for (const auto& subset : subsets) {
      std::vector<const Block*> members;
      for (int r : subset) members.push_back(&blocks[r]);
      append_group(d, cols, subset, members, 0);
    }
  }

  NodeDesign out;
  out.design = assemble(cols, std::move(d), n);
  out.response = z.col(target);
  out.rows.resize(n);
  for (int i = 0; i < n; ++i) out.rows[i] = i;
  return out;
}

std::vector<bool> usable_rows(int n, const std::optional<std::vector<int>>& consec,
                              const std::vector<int>& lags) {
  if (lags.empty()) throw ModelError("lag set is empty");
  const int max_lag = *std::max_element(lags.begin(), lags.end());
  if (*std::min_element(lags.begin(), lags.end()) < 1) throw ModelError("lags must be positive");
  std::vector<bool> mask(n, false);
  for (int t = max_lag; t < n; ++t) {
    bool ok = true;
    if (consec) {
      for (int u = t - max_lag + 1; u <= t && ok; ++u) ok = (*consec)[u] == (*consec)[u - 1] + 1;
    }
    mask[t] = ok;
  }
  return mask;
}

VarDesign build_var_design(const Dataset& data, int target, const std::vector<int>& lags,
                           bool overparameterize) {
  return build_var_design(data, compute_variable_scaling(data), target, lags,
                          DesignOptions{overparameterize, true});
}

VarDesign build_var_design(const Dataset& data, const VariableScaling& scaling, int target,
                           const std::vector<int>& lags, const DesignOptions& options) {
  const int p = data.p();
  const int n = data.n();
  if (target < 0 || target >= p) throw DataError("target index out of range");
  if (lags.empty()) throw ModelError("lag set is empty");
  if (*std::max_element(lags.begin(), lags.end()) >= n) {
    throw DataError("largest lag must be smaller than the number of rows");
  }
  if (data.consec && static_cast<int>(data.consec->size()) != n) {
    throw DataError("consec length differs from n");
  }

  VarDesign out;
  out.inclusion_mask = usable_rows(n, data.consec, lags);
  for (int t = 0; t < n; ++t)
    if (out.inclusion_mask[t]) out.rows.push_back(t);
  if (out.rows.empty()) throw DataError("no consecutive sequences of required length");
  const int n_eff = static_cast<int>(out.rows.size());

  const Eigen::MatrixXd z = apply_variable_scaling(data, scaling);
  if (options.require_all_levels) {
    for (int r = 0; r < p; ++r) {
      if (data.specs[r].categorical()) {
        encode_categorical(z.col(r), data.specs[r].levels, false, true);
      }
    }
  }
  DesignOptions lagged = options;
  lagged.require_all_levels = false;

  DesignMatrix d;
  std::vector<Eigen::VectorXd> cols;
  for (int lag : lags) {
    for (int r = 0; r < p; ++r) {
      Eigen::VectorXd shifted(n_eff);
      for (int i = 0; i < n_eff; ++i) shifted[i] = z(out.rows[i] - lag, r);
      const Block b = encode_block(shifted, data.specs[r], lagged);
      append_group(d, cols, {r}, {&b}, lag);
    }
  }
  out.design = assemble(cols, std::move(d), n_eff);
  out.response.resize(n_eff);
  for (int i = 0; i < n_eff; ++i) out.response[i] = z(out.rows[i], target);
  return out;
}

StandardizedDesign standardize(const DesignMatrix& design) {
  StandardizedDesign out;
  const int n = design.n();
  auto& rec = out.record;
  std::vector<int> kept;
  for (int j = 0; j < design.q(); ++j) {
    const auto kind = design.columns[j].kind;
    const auto col = design.x.col(j);
    if (kind == ColumnKind::indicator) {
      kept.push_back(j);
      rec.center.push_back(0.0);
      rec.scale.push_back(1.0);
      continue;
    }
    const double mean = n > 0 ? col.mean() : 0.0;
    const double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / (n - 1)) : 0.0;
    if (!(sd > 0.0)) {
      rec.warnings.push_back("dropped zero-variance column " + std::to_string(j));
      continue;
    }
    kept.push_back(j);
    rec.center.push_back(mean);
    rec.scale.push_back(kind == ColumnKind::continuous ? sd : 1.0);
  }
  rec.kept = kept;

  DesignMatrix& d = out.design;
  d.groups = design.groups;
  d.x = apply_scaling(design, rec);
  for (int j : kept) {
    d.group.push_back(design.group[j]);
    d.columns.push_back(design.columns[j]);
    d.constant.push_back(design.constant[j]);
  }
  return out;
}

Eigen::MatrixXd apply_scaling(const DesignMatrix& raw, const ScaleRecord& record) {
  Eigen::MatrixXd x(raw.n(), static_cast<Eigen::Index>(record.kept.size()));
  for (std::size_t c = 0; c < record.kept.size(); ++c) {
    const int j = record.kept[c];
    if (j < 0 || j >= raw.q()) throw DataError("scale record does not match the design");
    x.col(static_cast<Eigen::Index>(c)) =
        (raw.x.col(j).array() - record.center[c]) / record.scale[c];
  }
  return x;
}

}  // namespace mgm
