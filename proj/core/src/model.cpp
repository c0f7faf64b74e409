#include "mgm/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mgm/error.hpp"

namespace mgm {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::gaussian: return "gaussian";
    case VarKind::poisson: return "poisson";
    case VarKind::categorical: return "categorical";
  }
  return "gaussian";
}

VarKind parse_var_kind(std::string_view text) {
  if (text == "gaussian" || text == "g") return VarKind::gaussian;
  if (text == "poisson" || text == "p") return VarKind::poisson;
  if (text == "categorical" || text == "c") return VarKind::categorical;
  throw DataError("unknown variable kind '" + std::string(text) + "'");
}

Family family_for(const VariableSpec& spec) {
  switch (spec.kind) {
    case VarKind::gaussian: return Family::gaussian;
    case VarKind::poisson: return Family::poisson;
    case VarKind::categorical: return Family::multinomial;
  }
  return Family::gaussian;
}

namespace {

void spec_violations(const std::vector<VariableSpec>& specs, std::vector<std::string>& out) {
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& v = specs[s];
    if (v.categorical() && v.levels < 2) {
      out.push_back("variable " + std::to_string(s) + ": categorical needs at least 2 levels");
    } else if (!v.categorical() && v.levels != 1) {
      out.push_back("variable " + std::to_string(s) + ": continuous variables have 1 level");
    }
  }
}

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

}  // namespace

void validate_specs(const std::vector<VariableSpec>& specs) {
  std::vector<std::string> v;
  spec_violations(specs, v);
  if (!v.empty()) throw DataError(v.front());
}

void validate_dataset(const Dataset& data) {
  const int n = data.n();
  const int p = data.p();
  if (n < 2) throw DataError("dataset needs at least 2 rows");
  if (p < 1) throw DataError("dataset has no variables");
  if (static_cast<int>(data.specs.size()) != p) {
    throw DataError("dataset has " + std::to_string(p) + " columns but " +
                    std::to_string(data.specs.size()) + " variable specs");
  }
  validate_specs(data.specs);
  for (int j = 0; j < p; ++j) {
    const auto& spec = data.specs[j];
    for (int i = 0; i < n; ++i) {
      const double x = data.values(i, j);
      if (!std::isfinite(x)) {
        throw DataError("missing or non-finite value at row " + std::to_string(i) + ", column " +
                        std::to_string(j));
      }
      if (spec.categorical() && (!is_integer(x) || x < 0 || x >= spec.levels)) {
        throw DataError("column " + std::to_string(j) + ": code out of range at row " +
                        std::to_string(i));
      }
      if (spec.kind == VarKind::poisson && (!is_integer(x) || x < 0)) {
        throw DataError("column " + std::to_string(j) + ": poisson cell is not a count at row " +
                        std::to_string(i));
      }
    }
  }
  if (data.timepoints) {
    const auto& t = *data.timepoints;
    if (static_cast<int>(t.size()) != n) throw DataError("timepoints length differs from n");
    for (int i = 1; i < n; ++i) {
      if (!(t[i] > t[i - 1])) {
        throw DataError("timepoints must be strictly increasing (row " + std::to_string(i) + ")");
      }
    }
  }
  if (data.consec && static_cast<int>(data.consec->size()) != n) {
    throw DataError("consec length differs from n");
  }
  if (!data.names.empty() && static_cast<int>(data.names.size()) != p) {
    throw DataError("name count differs from column count");
  }
}

std::vector<std::string> column_names(const Dataset& data) {
  if (!data.names.empty()) return data.names;
  std::vector<std::string> out;
  for (int j = 0; j < data.p(); ++j) out.push_back("x" + std::to_string(j));
  return out;
}

ModelDiagnostics validate_model(const FactorModel& model) {
  ModelDiagnostics d;
  const int p = model.p();
  spec_violations(model.specs, d.violations);
  if (static_cast<int>(model.thresholds.size()) != p) {
    d.violations.push_back("expected " + std::to_string(p) + " threshold vectors");
  } else {
    for (int s = 0; s < p; ++s) {
      if (static_cast<int>(model.thresholds[s].size()) != model.specs[s].levels) {
        d.violations.push_back("variable " + std::to_string(s) + ": threshold length mismatch");
      }
    }
  }
  if (static_cast<int>(model.sds.size()) != p) {
    d.violations.push_back("expected " + std::to_string(p) + " standard deviations");
  } else {
    for (int s = 0; s < p; ++s) {
      if (model.specs[s].kind == VarKind::gaussian && !(model.sds[s] > 0.0)) {
        d.violations.push_back("variable " + std::to_string(s) + ": sd must be positive");
      }
    }
  }

  for (std::size_t f = 0; f < model.factors.size(); ++f) {
    const auto& factor = model.factors[f];
    const std::string tag = "factor " + std::to_string(f) + ": ";
    const auto& m = factor.members;
    if (m.size() < 2) {
      d.violations.push_back(tag + "needs at least 2 members");
      continue;
    }
    bool in_range = true;
    for (int r : m) {
      if (r < 0 || r >= p) in_range = false;
    }
    if (!in_range) {
      d.violations.push_back(tag + "member index out of range");
      continue;
    }
    if (std::set<int>(m.begin(), m.end()).size() != m.size()) {
      d.violations.push_back(tag + "duplicate index");
      continue;
    }
    if (!std::is_sorted(m.begin(), m.end())) d.violations.push_back(tag + "indices not sorted");
    bool shape_ok = factor.params.rank() == static_cast<int>(m.size());
    for (std::size_t a = 0; shape_ok && a < m.size(); ++a) {
      shape_ok = factor.params.shape()[a] == model.specs[m[a]].levels;
    }
    if (!shape_ok) {
      d.violations.push_back(tag + "shape mismatch");
      continue;
    }
    if (m.size() == 2 && static_cast<int>(model.sds.size()) == p) {
      const auto& a = model.specs[m[0]];
      const auto& b = model.specs[m[1]];
      const double theta = factor.params[0];
      // Interactions enter on the sd-scaled sufficient statistics, so the
      // standardized precisions are 1 and their product is the bound.
      if (a.kind == VarKind::gaussian && b.kind == VarKind::gaussian && std::abs(theta) >= 1.0) {
        d.warnings.push_back(tag + "gaussian-gaussian interaction magnitude >= product of "
                                   "precisions; the joint density may not be normalizable");
      }
      if (a.kind == VarKind::poisson && b.kind == VarKind::poisson && theta > 0.0) {
        d.warnings.push_back(tag + "positive poisson-poisson interaction; the joint density "
                                   "is not normalizable");
      }
    }
  }
  return d;
}

MvarCoefficients::MvarCoefficients(int p, int max_level, std::vector<int> lag_set)
    : lags(std::move(lag_set)),
      coefs({p, p, max_level, max_level, static_cast<int>(lags.size())}, 0.0) {}

double& MvarCoefficients::at(int target, int predictor, int tcat, int pcat, int lag_index) {
  const int idx[5] = {target, predictor, tcat, pcat, lag_index};
  return coefs.at(idx);
}

double MvarCoefficients::at(int target, int predictor, int tcat, int pcat, int lag_index) const {
  const int idx[5] = {target, predictor, tcat, pcat, lag_index};
  return coefs.at(idx);
}

ModelDiagnostics validate_model(const MvarModel& model) {
  ModelDiagnostics d;
  const int p = model.p();
  spec_violations(model.specs, d.violations);
  const auto& c = model.coefficients;
  if (c.lags.empty()) d.violations.push_back("lag set is empty");
  for (std::size_t l = 0; l < c.lags.size(); ++l) {
    if (c.lags[l] < 1) d.violations.push_back("lags must be positive");
    if (l > 0 && c.lags[l] <= c.lags[l - 1]) d.violations.push_back("lags must be strictly increasing");
  }
  int max_level = 1;
  for (const auto& s : model.specs) max_level = std::max(max_level, s.levels);
  if (c.coefs.rank() != 5 || c.p() != p || c.max_level() < max_level ||
      c.coefs.shape()[1] != p || c.coefs.shape()[3] != c.max_level() ||
      c.coefs.shape()[4] != static_cast<int>(c.lags.size())) {
    d.violations.push_back("coefficient array shape mismatch");
  } else {
    bool stray = false;
    for_each_index(c.coefs.shape(), [&](std::span<const int> idx) {
      if (c.coefs.at(idx) != 0.0 &&
          (idx[2] >= model.specs[idx[0]].levels || idx[3] >= model.specs[idx[1]].levels)) {
        stray = true;
      }
    });
    if (stray) d.violations.push_back("nonzero coefficient outside the valid level range");
  }
  if (static_cast<int>(model.thresholds.size()) != p) {
    d.violations.push_back("expected " + std::to_string(p) + " threshold vectors");
  } else {
    for (int s = 0; s < p; ++s) {
      if (static_cast<int>(model.thresholds[s].size()) != model.specs[s].levels) {
        d.violations.push_back("variable " + std::to_string(s) + ": threshold length mismatch");
      }
    }
  }
  if (static_cast<int>(model.sds.size()) != p) {
    d.violations.push_back("expected " + std::to_string(p) + " standard deviations");
  } else {
    for (int s = 0; s < p; ++s) {
      if (model.specs[s].kind == VarKind::gaussian && !(model.sds[s] > 0.0)) {
        d.violations.push_back("variable " + std::to_string(s) + ": sd must be positive");
      }
    }
  }
  return d;
}

}  // namespace mgm
