#include "mgm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mgm/error.hpp"

namespace mgm {

using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- primitive encoders -------------------------------------------------

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_vec(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(get_num(x));
  return out;
}

json vec(const Eigen::VectorXd& v) { return vec(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd get_evec(const json& j) {
  const auto v = get_vec(j);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(num(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd get_mat(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>();
  const auto c = j.at("cols").get<Eigen::Index>();
  const auto& d = j.at("data");
  if (static_cast<Eigen::Index>(d.size()) != r * c) throw DataError("matrix data length mismatch");
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = get_num(d[static_cast<std::size_t>(i * c + k)]);
  return m;
}

json ndarray(const NdArray& a) { return {{"shape", a.shape()}, {"values", vec(a.values())}}; }

NdArray get_ndarray(const json& j) { return NdArray(j.at("shape").get<std::vector<int>>(), get_vec(j.at("values"))); }

json sign_json(Sign s) {
  switch (s) {
    case Sign::positive: return 1;
    case Sign::negative: return -1;
    case Sign::undefined: return "u";
  }
  return "u";
}

Sign get_sign(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "u") throw DataError("unknown sign value");
    return Sign::undefined;
  }
  const int v = j.get<int>();
  if (v == 1) return Sign::positive;
  if (v == -1) return Sign::negative;
  throw DataError("unknown sign value");
}

json signs_json(const SignMatrix& s) {
  json out = json::array();
  for (int i = 0; i < s.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < s.cols(); ++j) row.push_back(sign_json(s(i, j)));
    out.push_back(row);
  }
  return out;
}

SignMatrix get_signs(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  SignMatrix s(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw DataError("ragged sign matrix");
    for (int k = 0; k < cols; ++k) s(i, k) = get_sign(j[i][k]);
  }
  return s;
}

json specs_json(const std::vector<VariableSpec>& specs, const std::vector<std::string>& names) {
  json out = json::array();
  for (std::size_t s = 0; s < specs.size(); ++s) {
    json v = {{"kind", std::string(to_string(specs[s].kind))}, {"levels", specs[s].levels}};
    if (s < names.size()) v["name"] = names[s];
    out.push_back(v);
  }
  return out;
}

std::vector<VariableSpec> get_specs(const json& j, std::vector<std::string>* names) {
  std::vector<VariableSpec> specs;
  for (const auto& v : j) {
    VariableSpec s;
    s.kind = parse_var_kind(v.at("kind").get<std::string>());
    s.levels = v.value("levels", s.kind == VarKind::categorical ? 0 : 1);
    specs.push_back(s);
    if (names) names->push_back(v.value("name", "x" + std::to_string(specs.size() - 1)));
  }
  validate_specs(specs);
  return specs;
}

// ---- options -------------------------------------------------------------

json selection_json(const SelectionSpec& s) {
  json j = {{"method", s.method == LambdaSelection::cv ? "cv" : "ebic"},
            {"gamma", s.gamma},
            {"folds", s.folds},
            {"alpha_seq", s.alpha_seq},
            {"threshold", s.threshold == ThresholdMode::lw ? "lw" : "none"},
            {"seed", s.seed},
            {"n_lambda", s.n_lambda}};
  j["min_ratio"] = s.min_ratio ? json(*s.min_ratio) : json(nullptr);
  return j;
}

SelectionSpec get_selection(const json& j) {
  SelectionSpec s;
  s.method = j.at("method").get<std::string>() == "cv" ? LambdaSelection::cv : LambdaSelection::ebic;
  s.gamma = j.at("gamma").get<double>();
  s.folds = j.at("folds").get<int>();
  s.alpha_seq = j.at("alpha_seq").get<std::vector<double>>();
  s.threshold = j.at("threshold").get<std::string>() == "lw" ? ThresholdMode::lw : ThresholdMode::none;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.n_lambda = j.at("n_lambda").get<int>();
  if (!j.at("min_ratio").is_null()) s.min_ratio = j.at("min_ratio").get<double>();
  return s;
}

// Thread counts are left out so documents do not depend on them.
json options_json(const MgmOptions& o) {
  return {{"k", o.k},
          {"rule", o.rule == CombineRule::and_rule ? "and" : "or"},
          {"overparameterize", o.overparameterize},
          {"binary_sign", o.binary_sign},
          {"selection", selection_json(o.selection)}};
}

MgmOptions get_mgm_options(const json& j) {
  MgmOptions o;
  o.k = j.at("k").get<int>();
  o.rule = j.at("rule").get<std::string>() == "and" ? CombineRule::and_rule : CombineRule::or_rule;
  o.overparameterize = j.at("overparameterize").get<bool>();
  o.binary_sign = j.at("binary_sign").get<bool>();
  o.selection = get_selection(j.at("selection"));
  return o;
}

json options_json(const MvarOptions& o) {
  return {{"overparameterize", o.overparameterize},
          {"binary_sign", o.binary_sign},
          {"selection", selection_json(o.selection)}};
}

MvarOptions get_mvar_options(const json& j) {
  MvarOptions o;
  o.overparameterize = j.at("overparameterize").get<bool>();
  o.binary_sign = j.at("binary_sign").get<bool>();
  o.selection = get_selection(j.at("selection"));
  return o;
}

// ---- node data -------------------------------------------------------------

std::string family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::poisson: return "poisson";
    case Family::multinomial: return "multinomial";
  }
  return "gaussian";
}

Family get_family(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "poisson") return Family::poisson;
  if (s == "multinomial") return Family::multinomial;
  throw DataError("unknown family '" + s + "'");
}

json nodemeta_json(const std::vector<NodeMeta>& metas) {
  json out = json::array();
  for (const auto& m : metas) {
    out.push_back({{"lambda", num(m.lambda)},
                   {"alpha", num(m.alpha)},
                   {"s0", m.s0},
                   {"deviance", num(m.deviance)},
                   {"n_eff", num(m.n_eff)},
                   {"tau", num(m.tau)},
                   {"converged", m.converged},
                   {"train_error", num(m.train_error)}});
  }
  return out;
}

std::vector<NodeMeta> get_nodemeta(const json& j) {
  std::vector<NodeMeta> out;
  for (const auto& m : j) {
    NodeMeta x;
    x.lambda = get_num(m.at("lambda"));
    x.alpha = get_num(m.at("alpha"));
    x.s0 = m.at("s0").get<int>();
    x.deviance = get_num(m.at("deviance"));
    x.n_eff = get_num(m.at("n_eff"));
    x.tau = get_num(m.at("tau"));
    x.converged = m.at("converged").get<bool>();
    x.train_error = get_num(m.at("train_error"));
    out.push_back(x);
  }
  return out;
}

json nodemodels_json(const std::vector<NodeModel>& models) {
  json out = json::array();
  for (const auto& m : models) {
    out.push_back({{"node", m.node},
                   {"family", family_name(m.family)},
                   {"classes", m.classes},
                   {"kept", m.scaling.kept},
                   {"center", vec(m.scaling.center)},
                   {"scale", vec(m.scaling.scale)},
                   {"intercept", vec(m.intercept)},
                   {"beta", mat(m.beta)},
                   {"residual_sd", num(m.residual_sd)}});
  }
  return out;
}

std::vector<NodeModel> get_nodemodels(const json& j) {
  std::vector<NodeModel> out;
  for (const auto& m : j) {
    NodeModel x;
    x.node = m.at("node").get<int>();
    x.family = get_family(m.at("family").get<std::string>());
    x.classes = m.at("classes").get<int>();
    x.scaling.kept = m.at("kept").get<std::vector<int>>();
    x.scaling.center = get_vec(m.at("center"));
    x.scaling.scale = get_vec(m.at("scale"));
    x.intercept = get_evec(m.at("intercept"));
    x.beta = get_mat(m.at("beta"));
    x.residual_sd = get_num(m.at("residual_sd"));
    out.push_back(std::move(x));
  }
  return out;
}

json intercepts_json(const std::vector<Eigen::VectorXd>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(vec(x));
  return out;
}

std::vector<Eigen::VectorXd> get_intercepts(const json& j) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& x : j) out.push_back(get_evec(x));
  return out;
}

json scaling_json(const VariableScaling& s) { return {{"mean", vec(s.mean)}, {"sd", vec(s.sd)}}; }

VariableScaling get_scaling(const json& j) { return {get_vec(j.at("mean")), get_vec(j.at("sd"))}; }

// ---- fits ------------------------------------------------------------------

json body(const MgmFit& f) {
  json rf = json::array();
  for (const auto& r : f.rawfactors) {
    rf.push_back({{"members", r.members}, {"params", ndarray(r.params)}, {"weight", num(r.weight)}});
  }
  return {{"variables", specs_json(f.specs, f.names)},
          {"options", options_json(f.options)},
          {"wadj", mat(f.wadj)},
          {"signs", signs_json(f.signs)},
          {"rawfactors", rf},
          {"intercepts", intercepts_json(f.intercepts)},
          {"nodemeta", nodemeta_json(f.nodemeta)},
          {"nodemodels", nodemodels_json(f.nodemodels)},
          {"scaling", scaling_json(f.scaling)},
          {"warnings", f.warnings}};
}

MgmFit get_mgm(const json& j) {
  MgmFit f;
  f.specs = get_specs(j.at("variables"), &f.names);
  f.options = get_mgm_options(j.at("options"));
  f.wadj = get_mat(j.at("wadj"));
  f.signs = get_signs(j.at("signs"));
  for (const auto& r : j.at("rawfactors")) {
    f.rawfactors.push_back(
        {r.at("members").get<std::vector<int>>(), get_ndarray(r.at("params")), get_num(r.at("weight"))});
  }
  f.intercepts = get_intercepts(j.at("intercepts"));
  f.nodemeta = get_nodemeta(j.at("nodemeta"));
  f.nodemodels = get_nodemodels(j.at("nodemodels"));
  f.scaling = get_scaling(j.at("scaling"));
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  return f;
}

json body(const MvarFit& f) {
  json wadj = json::array();
  json signs = json::array();
  for (const auto& w : f.wadj) wadj.push_back(mat(w));
  for (const auto& s : f.signs) signs.push_back(signs_json(s));
  return {{"variables", specs_json(f.specs, f.names)},
          {"lags", f.lags},
          {"options", options_json(f.options)},
          {"wadj", wadj},
          {"signs", signs},
          {"intercepts", intercepts_json(f.intercepts)},
          {"inclusion_mask", f.inclusion_mask},
          {"nodemeta", nodemeta_json(f.nodemeta)},
          {"nodemodels", nodemodels_json(f.nodemodels)},
          {"scaling", scaling_json(f.scaling)},
          {"warnings", f.warnings}};
}

MvarFit get_mvar(const json& j) {
  MvarFit f;
  f.specs = get_specs(j.at("variables"), &f.names);
  f.lags = j.at("lags").get<std::vector<int>>();
  f.options = get_mvar_options(j.at("options"));
  for (const auto& w : j.at("wadj")) f.wadj.push_back(get_mat(w));
  for (const auto& s : j.at("signs")) f.signs.push_back(get_signs(s));
  f.intercepts = get_intercepts(j.at("intercepts"));
  f.inclusion_mask = j.at("inclusion_mask").get<std::vector<bool>>();
  f.nodemeta = get_nodemeta(j.at("nodemeta"));
  f.nodemodels = get_nodemodels(j.at("nodemodels"));
  f.scaling = get_scaling(j.at("scaling"));
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  return f;
}

template <class Fit>
json tv_body(const TvFit<Fit>& f) {
  json fits = json::array();
  for (const auto& x : f.fits) fits.push_back(body(x));
  return {{"estpoints", vec(f.estpoints)},
          {"bandwidth", num(f.bandwidth)},
          {"local_n", vec(f.local_n)},
          {"warnings", f.warnings},
          {"fits", fits}};
}

template <class Fit, class Get>
TvFit<Fit> get_tv(const json& j, Get get) {
  TvFit<Fit> f;
  f.estpoints = get_vec(j.at("estpoints"));
  f.bandwidth = get_num(j.at("bandwidth"));
  f.local_n = get_vec(j.at("local_n"));
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& x : j.at("fits")) f.fits.push_back(get(x));
  return f;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

template <class Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed document: ") + e.what());
  }
}

void check_version(const json& j) {
  const int v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw DataError("schema version mismatch: document has " + std::to_string(v) + ", expected " +
                    std::to_string(kSchemaVersion));
  }
}

// ---- models ---------------------------------------------------------------

json factor_model_body(const FactorModel& m) {
  json factors = json::array();
  for (const auto& f : m.factors) factors.push_back({{"members", f.members}, {"values", vec(f.params.values())}});
  json thresholds = json::array();
  for (const auto& t : m.thresholds) thresholds.push_back(vec(t));
  return {{"thresholds", thresholds}, {"sds", vec(m.sds)}, {"factors", factors}};
}

FactorModel get_factor_model(const json& j, const std::vector<VariableSpec>& specs) {
  FactorModel m;
  m.specs = specs;
  for (const auto& t : j.at("thresholds")) m.thresholds.push_back(get_vec(t));
  m.sds = get_vec(j.at("sds"));
  for (const auto& f : j.value("factors", json::array())) {
    Factor x;
    x.members = f.at("members").get<std::vector<int>>();
    std::vector<int> shape;
    for (int r : x.members) {
      if (r < 0 || r >= static_cast<int>(specs.size())) throw DataError("factor member index out of range");
      shape.push_back(specs[r].levels);
    }
    x.params = NdArray(shape, get_vec(f.at("values")));
    m.factors.push_back(std::move(x));
  }
  return m;
}

json mvar_model_body(const MvarModel& m) {
  json coefs = json::array();
  const auto& c = m.coefficients;
  for (int s = 0; s < m.p(); ++s) {
    for (int r = 0; r < m.p(); ++r) {
      for (std::size_t l = 0; l < c.lags.size(); ++l) {
        json values = json::array();
        bool any = false;
        for (int a = 0; a < m.specs[s].levels; ++a) {
          json row = json::array();
          for (int b = 0; b < m.specs[r].levels; ++b) {
            const double v = c.at(s, r, a, b, static_cast<int>(l));
            any = any || v != 0.0;
            row.push_back(num(v));
          }
          values.push_back(row);
        }
        if (any) coefs.push_back({{"target", s}, {"predictor", r}, {"lag", c.lags[l]}, {"values", values}});
      }
    }
  }
  json thresholds = json::array();
  for (const auto& t : m.thresholds) thresholds.push_back(vec(t));
  return {{"thresholds", thresholds}, {"sds", vec(m.sds)}, {"coefficients", coefs}};
}

MvarModel get_mvar_model(const json& j, const std::vector<VariableSpec>& specs, const std::vector<int>& lags) {
  MvarModel m;
  m.specs = specs;
  int max_level = 1;
  for (const auto& s : specs) max_level = std::max(max_level, s.levels);
  m.coefficients = MvarCoefficients(static_cast<int>(specs.size()), max_level, lags);
  for (const auto& t : j.at("thresholds")) m.thresholds.push_back(get_vec(t));
  m.sds = get_vec(j.at("sds"));
  for (const auto& c : j.value("coefficients", json::array())) {
    const int s = c.at("target").get<int>();
    const int r = c.at("predictor").get<int>();
    const int lag = c.at("lag").get<int>();
    const auto it = std::find(lags.begin(), lags.end(), lag);
    if (it == lags.end()) throw DataError("coefficient lag not in the lag set");
    if (s < 0 || r < 0 || s >= m.p() || r >= m.p()) throw DataError("coefficient index out of range");
    const auto& values = c.at("values");
    if (static_cast<int>(values.size()) != specs[s].levels) throw DataError("coefficient block shape mismatch");
    for (int a = 0; a < specs[s].levels; ++a) {
      if (static_cast<int>(values[a].size()) != specs[r].levels) throw DataError("coefficient block shape mismatch");
      for (int b = 0; b < specs[r].levels; ++b) {
        m.coefficients.at(s, r, a, b, static_cast<int>(it - lags.begin())) = get_num(values[a][b]);
      }
    }
  }
  return m;
}

// ---- CSV ------------------------------------------------------------------

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool parse_number(const std::string& cell, double& out) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
  if (b == e) return false;
  if (*b == '+') ++b;
  const auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

std::string sign_text(Sign s) {
  switch (s) {
    case Sign::positive: return "1";
    case Sign::negative: return "-1";
    case Sign::undefined: return "u";
  }
  return "u";
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
      if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
      record.clear();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", text.size());
  if (field_started || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw DataError("CSV has no header row");
  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw DataError("CSV row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                      " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

Schema parse_schema(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    Schema s;
    for (const auto& v : j.at("variables")) {
      ColumnSchema c;
      c.name = v.at("name").get<std::string>();
      c.spec.kind = parse_var_kind(v.at("kind").get<std::string>());
      c.spec.levels = v.value("levels", c.spec.kind == VarKind::categorical ? 0 : 1);
      if (c.spec.categorical()) {
        if (v.contains("codes")) {
          c.codes = v.at("codes").get<std::vector<long long>>();
          if (static_cast<int>(c.codes.size()) != c.spec.levels) {
            throw DataError("variable '" + c.name + "': codes length differs from levels");
          }
        } else {
          for (int k = 0; k < c.spec.levels; ++k) c.codes.push_back(k);
        }
      }
      s.variables.push_back(std::move(c));
    }
    std::vector<VariableSpec> specs;
    for (const auto& c : s.variables) specs.push_back(c.spec);
    validate_specs(specs);
    if (j.contains("timepoints") && !j.at("timepoints").is_null()) s.timepoints = j.at("timepoints").get<std::string>();
    if (j.contains("consec") && !j.at("consec").is_null()) s.consec = j.at("consec").get<std::string>();
    return s;
  });
}

std::string schema_to_json(const Schema& s, const std::map<std::string, std::string>& extra) {
  json vars = json::array();
  for (const auto& c : s.variables) {
    json v = {{"name", c.name}, {"kind", std::string(to_string(c.spec.kind))}, {"levels", c.spec.levels}};
    if (c.spec.categorical()) v["codes"] = c.codes;
    vars.push_back(v);
  }
  json j = {{"variables", vars}};
  if (s.timepoints) j["timepoints"] = *s.timepoints;
  if (s.consec) j["consec"] = *s.consec;
  for (const auto& [k, v] : extra) j[k] = v;
  return j.dump(2) + "\n";
}

void require_binary_01(const Schema& schema) {
  for (const auto& c : schema.variables) {
    if (c.spec.binary() && c.codes != std::vector<long long>{0, 1}) {
      throw DataError("binary variable '" + c.name + "' must be coded {0, 1} for binary signs");
    }
  }
}

Schema default_schema(const Dataset& data) {
  Schema s;
  const auto names = column_names(data);
  for (int j = 0; j < data.p(); ++j) {
    ColumnSchema c{names[j], data.specs[j], {}};
    for (int k = 0; c.spec.categorical() && k < c.spec.levels; ++k) c.codes.push_back(k);
    s.variables.push_back(std::move(c));
  }
  if (data.timepoints) s.timepoints = "time";
  if (data.consec) s.consec = "consec";
  return s;
}

LoadedData make_dataset(const CsvTable& table, const Schema& schema) {
  auto column = [&](const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw DataError("schema references missing column '" + name + "'");
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const int n = static_cast<int>(table.rows.size());
  const int p = static_cast<int>(schema.variables.size());
  LoadedData out;
  out.schema = schema;
  Dataset& d = out.data;
  d.values.resize(n, p);
  for (int s = 0; s < p; ++s) {
    const ColumnSchema& c = schema.variables[s];
    d.specs.push_back(c.spec);
    d.names.push_back(c.name);
    const std::size_t col = column(c.name);
    for (int i = 0; i < n; ++i) {
      const std::string& cell = table.rows[i][col];
      double v = 0.0;
      if (!parse_number(cell, v) || !std::isfinite(v)) {
        throw DataError("column '" + c.name + "', row " + std::to_string(i) + ": missing or non-numeric value");
      }
      if (c.spec.categorical()) {
        if (v != std::floor(v)) {
          throw DataError("column '" + c.name + "', row " + std::to_string(i) + ": non-integer categorical cell");
        }
        const auto it = std::find(c.codes.begin(), c.codes.end(), static_cast<long long>(v));
        if (it == c.codes.end()) {
          throw DataError("column '" + c.name + "', row " + std::to_string(i) + ": code out of range");
        }
        v = static_cast<double>(it - c.codes.begin());
      }
      d.values(i, s) = v;
    }
  }
  if (schema.timepoints) {
    const std::size_t col = column(*schema.timepoints);
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
      if (!parse_number(table.rows[i][col], t[i])) throw DataError("non-numeric timepoint at row " + std::to_string(i));
    }
    d.timepoints = std::move(t);
  }
  if (schema.consec) {
    const std::size_t col = column(*schema.consec);
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      if (!parse_number(table.rows[i][col], v) || v != std::floor(v)) {
        throw DataError("non-integer consec value at row " + std::to_string(i));
      }
      c[i] = static_cast<int>(v);
    }
    d.consec = std::move(c);
  }
  validate_dataset(d);
  return out;
}

LoadedData load_dataset(const std::string& data_path, const std::string& schema_path) {
  return make_dataset(parse_csv(read_text(data_path)), parse_schema(read_text(schema_path)));
}

std::string dataset_to_csv(const Dataset& data, const Schema& schema) {
  if (static_cast<int>(schema.variables.size()) != data.p()) throw DataError("schema does not match dataset");
  CsvTable t;
  for (const auto& c : schema.variables) t.header.push_back(c.name);
  if (data.timepoints) t.header.push_back(schema.timepoints.value_or("time"));
  if (data.consec) t.header.push_back(schema.consec.value_or("consec"));
  for (int i = 0; i < data.n(); ++i) {
    std::vector<std::string> row;
    for (int s = 0; s < data.p(); ++s) {
      const auto& c = schema.variables[s];
      const double v = data.values(i, s);
      row.push_back(c.spec.categorical() ? std::to_string(c.codes.at(static_cast<std::size_t>(v))) : format_double(v));
    }
    if (data.timepoints) row.push_back(format_double((*data.timepoints)[i]));
    if (data.consec) row.push_back(std::to_string((*data.consec)[i]));
    t.rows.push_back(std::move(row));
  }
  return to_csv(t);
}

std::string fit_to_json(const AnyFit& fit, const Metadata& metadata) {
  json j = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        json b;
        if constexpr (std::is_same_v<T, MgmFit>) {
          b = body(f);
          b["type"] = "mgm";
        } else if constexpr (std::is_same_v<T, MvarFit>) {
          b = body(f);
          b["type"] = "mvar";
        } else if constexpr (std::is_same_v<T, TvMgmFit>) {
          b = tv_body(f);
          b["type"] = "tvmgm";
        } else {
          b = tv_body(f);
          b["type"] = "tvmvar";
        }
        return b;
      },
      fit);
  j["schema_version"] = kSchemaVersion;
  j["metadata"] = metadata;
  return j.dump(1) + "\n";
}

AnyFit fit_from_json(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&]() -> AnyFit {
    check_version(j);
    const std::string type = j.at("type").get<std::string>();
    if (type == "mgm") return get_mgm(j);
    if (type == "mvar") return get_mvar(j);
    if (type == "tvmgm") return get_tv<MgmFit>(j, get_mgm);
    if (type == "tvmvar") return get_tv<MvarFit>(j, get_mvar);
    throw DataError("unknown fit type '" + type + "'");
  });
}

Metadata fit_metadata(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] { return j.value("metadata", json::object()).get<Metadata>(); });
}

void save_fit(const std::string& path, const AnyFit& fit, const Metadata& metadata) {
  write_text(path, fit_to_json(fit, metadata));
}

AnyFit load_fit(const std::string& path) { return fit_from_json(read_text(path)); }

ModelDocument model_from_json(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    ModelDocument doc;
    const auto specs = get_specs(j.at("variables"), &doc.names);
    const std::string type = j.at("type").get<std::string>();
    if (type == "mgm") {
      doc.model = get_factor_model(j, specs);
    } else if (type == "mvar") {
      doc.model = get_mvar_model(j, specs, j.at("lags").get<std::vector<int>>());
    } else if (type == "tvmgm") {
      std::vector<FactorModel> models;
      for (const auto& m : j.at("models")) models.push_back(get_factor_model(m, specs));
      doc.model = std::move(models);
    } else if (type == "tvmvar") {
      const auto lags = j.at("lags").get<std::vector<int>>();
      std::vector<MvarModel> models;
      for (const auto& m : j.at("models")) models.push_back(get_mvar_model(m, specs, lags));
      doc.model = std::move(models);
    } else {
      throw DataError("unknown model type '" + type + "'");
    }
    return doc;
  });
}

std::string model_to_json(const ModelDocument& doc) {
  json j = std::visit(
      [&](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FactorModel>) {
          json b = factor_model_body(m);
          b["type"] = "mgm";
          b["variables"] = specs_json(m.specs, doc.names);
          return b;
        } else if constexpr (std::is_same_v<T, MvarModel>) {
          json b = mvar_model_body(m);
          b["type"] = "mvar";
          b["variables"] = specs_json(m.specs, doc.names);
          b["lags"] = m.coefficients.lags;
          return b;
        } else if constexpr (std::is_same_v<T, std::vector<FactorModel>>) {
          if (m.empty()) throw ModelError("empty model sequence");
          json models = json::array();
          for (const auto& x : m) models.push_back(factor_model_body(x));
          return {{"type", "tvmgm"}, {"variables", specs_json(m.front().specs, doc.names)}, {"models", models}};
        } else {
          if (m.empty()) throw ModelError("empty model sequence");
          json models = json::array();
          for (const auto& x : m) models.push_back(mvar_model_body(x));
          return {{"type", "tvmvar"},
                  {"variables", specs_json(m.front().specs, doc.names)},
                  {"lags", m.front().coefficients.lags},
                  {"models", models}};
        }
      },
      doc.model);
  return j.dump(1) + "\n";
}

std::string predictions_to_csv(const PredictionResult& r, const Schema& schema) {
  CsvTable t;
  const int p = static_cast<int>(schema.variables.size());
  if (r.predicted.cols() != p) throw DataError("schema does not match predictions");
  for (const auto& c : schema.variables) t.header.push_back(c.name);
  for (int s = 0; s < p; ++s) {
    const auto& c = schema.variables[s];
    if (!c.spec.categorical()) continue;
    for (long long code : c.codes) t.header.push_back(c.name + "_prob_" + std::to_string(code));
  }
  for (Eigen::Index i = 0; i < r.predicted.rows(); ++i) {
    std::vector<std::string> row;
    for (int s = 0; s < p; ++s) {
      const double v = r.predicted(i, s);
      const auto& c = schema.variables[s];
      row.push_back(c.spec.categorical() && !std::isnan(v) ? std::to_string(c.codes.at(static_cast<std::size_t>(v)))
                                                            : format_double(v));
    }
    for (int s = 0; s < p; ++s) {
      if (!schema.variables[s].spec.categorical()) continue;
      for (Eigen::Index k = 0; k < r.probabilities[s].cols(); ++k) row.push_back(format_double(r.probabilities[s](i, k)));
    }
    t.rows.push_back(std::move(row));
  }
  return to_csv(t);
}

std::string errors_to_csv(const PredictionResult& r, const Schema& schema) {
  CsvTable t;
  t.header.push_back("variable");
  for (const auto& m : r.metric_names) t.header.push_back(m);
  for (Eigen::Index s = 0; s < r.errors.rows(); ++s) {
    std::vector<std::string> row{schema.variables.at(static_cast<std::size_t>(s)).name};
    for (Eigen::Index k = 0; k < r.errors.cols(); ++k) row.push_back(format_double(r.errors(s, k)));
    t.rows.push_back(std::move(row));
  }
  return to_csv(t);
}

std::string graph_to_csv(const MgmFit& fit) {
  CsvTable t;
  t.header = {"source", "target", "lag", "weight", "sign"};
  for (int i = 0; i < fit.p(); ++i) {
    for (int j = i + 1; j < fit.p(); ++j) {
      if (fit.wadj(i, j) > 0.0) {
        t.rows.push_back({fit.names[i], fit.names[j], "", format_double(fit.wadj(i, j)), sign_text(fit.signs(i, j))});
      }
    }
  }
  return to_csv(t);
}

std::string graph_to_csv(const MvarFit& fit) {
  CsvTable t;
  t.header = {"source", "target", "lag", "weight", "sign"};
  for (std::size_t l = 0; l < fit.wadj.size(); ++l) {
    const auto& w = fit.wadj[l];
    for (int j = 0; j < fit.p(); ++j) {
      for (int i = 0; i < fit.p(); ++i) {
        if (w(i, j) > 0.0) {
          t.rows.push_back({fit.names[j], fit.names[i], std::to_string(fit.lags[l]), format_double(w(i, j)),
                            sign_text(fit.signs[l](i, j))});
        }
      }
    }
  }
  return to_csv(t);
}

}  // namespace mgm
