#include "cli.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mgm/error.hpp"
#include "mgm/io.hpp"
#include "mgm/mgm.hpp"
#include "mgm/mvar.hpp"
#include "mgm/prediction.hpp"
#include "mgm/samplers.hpp"
#include "mgm/timevarying.hpp"

namespace mgm::cli {
namespace {

constexpr const char* kProgram = "mgmtool";

struct Args {
  std::string data, schema, out, model, errors_out, schema_out, type = "mgm";
  std::uint64_t seed = 1;
  int k = 2;
  std::vector<int> lags{1};
  std::string lambda_sel = "cv";
  int lambda_folds = 10;
  double lambda_gam = 0.25;
  std::vector<double> alpha_seq{1.0};
  std::string rule = "and";
  std::string threshold = "lw";
  bool overparameterize = false;
  bool binary_sign = false;
  double bandwidth = 0.0;
  std::string estpoints = "20";
  std::vector<double> bw_seq;
  int bw_folds = 10;
  int bw_foldsize = 10;
  std::string tv_method = "weighted";
  int n = 0;
  int burn_in = 100;
  int thin = 10;
  int index = 0;
  int threads = 0;
};

// Thread count never changes results, so it is left out of the echoed
// command to keep outputs byte-identical across thread counts.
std::string reproduction_command(const std::vector<std::string>& args) {
  std::string cmd = kProgram;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0) continue;
    cmd += ' ';
    if (a.find_first_of(" \t\"'") == std::string::npos && !a.empty()) {
      cmd += a;
    } else {
      cmd += '\'';
      for (char c : a) cmd += c == '\'' ? std::string("'\\''") : std::string(1, c);
      cmd += '\'';
    }
  }
  return cmd;
}

void add_io(CLI::App* app, Args& a, bool needs_data) {
  auto* d = app->add_option("--data", a.data, "CSV data file");
  auto* s = app->add_option("--schema", a.schema, "JSON column schema");
  if (needs_data) {
    d->required();
    s->required();
  }
  app->add_option("--out", a.out, "output file")->required();
  app->add_option("--threads", a.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

void add_selection(CLI::App* app, Args& a) {
  app->add_option("--seed", a.seed, "seed for cross-validation folds");
  app->add_option("--lambda-sel", a.lambda_sel, "lambda selection")->check(CLI::IsMember({"cv", "ebic"}));
  app->add_option("--lambda-folds", a.lambda_folds, "cross-validation folds")->check(CLI::PositiveNumber);
  app->add_option("--lambda-gam", a.lambda_gam, "EBIC gamma")->check(CLI::NonNegativeNumber);
  app->add_option("--alpha-seq", a.alpha_seq, "elastic-net alphas")->delimiter(',');
  app->add_option("--threshold", a.threshold, "post-fit threshold")->check(CLI::IsMember({"lw", "none"}));
  app->add_flag("--overparameterize", a.overparameterize, "one indicator per category");
  app->add_flag("--binary-sign", a.binary_sign, "signs for edges involving binary variables");
}

void add_mgm(CLI::App* app, Args& a) {
  app->add_option("--k", a.k, "order of the largest interaction")->check(CLI::PositiveNumber);
  app->add_option("--rule-reg", a.rule, "combination rule")->check(CLI::IsMember({"and", "or"}));
}

void add_lags(CLI::App* app, Args& a) {
  app->add_option("--lags", a.lags, "lag set")->delimiter(',');
}

void add_tv(CLI::App* app, Args& a) {
  app->add_option("--bandwidth", a.bandwidth, "kernel bandwidth on [0,1] time")->required()->check(
      CLI::PositiveNumber);
  app->add_option("--estpoints", a.estpoints, "count or comma list of estimation points");
}

SelectionSpec selection(const Args& a) {
  SelectionSpec s;
  s.method = a.lambda_sel == "cv" ? LambdaSelection::cv : LambdaSelection::ebic;
  s.folds = a.lambda_folds;
  s.gamma = a.lambda_gam;
  s.alpha_seq = a.alpha_seq;
  s.threshold = a.threshold == "lw" ? ThresholdMode::lw : ThresholdMode::none;
  s.seed = a.seed;
  return s;
}

MgmOptions mgm_options(const Args& a) {
  MgmOptions o;
  o.k = a.k;
  o.rule = a.rule == "and" ? CombineRule::and_rule : CombineRule::or_rule;
  o.overparameterize = a.overparameterize;
  o.binary_sign = a.binary_sign;
  o.selection = selection(a);
  o.threads = a.threads;
  return o;
}

MvarOptions mvar_options(const Args& a) {
  MvarOptions o;
  o.overparameterize = a.overparameterize;
  o.binary_sign = a.binary_sign;
  o.selection = selection(a);
  o.threads = a.threads;
  return o;
}

// A single integer is a count of equally spaced points; anything else is a
// comma separated list of positions.
std::vector<double> estpoints(const std::string& text, const Dataset& data) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != item.size()) throw CLI::ValidationError("--estpoints", "not a number: '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw CLI::ValidationError("--estpoints", "empty");
  const bool count = values.size() == 1 && text.find('.') == std::string::npos && values[0] >= 1;
  if (count) return equally_spaced_estpoints(static_cast<int>(values[0]));
  return normalize_estpoints(values, data);
}

std::map<std::string, std::string> metadata(const Args& a, const std::string& command) {
  return {{"command", command}, {"seed", std::to_string(a.seed)}};
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

Schema schema_for(const ModelDocument& doc, const std::vector<VariableSpec>& specs) {
  Schema s;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    ColumnSchema c{j < doc.names.size() ? doc.names[j] : "x" + std::to_string(j), specs[j], {}};
    for (int k = 0; c.spec.categorical() && k < c.spec.levels; ++k) c.codes.push_back(k);
    s.variables.push_back(std::move(c));
  }
  return s;
}

std::string default_path(const std::string& out, const std::string& suffix) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of("/\\");
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + suffix;
}

int run_sample(const Args& a, const std::string& command, std::ostream& out) {
  const ModelDocument doc = model_from_json(read_text(a.model));
  Dataset data;
  std::vector<VariableSpec> specs;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FactorModel>) {
          data = sample_mgm(m, a.n, a.seed, {a.burn_in, a.thin});
          specs = m.specs;
        } else if constexpr (std::is_same_v<T, MvarModel>) {
          data = sample_mvar(m, a.n, a.seed);
          specs = m.specs;
        } else if constexpr (std::is_same_v<T, std::vector<FactorModel>>) {
          data = sample_tvmgm(m, a.n > 0 ? a.n : static_cast<int>(m.size()), a.seed, {a.burn_in, a.thin});
          specs = m.front().specs;
        } else {
          data = sample_tvmvar(m, a.n > 0 ? a.n : static_cast<int>(m.size()), a.seed);
          specs = m.front().specs;
        }
      },
      doc.model);
  const Schema schema = schema_for(doc, specs);
  const std::string schema_path = a.schema_out.empty() ? default_path(a.out, ".schema.json") : a.schema_out;
  write_text(a.out, dataset_to_csv(data, schema));
  write_text(schema_path, schema_to_json(schema, {{"command", command}}));
  out << "wrote " << data.n() << " rows to " << a.out << " and schema to " << schema_path << "\n";
  return kExitOk;
}

int run_predict(const Args& a, const std::string& command, std::ostream& out) {
  const AnyFit fit = load_fit(a.model);
  const LoadedData loaded = load_dataset(a.data, a.schema);
  const TvMethod method = a.tv_method == "closest" ? TvMethod::closest : TvMethod::weighted;
  const PredictionResult r = std::visit(
      [&](const auto& f) -> PredictionResult {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MgmFit> || std::is_same_v<T, MvarFit>) {
          return predict(f, loaded.data);
        } else {
          return predict(f, loaded.data, method);
        }
      },
      fit);
  const std::string errors_path = a.errors_out.empty() ? default_path(a.out, ".errors.csv") : a.errors_out;
  write_text(a.out, predictions_to_csv(r, loaded.schema));
  write_text(errors_path, errors_to_csv(r, loaded.schema));
  out << errors_to_csv(r, loaded.schema);
  out << "command: " << command << "\n";
  return kExitOk;
}

int run_bwselect(const Args& a, std::ostream& out) {
  const LoadedData loaded = load_dataset(a.data, a.schema);
  BwSelectOptions o;
  o.type = a.type == "mvar" ? ModelType::mvar : ModelType::mgm;
  o.bw_seq = a.bw_seq;
  o.folds = a.bw_folds;
  o.foldsize = a.bw_foldsize;
  o.mgm = mgm_options(a);
  o.mvar = mvar_options(a);
  o.lags = a.lags;
  const BwSelectResult r = bw_select(loaded.data, o);
  CsvTable t;
  t.header = {"bandwidth", "error", "selected"};
  for (std::size_t i = 0; i < r.bandwidths.size(); ++i) {
    t.rows.push_back({format_double(r.bandwidths[i]), format_double(r.errors[i]),
                      r.bandwidths[i] == r.selected ? "1" : "0"});
  }
  write_text(a.out, to_csv(t));
  out << "selected bandwidth " << format_double(r.selected) << "\n";
  return kExitOk;
}

int run_export(const Args& a, std::ostream& out) {
  const AnyFit fit = load_fit(a.model);
  const std::string csv = std::visit(
      [&](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MgmFit> || std::is_same_v<T, MvarFit>) {
          return graph_to_csv(f);
        } else {
          if (a.index < 0 || a.index >= static_cast<int>(f.fits.size())) {
            throw DataError("--index outside the estimation points");
          }
          return graph_to_csv(f.fits[static_cast<std::size_t>(a.index)]);
        }
      },
      fit);
  write_text(a.out, csv);
  out << "wrote edge list to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"Mixed graphical and mixed VAR models"};
  app.name(kProgram);
  app.require_subcommand(1);

  auto* fit_mgm_cmd = app.add_subcommand("fit-mgm", "fit a k-order MGM");
  add_io(fit_mgm_cmd, a, true);
  add_selection(fit_mgm_cmd, a);
  add_mgm(fit_mgm_cmd, a);

  auto* fit_mvar_cmd = app.add_subcommand("fit-mvar", "fit a mixed VAR model");
  add_io(fit_mvar_cmd, a, true);
  add_selection(fit_mvar_cmd, a);
  add_lags(fit_mvar_cmd, a);

  auto* fit_tvmgm_cmd = app.add_subcommand("fit-tvmgm", "fit a time-varying MGM");
  add_io(fit_tvmgm_cmd, a, true);
  add_selection(fit_tvmgm_cmd, a);
  add_mgm(fit_tvmgm_cmd, a);
  add_tv(fit_tvmgm_cmd, a);

  auto* fit_tvmvar_cmd = app.add_subcommand("fit-tvmvar", "fit a time-varying mixed VAR model");
  add_io(fit_tvmvar_cmd, a, true);
  add_selection(fit_tvmvar_cmd, a);
  add_lags(fit_tvmvar_cmd, a);
  add_tv(fit_tvmvar_cmd, a);

  auto* sample_cmd = app.add_subcommand("sample", "draw data from a model specification");
  sample_cmd->add_option("--model", a.model, "JSON model specification")->required();
  sample_cmd->add_option("--out", a.out, "output CSV")->required();
  sample_cmd->add_option("--schema", a.schema_out, "output schema (default: <out>.schema.json)");
  sample_cmd->add_option("--n", a.n, "rows to draw (tv models default to one per model)");
  sample_cmd->add_option("--seed", a.seed, "random seed");
  sample_cmd->add_option("--burn-in", a.burn_in, "Gibbs sweeps before the first row")->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--thin", a.thin, "Gibbs sweeps between rows")->check(CLI::PositiveNumber);

  auto* predict_cmd = app.add_subcommand("predict", "predict every node from a saved fit");
  predict_cmd->add_option("--model", a.model, "saved fit")->required();
  add_io(predict_cmd, a, true);
  predict_cmd->add_option("--errors", a.errors_out, "error table (default: <out>.errors.csv)");
  predict_cmd->add_option("--tv-method", a.tv_method, "time-varying prediction")->check(
      CLI::IsMember({"weighted", "closest"}));

  auto* bw_cmd = app.add_subcommand("bwselect", "select a bandwidth by time-stratified cross-validation");
  add_io(bw_cmd, a, true);
  add_selection(bw_cmd, a);
  add_mgm(bw_cmd, a);
  add_lags(bw_cmd, a);
  bw_cmd->add_option("--type", a.type, "model class")->check(CLI::IsMember({"mgm", "mvar"}));
  bw_cmd->add_option("--bw-seq", a.bw_seq, "candidate bandwidths")->delimiter(',')->required();
  bw_cmd->add_option("--bw-folds", a.bw_folds, "folds")->check(CLI::PositiveNumber);
  bw_cmd->add_option("--bw-foldsize", a.bw_foldsize, "test points per fold")->check(CLI::PositiveNumber);

  auto* export_cmd = app.add_subcommand("export-graph", "write the edge list of a saved fit");
  export_cmd->add_option("--model", a.model, "saved fit")->required();
  export_cmd->add_option("--out", a.out, "output CSV")->required();
  export_cmd->add_option("--index", a.index, "estimation point of a time-varying fit");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = reproduction_command(args);
  try {
    if (*sample_cmd) return run_sample(a, command, out);
    if (*predict_cmd) return run_predict(a, command, out);
    if (*bw_cmd) return run_bwselect(a, out);
    if (*export_cmd) return run_export(a, out);

    const LoadedData loaded = load_dataset(a.data, a.schema);
    const Dataset& data = loaded.data;
    if (a.binary_sign) require_binary_01(loaded.schema);
    AnyFit fit;
    std::vector<std::string> warnings;
    if (*fit_mgm_cmd) {
      MgmFit f = fit_mgm(data, mgm_options(a));
      warnings = f.warnings;
      fit = std::move(f);
    } else if (*fit_mvar_cmd) {
      MvarFit f = fit_mvar(data, a.lags, mvar_options(a));
      warnings = f.warnings;
      fit = std::move(f);
    } else if (*fit_tvmgm_cmd) {
      TvMgmFit f = fit_tvmgm(data, mgm_options(a), estpoints(a.estpoints, data), a.bandwidth);
      warnings = f.warnings;
      fit = std::move(f);
    } else {
      TvMvarFit f = fit_tvmvar(data, a.lags, mvar_options(a), estpoints(a.estpoints, data), a.bandwidth);
      warnings = f.warnings;
      fit = std::move(f);
    }
    save_fit(a.out, fit, metadata(a, command));
    report_warnings(warnings, err);
    out << "command: " << command << "\n";
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace mgm::cli
