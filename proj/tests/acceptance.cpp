// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Arguments select a subset (e.g. "4 5").

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mgm/design.hpp"
#include "mgm/glm.hpp"
#include "mgm/io.hpp"
#include "mgm/mgm.hpp"
#include "mgm/mvar.hpp"
#include "mgm/prediction.hpp"
#include "mgm/samplers.hpp"
#include "mgm/selection.hpp"
#include "mgm/timevarying.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace mgm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

GlmProblem random_problem(Family family, int n, int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::normal_distribution<double> z;
  GlmProblem pr;
  pr.family = family;
  pr.x = test::gaussian_matrix(n, q, rng);
  pr.weights.resize(n);
  for (int i = 0; i < n; ++i) pr.weights[i] = u(rng);
  Eigen::VectorXd b(q);
  for (int j = 0; j < q; ++j) b[j] = (j < 3 ? 0.6 : 0.0) * (j % 2 ? -1.0 : 1.0);
  const Eigen::VectorXd eta = pr.x * b;
  pr.y.resize(n);
  if (family == Family::gaussian) {
    for (int i = 0; i < n; ++i) pr.y[i] = 1.0 + eta[i] + z(rng);
  } else if (family == Family::poisson) {
    for (int i = 0; i < n; ++i) pr.y[i] = std::poisson_distribution<int>(std::exp(0.3 + 0.5 * eta[i]))(rng);
  } else {
    pr.classes = 3;
    for (int i = 0; i < n; ++i) {
      const double w[3] = {1.0, std::exp(eta[i]), std::exp(-eta[i] + 0.5 * pr.x(i, q - 1))};
      pr.y[i] = std::discrete_distribution<int>(w, w + 3)(rng);
    }
  }
  return pr;
}

// Weighted least squares with intercept on the raw columns.
Eigen::VectorXd wls(const GlmProblem& pr) {
  Eigen::MatrixXd xi(pr.x.rows(), pr.x.cols() + 1);
  xi << Eigen::VectorXd::Ones(pr.x.rows()), pr.x;
  const Eigen::MatrixXd xtw = xi.transpose() * pr.weights.asDiagonal();
  return (xtw * xi).ldlt().solve(xtw * pr.y);
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  std::vector<GlmProblem> problems;
  for (int r = 0; r < 50; ++r) problems.push_back(random_problem(Family::gaussian, 100, 5, rng));
  double worst = 0.0;
  const Stopwatch sw;
  std::vector<GlmSolution> fits;
  for (const auto& pr : problems) fits.push_back(fit_glm(pr, 0.0));
  const double secs = sw.seconds();
  for (std::size_t r = 0; r < problems.size(); ++r) {
    const Eigen::VectorXd ref = wls(problems[r]);
    worst = std::max(worst, std::abs(fits[r].intercept[0] - ref[0]));
    worst = std::max(worst, (fits[r].beta.col(0) - ref.tail(5)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6 && secs < 1.0, "max |diff| " + fmt("%.3g", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int checked = 0;
  int unconverged = 0;
  for (Family fam : {Family::gaussian, Family::multinomial, Family::poisson}) {
    for (int r = 0; r < 5; ++r) {
      const GlmProblem pr = random_problem(fam, 200, 10, rng);
      const auto lambdas = lambda_path(pr, 20);
      for (const auto& s : fit_path(pr, lambdas)) {
        if (!s.converged) {
          ++unconverged;
          continue;
        }
        worst = std::max(worst, kkt_residual(s, pr));
        ++checked;
      }
    }
  }
  return {checked > 0 && worst <= 1e-4, std::to_string(checked) + " converged fits, " +
                                            std::to_string(unconverged) + " unconverged, max KKT residual " +
                                            fmt("%.3g", worst)};
}

int count_nonzero(const Eigen::MatrixXd& beta) { return static_cast<int>((beta.array() != 0.0).count()); }

Outcome criterion3() {
  std::mt19937_64 rng(303);
  int problems = 0;
  int failures = 0;
  for (Family fam : {Family::gaussian, Family::multinomial, Family::poisson}) {
    for (int r = 0; r < 10; ++r) {
      const GlmProblem pr = random_problem(fam, 150, 8, rng);
      const Eigen::MatrixXd g = nll_gradient(intercept_only(pr), pr).cwiseAbs();
      std::vector<double> v(g.data(), g.data() + g.size());
      std::sort(v.rbegin(), v.rend());
      if (v.size() > 1 && v[0] - v[1] <= 1e-8 * v[0]) continue;  // max not strictly attained
      ++problems;
      const double lmax = lambda_max(pr);
      const int at_max = count_nonzero(fit_glm(pr, lmax).beta);
      const int below = count_nonzero(fit_glm(pr, 0.9 * lmax).beta);
      if (at_max != 0 || below < 1) ++failures;
    }
  }
  return {problems > 0 && failures == 0,
          std::to_string(problems) + " problems, " + std::to_string(failures) + " violations"};
}

Outcome criterion4() {
  int hits = 0;
  const Stopwatch sw;
  for (int r = 0; r < 20; ++r) {
    const Dataset data = sample_mgm(test::example_mgm_model(), 500, 1000 + r);
    MgmOptions o;
    o.k = 2;
    o.rule = CombineRule::and_rule;
    o.selection.method = LambdaSelection::cv;
    o.selection.folds = 10;
    o.selection.seed = r + 1;
    if (test::edge_set(fit_mgm(data, o).wadj) == test::example_mgm_edges()) ++hits;
  }
  const double secs = sw.seconds();
  return {hits >= 18 && secs < 30.0, std::to_string(hits) + "/20 exact recoveries, " + fmt("%.1f", secs) + " s"};
}

Outcome criterion5() {
  int hits = 0;
  int worst_spurious = 0;
  const Stopwatch sw;
  for (int r = 0; r < 20; ++r) {
    const Dataset data = sample_mvar(test::example_mvar_model(), 200, 2000 + r);
    MvarOptions o;
    o.selection.method = LambdaSelection::cv;
    o.selection.folds = 10;
    o.selection.seed = r + 1;
    const auto found = test::directed_set(fit_mvar(data, {1}, o).wadj[0]);
    const auto truth = test::example_mvar_effects();
    int found_true = 0;
    for (const auto& e : truth) found_true += static_cast<int>(found.count(e));
    const int spurious = static_cast<int>(found.size()) - found_true;
    worst_spurious = std::max(worst_spurious, spurious);
    if (found_true == 3 && spurious <= 5) ++hits;
  }
  const double secs = sw.seconds();
  return {hits >= 16 && secs < 30.0, std::to_string(hits) + "/20 recoveries, max spurious " +
                                         std::to_string(worst_spurious) + ", " + fmt("%.1f", secs) + " s"};
}

FactorModel random_binary_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FactorModel m;
  m.specs.assign(3, VariableSpec::categorical(2));
  m.thresholds.assign(3, {0.0, 0.0});
  m.sds.assign(3, 1.0);
  const std::vector<std::vector<int>> tuples{{0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  for (const auto& t : tuples) {
    NdArray a(std::vector<int>(t.size(), 2));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = u(rng);
    m.factors.push_back({t, a});
  }
  return m;
}

Outcome criterion6() {
  double worst = 0.0;
  for (int seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(600 + seed);
    const FactorModel m = random_binary_model(rng);
    const JointTable exact = exact_joint_small(m);
    const int n = 50000;
    const Dataset d = sample_mgm(m, n, seed);
    std::vector<double> freq(8, 0.0);
    for (int i = 0; i < n; ++i) {
      const int cell = static_cast<int>(d.values(i, 0)) * 4 + static_cast<int>(d.values(i, 1)) * 2 +
                       static_cast<int>(d.values(i, 2));
      freq[cell] += 1.0 / n;
    }
    double tv = 0.0;
    for (int c = 0; c < 8; ++c) tv += 0.5 * std::abs(freq[c] - exact.probabilities[c]);
    worst = std::max(worst, tv);
  }
  return {worst < 0.02, "max total variation " + fmt("%.4f", worst) + " over 10 seeds"};
}

Outcome criterion7() {
  std::vector<double> pos(101);
  for (int i = 0; i <= 100; ++i) pos[i] = i / 100.0;
  bool ok = true;
  std::string why;
  for (double te : {0.25, 0.5, 0.73}) {
    if (std::abs(kernel_weights(pos, te, 0.1).weights.maxCoeff() - 1.0) > 1e-12) {
      ok = false;
      why += " max weight != 1 at " + fmt("%g", te) + ";";
    }
  }
  double last = 0.0;
  for (double s : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 10.0}) {
    const double ln = kernel_weights(pos, 0.5, s).local_n;
    if (ln <= last) {
      ok = false;
      why += " local_n not increasing at sigma " + fmt("%g", s) + ";";
    }
    last = ln;
  }
  for (double te : {0.0, 0.3, 0.5, 1.0}) {
    const Eigen::VectorXd w = kernel_weights(pos, te, 10.0).weights;
    if (w.maxCoeff() - w.minCoeff() >= 0.01) {
      ok = false;
      why += " spread at sigma 10;";
    }
  }
  for (int n : {20, 101}) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / (n - 1);
    for (double s : {0.05, 0.1, 0.2, 0.5}) {
      if (kernel_weights(grid, 0.0, s).local_n >= kernel_weights(grid, 0.5, s).local_n ||
          kernel_weights(grid, 1.0, s).local_n >= kernel_weights(grid, 0.5, s).local_n) {
        ok = false;
        why += " boundary local_n not below interior;";
      }
    }
  }
  return {ok, ok ? "all kernel properties hold" : why};
}

Outcome criterion8() {
  const std::vector<double> est = equally_spaced_estpoints(5);
  double worst_mgm = 0.0;
  {
    const Dataset data = sample_mgm(test::example_mgm_model(), 500, 81);
    MgmOptions o;
    const MgmFit stat = fit_mgm(data, o);
    const TvMgmFit tv = fit_tvmgm(data, o, est, 2.0);
    for (const auto& f : tv.fits) worst_mgm = std::max(worst_mgm, (f.wadj - stat.wadj).cwiseAbs().maxCoeff());
  }
  double worst_mvar = 0.0;
  {
    const Dataset data = sample_mvar(test::example_mvar_model(), 200, 82);
    MvarOptions o;
    const MvarFit stat = fit_mvar(data, {1}, o);
    const TvMvarFit tv = fit_tvmvar(data, {1}, o, est, 2.0);
    for (const auto& f : tv.fits)
      worst_mvar = std::max(worst_mvar, (f.wadj[0] - stat.wadj[0]).cwiseAbs().maxCoeff());
  }
  return {worst_mgm <= 0.05 && worst_mvar <= 0.05,
          "max |tv - stationary| mgm " + fmt("%.4f", worst_mgm) + ", mvar " + fmt("%.4f", worst_mvar)};
}

// Two gaussian series; x0 <- x1 at lag 1 drifts linearly from 0 to `end`.
std::vector<MvarModel> drifting_var(int n, double start, double end, double ar) {
  std::vector<MvarModel> models;
  for (int t = 0; t < n; ++t) {
    MvarModel m;
    m.specs.assign(2, VariableSpec::gaussian());
    m.coefficients = MvarCoefficients(2, 1, {1});
    m.coefficients.at(0, 0, 0, 0, 0) = ar;
    m.coefficients.at(1, 1, 0, 0, 0) = ar;
    m.coefficients.at(0, 1, 0, 0, 0) = start + (end - start) * t / (n - 1);
    m.thresholds.assign(2, {0.0});
    m.sds.assign(2, 1.0);
    models.push_back(m);
  }
  return models;
}

Outcome criterion9() {
  const int n = 500;
  const std::vector<double> est = equally_spaced_estpoints(20);
  std::vector<double> truth;
  for (double e : est) truth.push_back(0.4 * e);
  int hits = 0;
  double worst = 1.0;
  const auto models = drifting_var(n, 0.0, 0.4, 0.3);
  for (int r = 0; r < 20; ++r) {
    const Dataset data = sample_tvmvar(models, n, 900 + r);
    MvarOptions o;
    o.selection.seed = r + 1;
    const TvMvarFit tv = fit_tvmvar(data, {1}, o, est, 0.2);
    std::vector<double> path;
    for (const auto& f : tv.fits) path.push_back(f.wadj[0](0, 1));
    const double rho = test::rank_correlation(path, truth);
    worst = std::min(worst, rho);
    if (rho > 0.8) ++hits;
  }
  return {hits >= 16, std::to_string(hits) + "/20 with rank correlation > 0.8, min " + fmt("%.3f", worst)};
}

Outcome criterion10() {
  const int n = 300;
  const std::vector<double> grid{0.01, 0.03, 0.1, 0.3, 1.0};
  BwSelectOptions o;
  o.type = ModelType::mvar;
  o.bw_seq = grid;
  o.folds = 5;
  o.foldsize = 5;
  o.lags = {1};
  int interior = 0;
  int largest = 0;
  const int runs = 10;
  const auto drifting = drifting_var(n, -0.8, 0.8, 0.3);
  const auto stationary = drifting_var(n, 0.3, 0.3, 0.3);
  for (int r = 0; r < runs; ++r) {
    o.mvar.selection.seed = r + 1;
    const BwSelectResult d = bw_select(sample_tvmvar(drifting, n, 1100 + r), o);
    const auto best = std::min_element(d.errors.begin(), d.errors.end()) - d.errors.begin();
    if (best > 0 && best + 1 < static_cast<long>(grid.size())) ++interior;
    const BwSelectResult s = bw_select(sample_tvmvar(stationary, n, 1200 + r), o);
    if (s.selected >= grid[grid.size() - 2]) ++largest;
  }
  return {interior * 10 >= runs * 8 && largest * 10 >= runs * 8,
          "drifting: interior minimum in " + std::to_string(interior) + "/" + std::to_string(runs) +
              ", stationary: largest or next in " + std::to_string(largest) + "/" + std::to_string(runs)};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

Outcome criterion11() {
  bool ok = true;
  const Eigen::VectorXd truth = vec({0, 0, 0, 1});
  ok &= metric_cc(truth, vec({0, 0, 1, 1})) == 0.75 && metric_ncc(truth, vec({0, 0, 1, 1})) == 0.0;
  ok &= metric_cc(truth, truth) == 1.0 && metric_ncc(truth, truth) == 1.0;
  ok &= metric_ncc(truth, vec({1, 1, 0, 1})) == 0.0 && metric_ncc_raw(truth, vec({1, 1, 0, 1})) < 0.0;
  const double expected = 200.0 + 3.0 * std::log(100.0) + 1.5 * std::log(10.0);
  const double got = ebic(-100.0, 3, 100.0, 10, 0.25);
  ok &= std::abs(got - expected) <= 1e-9 && std::abs(got - 217.269) < 1e-3;
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> ll(-1000.0, 0.0);
  std::uniform_int_distribution<int> s0(0, 50);
  std::uniform_real_distribution<double> neff(10.0, 5000.0);
  std::uniform_int_distribution<int> pm(2, 200);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double l = ll(rng);
    const int s = s0(rng);
    const double ne = neff(rng);
    const double bic = -2.0 * l + s * std::log(ne);
    worst = std::max(worst, std::abs(ebic(l, s, ne, pm(rng), 0.0) - bic));
  }
  ok &= worst <= 1e-9;
  return {ok, "EBIC example " + fmt("%.6f", got) + ", max |EBIC(0) - BIC| " + fmt("%.3g", worst)};
}

Outcome criterion12() {
  auto count = [](const std::vector<int>& consec) {
    const auto u = usable_rows(static_cast<int>(consec.size()), consec, {1});
    return static_cast<int>(std::count(u.begin(), u.end(), true));
  };
  const int beeps = count({3, 4, 9, 10, 2, 4, 6, 8, 1, 2});
  const int days = count({1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6});
  return {beeps == 3 && days == 10,
          "beep example " + std::to_string(beeps) + " rows, two-day example " + std::to_string(days) + " rows"};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

// Runs sample -> fit-mgm -> predict inside `dir` and returns the outputs.
std::vector<std::string> pipeline(const fs::path& dir, int threads) {
  fs::create_directories(dir);
  const fs::path previous = fs::current_path();
  fs::current_path(dir);
  write_text("model.json", model_to_json({test::example_mgm_model(), {"g1", "c2", "c4", "g4"}}));
  std::vector<std::string> outputs;
  const std::string t = std::to_string(threads);
  const bool ok =
      cli({"sample", "--model", "model.json", "--out", "data.csv", "--n", "300", "--seed", "7"}) == 0 &&
      cli({"fit-mgm", "--data", "data.csv", "--schema", "data.schema.json", "--out", "fit.json", "--seed", "3",
           "--threads", t}) == 0 &&
      cli({"predict", "--model", "fit.json", "--data", "data.csv", "--schema", "data.schema.json", "--out",
           "pred.csv", "--threads", t}) == 0;
  if (ok) {
    for (const char* f : {"data.csv", "data.schema.json", "fit.json", "pred.csv", "pred.errors.csv"})
      outputs.push_back(read_text(f));
  }
  fs::current_path(previous);
  return outputs;
}

Outcome criterion13() {
  const fs::path root = fs::temp_directory_path() / "mgm_acceptance_determinism";
  fs::remove_all(root);
  const auto a = pipeline(root / "run1", 1);
  const auto b = pipeline(root / "run2", 1);
  const auto c = pipeline(root / "run3", 8);
  fs::remove_all(root);
  if (a.empty() || b.empty() || c.empty()) return {false, "pipeline failed"};
  const bool same = a == b && a == c;
  return {same, same ? "5 output files byte-identical across runs and thread counts 1 and 8"
                     : "outputs differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6, criterion7,
      criterion8, criterion9, criterion10, criterion11, criterion12, criterion13};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
  }
  return all ? 0 : 1;
}
