#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace mgm {

enum class LambdaSelection { ebic, cv };
enum class ThresholdMode { lw, none };
enum class CombineRule { and_rule, or_rule };

/// How λ (and α) are chosen per node regression, and how the chosen
/// estimates are thresholded afterwards.
struct SelectionSpec {
  LambdaSelection method = LambdaSelection::cv;
  double gamma = 0.25;  // EBIC hyperparameter
  int folds = 10;       // CV folds
  std::vector<double> alpha_seq{1.0};
  ThresholdMode threshold = ThresholdMode::lw;
  std::uint64_t seed = 1;
  int n_lambda = 100;
  std::optional<double> min_ratio;  // default depends on n_eff vs q
};

struct MgmOptions {
  int k = 2;
  CombineRule rule = CombineRule::and_rule;
  bool overparameterize = false;
  bool binary_sign = false;
  SelectionSpec selection;
  int threads = 1;  // 0 = hardware concurrency
};

struct MvarOptions {
  bool overparameterize = false;
  bool binary_sign = false;
  SelectionSpec selection;
  int threads = 1;
};

}  // namespace mgm
