// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace copygen::quality {

using FeatureVector = std::vector<double>;

/// h(x) = polarity if x[feature] > threshold, else -polarity.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double alpha = 0.0;

  int predict(const FeatureVector& x) const { return x[feature] > threshold ? polarity : -polarity; }
};

struct StumpEnsemble {
  std::vector<Stump> stumps;
  std::size_t rounds = 0;
  /// Per accepted round: weighted error, unweighted training error of the
  /// ensemble so far, and the sum of sample weights after renormalising.
  std::vector<double> round_errors;
  std::vector<double> training_errors;
  std::vector<double> weight_sums;

  double margin(const FeatureVector& x) const;
  int predict(const FeatureVector& x) const { return margin(x) >= 0.0 ? 1 : -1; }
  /// prod_t 2 sqrt(eps_t (1 - eps_t)) over the first `t` rounds (all if t
  /// exceeds the round count).
  double error_bound(std::size_t t) const;
  double error_bound() const { return error_bound(stumps.size()); }
};

/// Discrete AdaBoost over decision stumps. Stops early when the best stump
/// has weighted error >= 0.5, or after adding a perfect stump (whose weight
/// uses a smoothed error). Throws single_class unless both labels occur and
/// config_error for T = 0 or ragged input.
StumpEnsemble adaboost_train(std::span<const FeatureVector> samples, std::span<const int> labels, std::size_t rounds);

double training_error(const StumpEnsemble& ensemble, std::span<const FeatureVector> samples,
                      std::span<const int> labels);

/// Plain-text form: a "stumps N" line, then "feature threshold polarity alpha
/// round_error" per stump. Training diagnostics other than round errors are
/// not kept.
void save_ensemble(const StumpEnsemble& ensemble, const std::filesystem::path& path);
StumpEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace copygen::quality
