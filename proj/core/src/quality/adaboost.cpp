// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/quality/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <numeric>

#include "copygen/error.hpp"

namespace copygen::quality {

namespace {

// Smoothing for the weight of a zero-error stump.
constexpr double kPerfectEpsilon = 1e-10;

struct Split {
  Stump stump;
  double error = 1.0;
};

// Best stump over every feature, threshold (below the minimum and between
// consecutive distinct values) and polarity. Ties keep the first found.
Split best_stump(std::span<const FeatureVector> x, std::span<const int> y, const std::vector<double>& w) {
  const std::size_t n = x.size(), d = x[0].size();
  double total_pos = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (y[i] > 0) total_pos += w[i];
  const double total = std::accumulate(w.begin(), w.end(), 0.0);

  Split best;
  std::vector<std::size_t> order(n);
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a][f] < x[b][f]; });
    // Walk thresholds upward; samples at or below go to the negative side.
    double pos_below = 0.0, neg_below = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      if (k > 0) {
        const auto i = order[k - 1];
        (y[i] > 0 ? pos_below : neg_below) += w[i];
      }
      if (k == n) break;
      if (k > 0 && x[order[k]][f] == x[order[k - 1]][f]) continue;
      const double thr = k == 0 ? x[order[0]][f] - 1.0 : 0.5 * (x[order[k - 1]][f] + x[order[k]][f]);
      // polarity +1: above -> +1, so errors are positives below + negatives above.
      const double neg_above = (total - total_pos) - neg_below;
      const double err_plus = pos_below + neg_above;
      const double err_minus = total - err_plus;
      if (err_plus < best.error) best = {{f, thr, 1, 0.0}, err_plus};
      if (err_minus < best.error) best = {{f, thr, -1, 0.0}, err_minus};
    }
  }
  return best;
}

}  // namespace

double StumpEnsemble::margin(const FeatureVector& x) const {
  double m = 0.0;
  for (const auto& s : stumps) m += s.alpha * s.predict(x);
  return m;
}

double StumpEnsemble::error_bound(std::size_t t) const {
  double b = 1.0;
  for (std::size_t i = 0; i < std::min(t, round_errors.size()); ++i)
    b *= 2.0 * std::sqrt(round_errors[i] * (1.0 - round_errors[i]));
  return b;
}

double training_error(const StumpEnsemble& e, std::span<const FeatureVector> x, std::span<const int> y) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (e.predict(x[i]) != y[i]) ++wrong;
  return x.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(x.size());
}

StumpEnsemble adaboost_train(std::span<const FeatureVector> x, std::span<const int> y, std::size_t rounds) {
  if (rounds == 0) throw Error("config_error", "AdaBoost needs at least one round");
  if (x.empty() || x.size() != y.size()) throw Error("config_error", "samples and labels must be nonempty and aligned");
  const std::size_t d = x[0].size();
  if (d == 0) throw Error("config_error", "empty feature vectors");
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw Error("config_error", "ragged feature vectors");
    if (y[i] == 1) pos = true;
    else if (y[i] == -1) neg = true;
    else throw Error("config_error", "labels must be +1 or -1");
  }
  if (!pos || !neg) throw Error("single_class", "training data contains one class only");

  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  StumpEnsemble e;
  for (std::size_t t = 0; t < rounds; ++t) {
    e.rounds = t + 1;
    auto split = best_stump(x, y, w);
    const double eps = std::clamp(split.error, 0.0, 1.0);
    if (eps >= 0.5) break;
    const bool perfect = eps <= 0.0;
    const double eps_used = perfect ? kPerfectEpsilon : eps;
    split.stump.alpha = 0.5 * std::log((1.0 - eps_used) / eps_used);
    e.stumps.push_back(split.stump);
    e.round_errors.push_back(eps);

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-split.stump.alpha * y[i] * split.stump.predict(x[i]));
      z += w[i];
    }
    for (auto& wi : w) wi /= z;
    e.weight_sums.push_back(std::accumulate(w.begin(), w.end(), 0.0));
    e.training_errors.push_back(training_error(e, x, y));
    if (perfect) break;
  }
  return e;
}

void save_ensemble(const StumpEnsemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  out << "stumps " << ensemble.stumps.size() << '\n';
  char line[160];
  for (std::size_t t = 0; t < ensemble.stumps.size(); ++t) {
    const auto& s = ensemble.stumps[t];
    const double eps = t < ensemble.round_errors.size() ? ensemble.round_errors[t] : 0.0;
    std::snprintf(line, sizeof line, "%zu %.17g %d %.17g %.17g\n", s.feature, s.threshold, s.polarity, s.alpha, eps);
    out << line;
  }
  if (!out) throw Error("io_error", "cannot write " + path.string());
}

StumpEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot read " + path.string());
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "stumps") throw Error("format_error", "not a stump ensemble: " + path.string());
  StumpEnsemble e;
  for (std::size_t t = 0; t < n; ++t) {
    Stump s;
    double eps = 0.0;
    if (!(in >> s.feature >> s.threshold >> s.polarity >> s.alpha >> eps) || (s.polarity != 1 && s.polarity != -1))
      throw Error("format_error", "bad stump line in " + path.string());
    e.stumps.push_back(s);
    e.round_errors.push_back(eps);
  }
  e.rounds = n;
  return e;
}

}  // namespace copygen::quality
