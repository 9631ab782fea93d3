#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grail/types.hpp"

namespace grail {

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Multiclass precision/recall/F1 with the 0/0 -> 0 convention, macro-averaged
/// over the goal classes (micro-averaged scores equal the accuracy for
/// single-label classification, so accuracy doubles as the micro view).
inline ClassificationMetrics classification_metrics(
    std::span<const std::pair<int, int>> pairs, const std::vector<GoalId>& goals) {
  if (pairs.empty()) throw std::invalid_argument("classification_metrics: no pairs");
  std::map<int, int> tp, fp, fn;
  for (const auto& g : goals) tp[g.index] = fp[g.index] = fn[g.index] = 0;

  int correct = 0;
  for (const auto& [truth, pred] : pairs) {
    if (!tp.count(truth) || !tp.count(pred))
      throw std::invalid_argument("classification_metrics: label outside the goal set");
    if (truth == pred) {
      ++tp[truth];
      ++correct;
    } else {
      ++fp[pred];
      ++fn[truth];
    }
  }

  ClassificationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());
  const double k = static_cast<double>(goals.size());
  for (const auto& g : goals) {
    const double p_den = tp[g.index] + fp[g.index];
    const double r_den = tp[g.index] + fn[g.index];
    const double precision = p_den > 0 ? tp[g.index] / p_den : 0.0;
    const double recall = r_den > 0 ? tp[g.index] / r_den : 0.0;
    const double f1 =
        precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.macro_precision += precision / k;
    m.macro_recall += recall / k;
    m.macro_f1 += f1 / k;
  }
  return m;
}

/// Two-sided 95% Student-t quantile (0.975). Tabulated for the degrees of
/// freedom that occur in practice; interpolated in 1/df between anchors.
inline double t_quantile_975(int df) {
  if (df < 1) throw std::invalid_argument("t_quantile_975: df must be >= 1");
  static const double table[30] = {
      12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622, 2.2281,
      2.2010,  2.1788, 2.1604, 2.1448, 2.1314, 2.1199, 2.1098, 2.1009, 2.0930, 2.0860,
      2.0796,  2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484, 2.0452, 2.0423};
  if (df <= 30) return table[df - 1];
  static const std::vector<std::pair<double, double>> anchors = {
      {30, 2.0423}, {40, 2.0211}, {60, 2.0003}, {120, 1.9799}};
  const double z = 1.9600;
  if (df >= 1000000) return z;
  double prev_df = anchors.back().first, prev_t = anchors.back().second;
  for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
    if (df <= anchors[i + 1].first) {
      const auto [d0, t0] = anchors[i];
      const auto [d1, t1] = anchors[i + 1];
      const double w = (1.0 / df - 1.0 / d0) / (1.0 / d1 - 1.0 / d0);
      return t0 + w * (t1 - t0);
    }
  }
  // Beyond df=120 interpolate toward the normal quantile in 1/df.
  const double w = (1.0 / df) / (1.0 / prev_df);
  return z + w * (prev_t - z);
}

struct StatSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1)
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n = 0;
};

/// Mean, sample standard deviation, and a t-based 95% confidence interval.
/// A single value yields a degenerate interval at the mean.
inline StatSummary aggregate_stats(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate_stats: no values");
  StatSummary s;
  s.n = static_cast<int>(values.size());
  for (double v : values) s.mean += v / static_cast<double>(s.n);
  if (s.n == 1) {
    s.ci_low = s.ci_high = s.mean;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  const double half =
      t_quantile_975(s.n - 1) * s.stddev / std::sqrt(static_cast<double>(s.n));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

}  // namespace grail
