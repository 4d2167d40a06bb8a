// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cdosr {

double openness(int n_training_classes, int n_target_classes, int n_testing_classes) {
  if (n_training_classes < 1 || n_target_classes < 1 || n_testing_classes < 1)
    throw std::invalid_argument("openness: class counts must be >= 1");
  const double ratio = 2.0 * n_training_classes /
                       static_cast<double>(n_testing_classes + n_target_classes);
  if (ratio > 1.0)
    throw std::invalid_argument("openness: testing + target must be >= 2 * training");
  return 1.0 - std::sqrt(ratio);
}

MicroF micro_f(std::span<const std::optional<int>> predicted,
               std::span<const int> truth, const std::set<int>& known) {
  if (predicted.empty()) throw std::invalid_argument("micro_f: empty input");
  if (predicted.size() != truth.size())
    throw std::invalid_argument("micro_f: prediction and truth sizes differ");
  MicroF m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool truth_known = known.count(truth[i]) > 0;
    const auto& p = predicted[i];
    const bool pred_known = p.has_value() && known.count(*p) > 0;
    if (truth_known && pred_known && *p == truth[i]) {
      ++m.tp;
      continue;
    }
    if (truth_known) ++m.fn;
    if (pred_known) ++m.fp;
  }
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
  const double s = m.precision + m.recall;
  m.f = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
  return m;
}

void summarize(MetricsRow& row) {
  const std::size_t n = row.runs.size();
  row.mean_f = row.std_f = row.mean_precision = row.mean_recall = 0.0;
  if (n == 0) return;
  for (const auto& r : row.runs) {
    row.mean_f += r.f;
    row.mean_precision += r.precision;
    row.mean_recall += r.recall;
  }
  row.mean_f /= n;
  row.mean_precision /= n;
  row.mean_recall /= n;
  if (n > 1) {
    double ss = 0.0;
    for (const auto& r : row.runs) ss += (r.f - row.mean_f) * (r.f - row.mean_f);
    row.std_f = std::sqrt(ss / static_cast<double>(n - 1));
  }
}

}  // namespace cdosr
