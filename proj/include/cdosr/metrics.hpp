// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace cdosr {

// 1 - sqrt(2 * training / (testing + target)). Throws std::invalid_argument
// when a count is < 1 or the ratio exceeds 1.
double openness(int n_training_classes, int n_target_classes, int n_testing_classes);

struct MicroF {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Micro-averaged F over the known classes. `predicted[i]` empty means the
// point was rejected as unknown. A known point predicted unknown or as
// another class is an FN for its class; a prediction of known class c on a
// point not of class c is an FP for c. Precision or recall with a zero
// denominator is 0. Throws std::invalid_argument on empty or misaligned input.
MicroF micro_f(std::span<const std::optional<int>> predicted,
               std::span<const int> truth, const std::set<int>& known);

struct MetricsRow {
  std::string series;   // "closed"/"open" for the epsilon study, else empty
  double x = 0.0;       // openness, batch fraction or epsilon
  double openness = 0.0;
  std::vector<MicroF> runs;
  double mean_f = 0.0;
  double std_f = 0.0;   // sample standard deviation; 0 for one run
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  std::uint64_t seed = 0;

  int repeats() const { return static_cast<int>(runs.size()); }
};

// Fills the mean and deviation fields from `runs`.
void summarize(MetricsRow& row);

}  // namespace cdosr
