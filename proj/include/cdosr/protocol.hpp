// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <vector>

#include "cdosr/dataset.hpp"

namespace cdosr {

// Row indices into the source dataset for one randomized experiment.
//
//   train      60% of each known class
//   test       the other 40% of each known class plus every row of every
//              other class
//   fitting    60% of the training rows of each fitting-"known" class
//   closed_set the rest of those rows
//   open_set   closed_set plus all training rows of fitting-"unknown" classes
//   validation closed_set and open_set together
struct SplitPlan {
  std::vector<int> known_classes;    // ascending
  std::vector<int> unknown_classes;  // ascending; classes left out of training
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<int> fitting_known_classes;
  std::vector<int> fitting_unknown_classes;
  std::vector<std::size_t> fitting;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> closed_set;
  std::vector<std::size_t> open_set;
  std::uint64_t seed = 0;
};

// floor(fraction * n + 0.5)
std::size_t rounded_share(std::size_t n, double fraction);

// Number of fitting-"known" classes among omega training classes:
// floor(omega / 2 + 0.5).
int fitting_known_count(int omega);

// Throws std::invalid_argument unless the dataset has more than omega
// classes, omega >= 1, and every class has at least 5 rows.
SplitPlan split_protocol(const LabeledDataset& dataset, int omega, std::uint64_t seed);

}  // namespace cdosr
