// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <vector>

#include "cdosr/normal_wishart.hpp"

namespace cdosr {

// J groups of d-dimensional points. Groups 0..J-2 hold one known class each
// (label in `labels`); group J-1 is the test batch. Points are stored as
// columns. `source_index[j][i]` is the row the point came from in the
// caller's input.
struct GroupedDataset {
  int dim = 0;
  std::vector<Matrix> groups;
  std::vector<int> labels;
  std::vector<std::vector<std::size_t>> source_index;

  std::size_t num_groups() const { return groups.size(); }
  std::size_t num_known() const { return labels.size(); }
  std::size_t group_size(std::size_t j) const {
    return static_cast<std::size_t>(groups[j].cols());
  }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += static_cast<std::size_t>(g.cols());
    return n;
  }
  std::size_t test_group() const { return groups.size() - 1; }
};

}  // namespace cdosr
