// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdosr/normal_wishart.hpp"

namespace cdosr {

// Rows are instances.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  // Original label tokens when the input used non-integer labels; label i
  // then stands for label_names[i].
  std::vector<std::string> label_names;

  std::size_t size() const { return labels.size(); }
  int dim() const { return static_cast<int>(features.cols()); }
  // Sorted distinct labels.
  std::vector<int> classes() const;
  std::vector<std::size_t> rows_of_class(int label) const;
  LabeledDataset subset(const std::vector<std::size_t>& rows) const;
};

// Thrown for unreadable or malformed dataset files.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One instance per line: a class label followed by real features separated
// by commas, semicolons, tabs or spaces. Integer labels are kept as is;
// any other label tokens are mapped to 0..L-1 in sorted order. Blank lines
// and lines starting with '#' are skipped.
LabeledDataset parse_dense(std::istream& in);

// Sparse rows: "label index:value index:value ...", 1-based indices. The
// dimension is the largest index seen.
LabeledDataset parse_sparse(std::istream& in);

// Picks the sparse parser when the first data line contains ':'.
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace cdosr
