// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace cdosr {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_data_line(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p != std::string::npos && line[p] != '#';
}

double parse_real(const std::string& tok, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DatasetError("line " + std::to_string(line_no) + ": bad feature value '" +
                       tok + "'");
  }
}

bool parse_int(const std::string& tok, int& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

// Maps label tokens to ints; non-integer tokens get dense sorted ids.
void assign_labels(const std::vector<std::string>& tokens, LabeledDataset& ds) {
  ds.labels.resize(tokens.size());
  bool all_int = true;
  for (std::size_t r = 0; r < tokens.size() && all_int; ++r)
    all_int = parse_int(tokens[r], ds.labels[r]);
  if (all_int) return;
  std::map<std::string, int> ids;
  for (const auto& t : tokens) ids.emplace(t, 0);
  int next = 0;
  for (auto& [name, id] : ids) {
    id = next++;
    ds.label_names.push_back(name);
  }
  for (std::size_t r = 0; r < tokens.size(); ++r) ds.labels[r] = ids.at(tokens[r]);
}

}  // namespace

std::vector<int> LabeledDataset::classes() const {
  std::vector<int> c(labels);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

std::vector<std::size_t> LabeledDataset::rows_of_class(int label) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < labels.size(); ++r)
    if (labels[r] == label) rows.push_back(r);
  return rows;
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& rows) const {
  LabeledDataset out;
  out.label_names = label_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(rows[r]));
    out.labels.push_back(labels[rows[r]]);
  }
  return out;
}

LabeledDataset parse_dense(std::istream& in) {
  std::vector<std::string> label_tokens;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_data_line(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() < 2)
      throw DatasetError("line " + std::to_string(line_no) + ": no features");
    if (rows.empty()) dim = fields.size() - 1;
    if (fields.size() - 1 != dim)
      throw DatasetError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(dim) + " features, got " +
                         std::to_string(fields.size() - 1));
    label_tokens.push_back(fields[0]);
    std::vector<double> row(dim);
    for (std::size_t c = 0; c < dim; ++c) row[c] = parse_real(fields[c + 1], line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DatasetError("dataset has no instances");

  LabeledDataset ds;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < dim; ++c)
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  assign_labels(label_tokens, ds);
  return ds;
}

LabeledDataset parse_sparse(std::istream& in) {
  std::vector<std::string> label_tokens;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_data_line(line)) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    label_tokens.push_back(tok);
    std::vector<std::pair<std::size_t, double>> entries;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      int idx = 0;
      if (colon == std::string::npos || !parse_int(tok.substr(0, colon), idx) || idx < 1)
        throw DatasetError("line " + std::to_string(line_no) + ": bad sparse entry '" +
                           tok + "'");
      entries.emplace_back(static_cast<std::size_t>(idx - 1),
                           parse_real(tok.substr(colon + 1), line_no));
      dim = std::max(dim, static_cast<std::size_t>(idx));
    }
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw DatasetError("dataset has no instances");
  if (dim == 0) throw DatasetError("dataset has no features");

  LabeledDataset ds;
  ds.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r])
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
  assign_labels(label_tokens, ds);
  return ds;
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset '" + path.string() + "'");
  std::string line;
  bool sparse = false;
  while (std::getline(in, line)) {
    if (!is_data_line(line)) continue;
    sparse = line.find(':') != std::string::npos;
    break;
  }
  in.clear();
  in.seekg(0);
  return sparse ? parse_sparse(in) : parse_dense(in);
}

}  // namespace cdosr
