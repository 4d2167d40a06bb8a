// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cdosr/log.hpp"

namespace cdosr {

void HyperConfig::validate() const {
  conc.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("HyperConfig: beta must be > 0");
  if (!(nu_offset >= 0.0)) throw std::invalid_argument("HyperConfig: nu must be >= d");
  if (!(varsigma > 0.0)) throw std::invalid_argument("HyperConfig: varsigma must be > 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("HyperConfig: epsilon must lie in [0, 1)");
  if (sweeps < 0) throw std::invalid_argument("HyperConfig: sweeps must be >= 0");
  if (init_components < 1)
    throw std::invalid_argument("HyperConfig: init_components must be >= 1");
}

GroupedDataset build_groups(const LabeledDataset& train, const Matrix& test_rows) {
  const auto classes = train.classes();
  if (classes.empty()) throw std::invalid_argument("build_groups: no training classes");
  if (train.features.rows() != static_cast<Eigen::Index>(train.labels.size()))
    throw std::invalid_argument("build_groups: label count mismatch");
  if (test_rows.rows() > 0 && test_rows.cols() != train.features.cols())
    throw std::invalid_argument("build_groups: test dimension mismatch");

  GroupedDataset g;
  g.dim = train.dim();
  for (int c : classes) {
    auto rows = train.rows_of_class(c);
    Matrix m(g.dim, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      m.col(static_cast<Eigen::Index>(i)) =
          train.features.row(static_cast<Eigen::Index>(rows[i])).transpose();
    g.groups.push_back(std::move(m));
    g.labels.push_back(c);
    g.source_index.push_back(std::move(rows));
  }
  g.groups.push_back(test_rows.transpose());
  std::vector<std::size_t> test_index(static_cast<std::size_t>(test_rows.rows()));
  for (std::size_t i = 0; i < test_index.size(); ++i) test_index[i] = i;
  g.source_index.push_back(std::move(test_index));
  return g;
}

NormalWishartParams pooled_prior(const GroupedDataset& groups, double varsigma,
                                 double nu, double beta) {
  if (!(varsigma > 0.0)) throw std::invalid_argument("pooled_prior: varsigma must be > 0");
  const int d = groups.dim;
  const std::size_t n_classes = groups.num_known();
  GaussianSuffStats all(d);
  Matrix pooled = Matrix::Zero(d, d);
  std::size_t n = 0;
  for (std::size_t j = 0; j < n_classes; ++j) {
    GaussianSuffStats s(d);
    for (Eigen::Index i = 0; i < groups.groups[j].cols(); ++i) s.add(groups.groups[j].col(i));
    pooled += s.centered_scatter();
    all.merge(s);
    n += static_cast<std::size_t>(s.count());
  }
  if (n <= n_classes)
    throw std::invalid_argument("pooled_prior: need more training points than classes");
  pooled /= static_cast<double>(n - n_classes);

  Eigen::LLT<Matrix> llt(pooled);
  bool singular = llt.info() != Eigen::Success;
  if (!singular) {
    const auto diag = llt.matrixLLT().diagonal();
    singular = diag.minCoeff() <= 1e-12 * std::max(diag.maxCoeff(), 1e-300);
  }
  if (singular) {
    const double mean_diag = pooled.diagonal().mean();
    const double jitter = mean_diag > 0.0 ? 1e-8 * mean_diag : 1e-8;
    pooled += jitter * Matrix::Identity(d, d);
    std::ostringstream os;
    os << "pooled covariance is singular; added " << jitter << " * I";
    log_warning(os.str());
  }

  NormalWishartParams p;
  p.mu0 = all.sum() / static_cast<double>(all.count());
  p.beta = beta;
  p.nu = nu;
  p.sigma0 = varsigma * pooled;
  p.validate();
  return p;
}

bool SubclassTable::contains(int subclass) const { return count_of(subclass) > 0; }

int SubclassTable::count_of(int subclass) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), subclass,
                             [](const SubclassEntry& e, int k) { return e.subclass < k; });
  return it != entries.end() && it->subclass == subclass ? it->count : 0;
}

SubclassTables prune_subclasses(const std::vector<std::vector<int>>& subclasses,
                                const std::vector<int>& labels, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("prune_subclasses: epsilon must lie in [0, 1)");
  SubclassTables out;
  out.epsilon = epsilon;
  for (std::size_t j = 0; j < subclasses.size(); ++j) {
    std::map<int, int> counts;
    const std::size_t n = subclasses[j].size();
    for (int k : subclasses[j]) ++counts[k];

    SubclassTable raw;
    raw.group = j;
    if (j < labels.size()) raw.label = labels[j];
    raw.size = static_cast<int>(n);
    for (const auto& [k, c] : counts)
      raw.entries.push_back({k, c, static_cast<double>(c) / static_cast<double>(n)});

    SubclassTable pruned = raw;
    std::erase_if(pruned.entries,
                  [epsilon](const SubclassEntry& e) { return e.proportion < epsilon; });
    out.raw.push_back(std::move(raw));
    out.pruned.push_back(std::move(pruned));
  }
  return out;
}

SubclassTables prune_subclasses(const CRFState& state, double epsilon) {
  return prune_subclasses(subclass_assignments(state), state.data().labels, epsilon);
}

std::vector<std::vector<int>> subclass_assignments(const CRFState& state) {
  const GroupedDataset& data = state.data();
  std::vector<std::vector<int>> out(data.num_groups());
  for (std::size_t j = 0; j < data.num_groups(); ++j)
    for (std::size_t i = 0; i < data.group_size(j); ++i) out[j].push_back(state.dish_of(j, i));
  return out;
}

OSRPrediction predict(const CRFState& state, const SubclassTables& tables) {
  const GroupedDataset& data = state.data();
  if (tables.pruned.size() != data.num_groups() || data.num_groups() != data.num_known() + 1)
    throw std::invalid_argument("predict: tables do not match the grouped data");
  const std::size_t test = data.test_group();
  std::vector<int> test_subclasses;
  for (std::size_t i = 0; i < data.group_size(test); ++i)
    test_subclasses.push_back(state.dish_of(test, i));
  OSRPrediction pred = predict(tables, test_subclasses);
  pred.final_dishes = state.num_dishes();
  return pred;
}

OSRPrediction predict(const SubclassTables& tables, const std::vector<int>& test_subclasses) {
  if (tables.pruned.empty() || tables.raw.size() != tables.pruned.size())
    throw std::invalid_argument("predict: malformed subclass tables");
  const std::size_t n_known = tables.pruned.size() - 1;
  for (std::size_t j = 0; j < n_known; ++j)
    if (!tables.pruned[j].label) throw std::invalid_argument("predict: known table without label");

  OSRPrediction pred;
  pred.tables = tables;
  const std::size_t test = n_known;
  const std::size_t n_test = test_subclasses.size();
  pred.outcomes.reserve(n_test);
  for (std::size_t i = 0; i < n_test; ++i) {
    Outcome o;
    o.subclass = test_subclasses[i];
    int best_count = -1;
    int holders = 0;
    for (std::size_t j = 0; j < n_known; ++j) {
      if (!tables.pruned[j].contains(o.subclass)) continue;
      ++holders;
      const int c = tables.raw[j].count_of(o.subclass);
      if (c > best_count || (c == best_count && *tables.pruned[j].label < *o.label)) {
        best_count = c;
        o.label = tables.pruned[j].label;
      }
    }
    o.ambiguous = holders > 1;
    if (o.ambiguous) ++pred.ambiguous;
    pred.outcomes.push_back(o);
  }
  if (pred.ambiguous > 0) {
    std::ostringstream os;
    os << pred.ambiguous << " test point(s) sit on subclasses shared by several known "
       << "classes; labeled by majority training count";
    log_info(os.str());
  }

  std::set<int> known_set;
  for (std::size_t j = 0; j < n_known; ++j) {
    pred.known_subclasses += static_cast<int>(tables.pruned[j].entries.size());
    for (const auto& e : tables.pruned[j].entries) known_set.insert(e.subclass);
  }
  for (const auto& e : tables.pruned[test].entries)
    if (!known_set.count(e.subclass)) ++pred.unknown_subclasses;
  pred.delta = estimate_unknown_count(pred.unknown_subclasses, pred.known_subclasses,
                                      static_cast<int>(n_known));
  return pred;
}

int estimate_unknown_count(int unknown_subclasses, int known_subclasses,
                           int n_known_classes) {
  if (unknown_subclasses < 0 || known_subclasses < 0 || n_known_classes < 1)
    throw std::invalid_argument("estimate_unknown_count: invalid counts");
  if (unknown_subclasses == 0) return 0;
  if (known_subclasses == 0) {
    log_warning("estimate_unknown_count: no known subclasses; returning 0");
    return 0;
  }
  const double per_class =
      static_cast<double>(known_subclasses) / static_cast<double>(n_known_classes);
  return static_cast<int>(std::floor(unknown_subclasses / per_class + 0.5));
}

int estimate_unknown_count(const SubclassTables& tables) {
  if (tables.pruned.size() < 2)
    throw std::invalid_argument("estimate_unknown_count: need known and test tables");
  const std::size_t n_known = tables.pruned.size() - 1;
  std::set<int> known_set;
  int known = 0;
  for (std::size_t j = 0; j < n_known; ++j) {
    known += static_cast<int>(tables.pruned[j].entries.size());
    for (const auto& e : tables.pruned[j].entries) known_set.insert(e.subclass);
  }
  int unknown = 0;
  for (const auto& e : tables.pruned.back().entries)
    if (!known_set.count(e.subclass)) ++unknown;
  return estimate_unknown_count(unknown, known, static_cast<int>(n_known));
}

CoClustering co_cluster(const LabeledDataset& train, const Matrix& test_rows,
                        const HyperConfig& config, std::function<void(int, int)> on_sweep) {
  config.validate();
  GroupedDataset groups = build_groups(train, test_rows);
  CoClustering out;
  out.prior = pooled_prior(groups, config.varsigma, groups.dim + config.nu_offset,
                           config.beta);

  ChainConfig chain;
  chain.conc = config.conc;
  chain.prior = out.prior;
  chain.init_components = config.init_components;
  chain.sweeps = config.sweeps;
  chain.options = config.sampler;
  chain.on_sweep = std::move(on_sweep);

  const bool empty_test = test_rows.rows() == 0;
  Rng rng(config.seed);
  if (empty_test) {
    // Co-cluster the known classes alone; there is nothing to label.
    GroupedDataset known = groups;
    known.groups.pop_back();
    known.source_index.pop_back();
    out.groups = std::make_shared<const GroupedDataset>(std::move(groups));
    out.state.emplace(run_chain(std::make_shared<const GroupedDataset>(std::move(known)),
                                chain, rng));
    return out;
  }
  out.groups = std::make_shared<const GroupedDataset>(std::move(groups));
  out.state.emplace(run_chain(out.groups, chain, rng));
  return out;
}

OSRPrediction decide(const CoClustering& clustering, double epsilon) {
  if (!clustering.state) throw std::logic_error("decide: no sampler state");
  const CRFState& state = *clustering.state;
  if (state.data().num_groups() == state.data().num_known()) {
    // Known classes only: report their tables with an empty test table.
    SubclassTables tables = prune_subclasses(state, epsilon);
    SubclassTable test;
    test.group = tables.raw.size();
    tables.raw.push_back(test);
    tables.pruned.push_back(test);
    OSRPrediction pred;
    pred.tables = std::move(tables);
    pred.final_dishes = state.num_dishes();
    for (const auto& t : pred.tables.pruned)
      if (t.label) pred.known_subclasses += static_cast<int>(t.entries.size());
    return pred;
  }
  return predict(state, prune_subclasses(state, epsilon));
}

OSRPrediction recognize(const LabeledDataset& train, const Matrix& test_rows,
                        const HyperConfig& config) {
  return decide(co_cluster(train, test_rows, config), config.epsilon);
}

}  // namespace cdosr
