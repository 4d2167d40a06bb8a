// Apache License, Version 2.0, refer to LICENSE.txt

// Collective-decision open set recognition. Each known class becomes one
// group and the whole test batch one more group; the groups are
// co-clustered by the HDP sampler. A test point is labeled with the known
// class whose subclass table contains the point's subclass (dish), and as
// an unknown, tagged with that subclass, when no known class holds it.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cdosr/dataset.hpp"
#include "cdosr/grouped_dataset.hpp"
#include "cdosr/hdp_sampler.hpp"

namespace cdosr {

struct HyperConfig {
  HDPConcentrations conc;
  double beta = 1.0;
  // Wishart degrees of freedom as an offset over the data dimension:
  // nu = d + nu_offset.
  double nu_offset = 8.0;
  // Scaling of the pooled within-class covariance used as the Wishart
  // inverse scale.
  double varsigma = 0.5;
  double epsilon = 0.01;
  int sweeps = 30;
  int init_components = 30;
  std::uint64_t seed = 0;
  SamplerOptions sampler;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

// One group per known class in increasing label order, then the test batch.
// Throws std::invalid_argument on dimension mismatch or no classes.
GroupedDataset build_groups(const LabeledDataset& train, const Matrix& test_rows);

// mu0 is the mean of all known-class points; sigma0 is varsigma times the
// pooled within-class covariance sum_j (n_j - 1) S_j / (n - (J - 1)).
// A singular pooled covariance gets 1e-8 * mean(diag) * I added (1e-8 * I
// when the diagonal is zero) and a warning.
NormalWishartParams pooled_prior(const GroupedDataset& groups, double varsigma,
                                 double nu, double beta);

struct SubclassEntry {
  int subclass = -1;
  int count = 0;
  double proportion = 0.0;
};

struct SubclassTable {
  std::size_t group = 0;
  std::optional<int> label;  // empty for the test group
  int size = 0;
  std::vector<SubclassEntry> entries;  // ascending subclass id

  bool contains(int subclass) const;
  int count_of(int subclass) const;
};

struct SubclassTables {
  double epsilon = 0.0;
  std::vector<SubclassTable> raw;
  // Entries with proportion < epsilon removed.
  std::vector<SubclassTable> pruned;
};

SubclassTables prune_subclasses(const CRFState& state, double epsilon);
// Same from explicit assignments: subclasses[j][i] is the subclass of point
// i in group j; groups past labels.size() are unlabeled.
SubclassTables prune_subclasses(const std::vector<std::vector<int>>& subclasses,
                                const std::vector<int>& labels, double epsilon);
std::vector<std::vector<int>> subclass_assignments(const CRFState& state);

struct Outcome {
  std::optional<int> label;  // known class; empty means unknown
  int subclass = -1;
  bool ambiguous = false;  // subclass held by several known classes

  bool known() const { return label.has_value(); }
};

struct OSRPrediction {
  std::vector<Outcome> outcomes;  // one per test point, input order
  SubclassTables tables;
  int delta = 0;
  int known_subclasses = 0;    // |S_known|, with multiplicity per class
  int unknown_subclasses = 0;  // |S_unknown|
  int ambiguous = 0;
  int final_dishes = 0;
};

// Labels the points of the last group. A subclass held by several known
// pruned tables goes to the class with the most training points on it,
// ties to the lowest label.
OSRPrediction predict(const CRFState& state, const SubclassTables& tables);
// Same with the test-batch subclasses given directly; the last table is the
// test batch.
OSRPrediction predict(const SubclassTables& tables, const std::vector<int>& test_subclasses);

// floor(unknown / (known / n_known_classes) + 0.5); 0 with a warning when
// known is 0.
int estimate_unknown_count(int unknown_subclasses, int known_subclasses,
                           int n_known_classes);
// Counts from pruned tables: unknown subclasses are those in the test table
// and in no known table.
int estimate_unknown_count(const SubclassTables& tables);

struct CoClustering {
  std::shared_ptr<const GroupedDataset> groups;
  NormalWishartParams prior;
  std::optional<CRFState> state;
};

// build_groups, pooled_prior and run_chain seeded with config.seed.
CoClustering co_cluster(const LabeledDataset& train, const Matrix& test_rows,
                        const HyperConfig& config,
                        std::function<void(int, int)> on_sweep = {});

// Pruning, prediction and the unknown-count estimate for one epsilon.
OSRPrediction decide(const CoClustering& clustering, double epsilon);

OSRPrediction recognize(const LabeledDataset& train, const Matrix& test_rows,
                        const HyperConfig& config);

}  // namespace cdosr
