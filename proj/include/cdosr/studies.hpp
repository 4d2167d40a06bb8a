// Apache License, Version 2.0, refer to LICENSE.txt

// Experiment drivers: openness sweeps, batch-size and epsilon studies, the
// training-phase grid search, and single discovery runs.
//
// Seeding: repeat r of a study runs as job r with job seed root_seed + r.
// The split of repeat r is drawn from the job seed, so every point of a
// sweep sees the same r-th split; the unknown-class subset, the batch
// subsample and the sampler use independent streams derived from it.
// Jobs are independent and run in parallel under Execution::kParallel with
// results identical to a serial run.

#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cdosr/dataset.hpp"
#include "cdosr/metrics.hpp"
#include "cdosr/protocol.hpp"
#include "cdosr/recognizer.hpp"

namespace cdosr {

struct StudyOptions {
  HyperConfig hyper;
  int omega = 0;  // known training classes
  int repeats = 10;
  std::uint64_t root_seed = 0;
  bool standardize = true;
  double pca_retain = 1.0;  // 1 keeps every dimension and skips PCA
  Execution jobs = Execution::kParallel;

  void validate() const;
};

enum class SeedStream : std::uint64_t { kSplit = 0, kUnknownSubset = 1, kBatch = 2, kChain = 3 };

std::uint64_t job_seed(std::uint64_t root_seed, std::size_t job);
std::uint64_t stream_seed(std::uint64_t job_seed, SeedStream stream);

// Training rows and a test batch ready for recognition, preprocessed with
// statistics from the training rows only.
struct EvalSet {
  LabeledDataset train;
  Matrix test;
  std::vector<int> truth;
  std::set<int> known;
  int n_unknown_classes = 0;
};

// Test batch = held-out rows of the known classes plus all rows of the
// given unknown classes, optionally subsampled to `fraction`.
EvalSet prepare_eval_set(const LabeledDataset& dataset, const std::vector<std::size_t>& train_rows,
                         const std::vector<std::size_t>& test_rows,
                         const std::vector<int>& known_classes,
                         const std::vector<int>& unknown_classes, double fraction,
                         std::uint64_t batch_seed, const StudyOptions& options);

// Runs recognition on an EvalSet and scores it.
MicroF evaluate(const EvalSet& set, const HyperConfig& hyper);

std::vector<MetricsRow> run_openness_sweep(const LabeledDataset& dataset,
                                           const StudyOptions& options,
                                           const std::vector<int>& unknown_counts);

std::vector<MetricsRow> run_batch_size_study(const LabeledDataset& dataset,
                                             const StudyOptions& options,
                                             const std::vector<double>& fractions,
                                             int unknown_count);

// Rows for series "closed" (no unknown classes) then "open".
std::vector<MetricsRow> run_epsilon_study(const LabeledDataset& dataset,
                                          const StudyOptions& options,
                                          const std::vector<double>& eps_grid,
                                          int unknown_count);

struct FitCandidate {
  double nu_offset = 0.0;
  double varsigma = 0.0;
  double closed_f = 0.0;
  double open_f = 0.0;
  double score = 0.0;  // mean of closed_f and open_f
};

struct FitResult {
  std::vector<FitCandidate> grid;  // nu-major order
  FitCandidate best;               // first maximum in grid order
};

// Grid search on the fitting/validation simulations of `repeats` splits.
FitResult fit_hyperparameters(const LabeledDataset& dataset, const StudyOptions& options,
                              const std::vector<double>& nu_offsets,
                              const std::vector<double>& varsigmas);

struct DiscoveryResult {
  SplitPlan plan;
  std::vector<int> unknown_classes_used;
  EvalSet set;
  OSRPrediction prediction;
  MicroF metrics;
  double openness = 0.0;
};

// One recognition run on split job 0 with `unknown_count` unknown classes.
// `on_sweep` receives (sweep, live subclasses) after every sweep.
DiscoveryResult run_discovery(const LabeledDataset& dataset, const StudyOptions& options,
                              int unknown_count,
                              std::function<void(int, int)> on_sweep = {});

// Default grids.
std::vector<double> default_varsigma_grid();
std::vector<double> default_nu_offset_grid();
std::vector<double> default_epsilon_grid();
std::vector<double> default_batch_fractions();

}  // namespace cdosr
