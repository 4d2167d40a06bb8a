// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/studies.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>

#include "cdosr/preprocess.hpp"
#include "cdosr/random.hpp"

namespace cdosr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Runs body(job) for every job, in parallel when requested. The first
// exception thrown by any job is rethrown after all jobs finish.
void run_jobs(std::size_t n_jobs, Execution exec, const std::function<void(std::size_t)>& body) {
  std::exception_ptr first_error;
  const auto n = static_cast<std::ptrdiff_t>(n_jobs);
  const bool par = exec == Execution::kParallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (std::ptrdiff_t job = 0; job < n; ++job) {
    try {
      body(static_cast<std::size_t>(job));
    } catch (...) {
#pragma omp critical(cdosr_job_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<int> choose_unknown(const SplitPlan& plan, int count, std::uint64_t seed) {
  if (count < 0 || static_cast<std::size_t>(count) > plan.unknown_classes.size())
    throw std::invalid_argument("requested " + std::to_string(count) +
                                " unknown classes but only " +
                                std::to_string(plan.unknown_classes.size()) + " exist");
  std::vector<int> pool = plan.unknown_classes;
  Rng rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

HyperConfig job_hyper(const StudyOptions& options, std::uint64_t jseed) {
  HyperConfig h = options.hyper;
  h.seed = stream_seed(jseed, SeedStream::kChain);
  return h;
}

std::vector<std::optional<int>> predicted_labels(const OSRPrediction& p) {
  std::vector<std::optional<int>> out;
  out.reserve(p.outcomes.size());
  for (const auto& o : p.outcomes) out.push_back(o.label);
  return out;
}

MicroF score(const EvalSet& set, const OSRPrediction& p) {
  const auto pred = predicted_labels(p);
  return micro_f(pred, set.truth, set.known);
}

}  // namespace

void StudyOptions::validate() const {
  hyper.validate();
  if (omega < 1) throw std::invalid_argument("StudyOptions: omega must be >= 1");
  if (repeats < 1) throw std::invalid_argument("StudyOptions: repeats must be >= 1");
  if (!(pca_retain > 0.0 && pca_retain <= 1.0))
    throw std::invalid_argument("StudyOptions: pca_retain must lie in (0, 1]");
}

std::uint64_t job_seed(std::uint64_t root_seed, std::size_t job) { return root_seed + job; }

std::uint64_t stream_seed(std::uint64_t jseed, SeedStream stream) {
  return splitmix64(jseed ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

EvalSet prepare_eval_set(const LabeledDataset& dataset, const std::vector<std::size_t>& train_rows,
                         const std::vector<std::size_t>& test_rows,
                         const std::vector<int>& known_classes,
                         const std::vector<int>& unknown_classes, double fraction,
                         std::uint64_t batch_seed, const StudyOptions& options) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("prepare_eval_set: fraction must lie in (0, 1]");
  EvalSet set;
  set.known.insert(known_classes.begin(), known_classes.end());
  set.n_unknown_classes = static_cast<int>(unknown_classes.size());
  const std::set<int> unknown(unknown_classes.begin(), unknown_classes.end());

  std::vector<std::size_t> batch;
  for (std::size_t r : test_rows) {
    const int c = dataset.labels[r];
    if (set.known.count(c) || unknown.count(c)) batch.push_back(r);
  }
  if (fraction < 1.0) {
    Rng rng(batch_seed);
    std::shuffle(batch.begin(), batch.end(), rng);
    batch.resize(std::max<std::size_t>(1, rounded_share(batch.size(), fraction)));
    std::sort(batch.begin(), batch.end());
  }

  std::vector<std::size_t> train_known;
  for (std::size_t r : train_rows)
    if (set.known.count(dataset.labels[r])) train_known.push_back(r);
  set.train = dataset.subset(train_known);
  LabeledDataset test = dataset.subset(batch);
  set.truth = test.labels;

  Matrix train_x = set.train.features;
  Matrix test_x = test.features;
  if (options.standardize) {
    const auto st = Standardizer::fit(train_x);
    train_x = st.apply(train_x);
    test_x = st.apply(test_x);
  }
  if (options.pca_retain < 1.0) {
    auto r = pca_fit_transform(train_x, {train_x, test_x}, options.pca_retain);
    train_x = std::move(r.projected[0]);
    test_x = std::move(r.projected[1]);
  }
  set.train.features = std::move(train_x);
  set.test = std::move(test_x);
  return set;
}

MicroF evaluate(const EvalSet& set, const HyperConfig& hyper) {
  return score(set, recognize(set.train, set.test, hyper));
}

std::vector<MetricsRow> run_openness_sweep(const LabeledDataset& dataset,
                                           const StudyOptions& options,
                                           const std::vector<int>& unknown_counts) {
  options.validate();
  if (unknown_counts.empty()) throw std::invalid_argument("openness sweep: no unknown counts");
  const std::size_t R = static_cast<std::size_t>(options.repeats);
  std::vector<MetricsRow> rows(unknown_counts.size());
  for (std::size_t u = 0; u < unknown_counts.size(); ++u) {
    rows[u].openness = openness(options.omega, options.omega, options.omega + unknown_counts[u]);
    rows[u].x = rows[u].openness;
    rows[u].seed = options.root_seed;
    rows[u].runs.resize(R);
  }
  run_jobs(unknown_counts.size() * R, options.jobs, [&](std::size_t job) {
    const std::size_t u = job / R;
    const std::size_t r = job % R;
    const std::uint64_t js = job_seed(options.root_seed, r);
    const SplitPlan plan = split_protocol(dataset, options.omega, stream_seed(js, SeedStream::kSplit));
    const auto unknown =
        choose_unknown(plan, unknown_counts[u], stream_seed(js, SeedStream::kUnknownSubset));
    const EvalSet set = prepare_eval_set(dataset, plan.train, plan.test, plan.known_classes,
                                         unknown, 1.0, 0, options);
    rows[u].runs[r] = evaluate(set, job_hyper(options, js));
  });
  for (auto& row : rows) summarize(row);
  return rows;
}

std::vector<MetricsRow> run_batch_size_study(const LabeledDataset& dataset,
                                             const StudyOptions& options,
                                             const std::vector<double>& fractions,
                                             int unknown_count) {
  options.validate();
  if (fractions.empty()) throw std::invalid_argument("batch study: no fractions");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("batch study: fractions must lie in (0, 1]");
  const std::size_t R = static_cast<std::size_t>(options.repeats);
  const double open = openness(options.omega, options.omega, options.omega + unknown_count);
  std::vector<MetricsRow> rows(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    rows[i].x = fractions[i];
    rows[i].openness = open;
    rows[i].seed = options.root_seed;
    rows[i].runs.resize(R);
  }
  run_jobs(fractions.size() * R, options.jobs, [&](std::size_t job) {
    const std::size_t i = job / R;
    const std::size_t r = job % R;
    const std::uint64_t js = job_seed(options.root_seed, r);
    const SplitPlan plan = split_protocol(dataset, options.omega, stream_seed(js, SeedStream::kSplit));
    const auto unknown =
        choose_unknown(plan, unknown_count, stream_seed(js, SeedStream::kUnknownSubset));
    const EvalSet set =
        prepare_eval_set(dataset, plan.train, plan.test, plan.known_classes, unknown,
                         fractions[i], stream_seed(js, SeedStream::kBatch), options);
    rows[i].runs[r] = evaluate(set, job_hyper(options, js));
  });
  for (auto& row : rows) summarize(row);
  return rows;
}

std::vector<MetricsRow> run_epsilon_study(const LabeledDataset& dataset,
                                          const StudyOptions& options,
                                          const std::vector<double>& eps_grid,
                                          int unknown_count) {
  options.validate();
  if (eps_grid.empty()) throw std::invalid_argument("epsilon study: empty grid");
  for (double e : eps_grid)
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("epsilon study: values must lie in [0, 1)");
  const std::size_t R = static_cast<std::size_t>(options.repeats);
  const std::size_t E = eps_grid.size();
  const int counts[2] = {0, unknown_count};
  const char* names[2] = {"closed", "open"};

  std::vector<MetricsRow> rows(2 * E);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t e = 0; e < E; ++e) {
      MetricsRow& row = rows[s * E + e];
      row.series = names[s];
      row.x = eps_grid[e];
      row.openness = openness(options.omega, options.omega, options.omega + counts[s]);
      row.seed = options.root_seed;
      row.runs.resize(R);
    }
  // The chain does not depend on epsilon, so each job co-clusters once and
  // applies every grid value to the same final state.
  run_jobs(2 * R, options.jobs, [&](std::size_t job) {
    const std::size_t s = job / R;
    const std::size_t r = job % R;
    const std::uint64_t js = job_seed(options.root_seed, r);
    const SplitPlan plan = split_protocol(dataset, options.omega, stream_seed(js, SeedStream::kSplit));
    const auto unknown = choose_unknown(plan, counts[s], stream_seed(js, SeedStream::kUnknownSubset));
    const EvalSet set = prepare_eval_set(dataset, plan.train, plan.test, plan.known_classes,
                                         unknown, 1.0, 0, options);
    const CoClustering cc = co_cluster(set.train, set.test, job_hyper(options, js));
    for (std::size_t e = 0; e < E; ++e) rows[s * E + e].runs[r] = score(set, decide(cc, eps_grid[e]));
  });
  for (auto& row : rows) summarize(row);
  return rows;
}

FitResult fit_hyperparameters(const LabeledDataset& dataset, const StudyOptions& options,
                              const std::vector<double>& nu_offsets,
                              const std::vector<double>& varsigmas) {
  options.validate();
  if (nu_offsets.empty() || varsigmas.empty())
    throw std::invalid_argument("fit: parameter grids must be nonempty");
  const std::size_t R = static_cast<std::size_t>(options.repeats);
  const std::size_t G = nu_offsets.size() * varsigmas.size();

  FitResult result;
  result.grid.resize(G);
  for (std::size_t a = 0; a < nu_offsets.size(); ++a)
    for (std::size_t b = 0; b < varsigmas.size(); ++b) {
      auto& c = result.grid[a * varsigmas.size() + b];
      c.nu_offset = nu_offsets[a];
      c.varsigma = varsigmas[b];
    }

  // Per (grid point, repeat): closed-set and open-set F.
  std::vector<double> closed(G * R, 0.0), open(G * R, 0.0);
  run_jobs(G * R, options.jobs, [&](std::size_t job) {
    const std::size_t g = job / R;
    const std::size_t r = job % R;
    const std::uint64_t js = job_seed(options.root_seed, r);
    const SplitPlan plan = split_protocol(dataset, options.omega, stream_seed(js, SeedStream::kSplit));
    HyperConfig h = job_hyper(options, js);
    h.nu_offset = result.grid[g].nu_offset;
    h.varsigma = result.grid[g].varsigma;
    const EvalSet cs = prepare_eval_set(dataset, plan.fitting, plan.closed_set,
                                        plan.fitting_known_classes, {}, 1.0, 0, options);
    const EvalSet os = prepare_eval_set(dataset, plan.fitting, plan.open_set,
                                        plan.fitting_known_classes, plan.fitting_unknown_classes,
                                        1.0, 0, options);
    closed[job] = evaluate(cs, h).f;
    open[job] = evaluate(os, h).f;
  });

  for (std::size_t g = 0; g < G; ++g) {
    auto& c = result.grid[g];
    for (std::size_t r = 0; r < R; ++r) {
      c.closed_f += closed[g * R + r];
      c.open_f += open[g * R + r];
    }
    c.closed_f /= static_cast<double>(R);
    c.open_f /= static_cast<double>(R);
    c.score = 0.5 * (c.closed_f + c.open_f);
    if (g == 0 || c.score > result.best.score) result.best = c;
  }
  return result;
}

DiscoveryResult run_discovery(const LabeledDataset& dataset, const StudyOptions& options,
                              int unknown_count, std::function<void(int, int)> on_sweep) {
  options.validate();
  DiscoveryResult d;
  const std::uint64_t js = job_seed(options.root_seed, 0);
  d.plan = split_protocol(dataset, options.omega, stream_seed(js, SeedStream::kSplit));
  d.unknown_classes_used =
      choose_unknown(d.plan, unknown_count, stream_seed(js, SeedStream::kUnknownSubset));
  d.set = prepare_eval_set(dataset, d.plan.train, d.plan.test, d.plan.known_classes,
                           d.unknown_classes_used, 1.0, 0, options);
  const HyperConfig h = job_hyper(options, js);
  d.prediction = decide(co_cluster(d.set.train, d.set.test, h, std::move(on_sweep)), h.epsilon);
  d.metrics = d.set.truth.empty() ? MicroF{} : score(d.set, d.prediction);
  d.openness = openness(options.omega, options.omega, options.omega + unknown_count);
  return d;
}

std::vector<double> default_varsigma_grid() {
  std::vector<double> g = {1e-5, 1e-4, 1e-3, 1e-2};
  for (int i = 1; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

std::vector<double> default_nu_offset_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i);
  return g;
}

std::vector<double> default_epsilon_grid() { return {0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.1}; }

std::vector<double> default_batch_fractions() { return {0.2, 0.4, 0.6, 0.8, 1.0}; }

}  // namespace cdosr
