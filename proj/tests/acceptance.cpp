// Apache License, Version 2.0, refer to LICENSE.txt

// Acceptance suite. Prints one PASS/FAIL line per criterion.
// Exit status: 0 when every criterion passes, 77 when the only failures are
// criteria whose input data is not present, 1 otherwise.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "cdosr/dataset.hpp"
#include "cdosr/hdp_sampler.hpp"
#include "cdosr/metrics.hpp"
#include "cdosr/normal_wishart.hpp"
#include "cdosr/protocol.hpp"
#include "cdosr/random.hpp"
#include "cdosr/recognizer.hpp"
#include "cdosr/studies.hpp"
#include "oracles.hpp"
#include "test_data.hpp"

using namespace cdosr;

namespace {

enum class Status { kPass, kFail, kNoData };

struct Verdict {
  Status status;
  std::string detail;
};

Verdict check(bool ok, const std::string& detail) {
  return {ok ? Status::kPass : Status::kFail, detail};
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

double chi2_pvalue(const std::vector<long>& counts, const std::vector<double>& probs) {
  long n = 0;
  for (long c : counts) n += c;
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = probs[i] * static_cast<double>(n);
    stat += (counts[i] - e) * (counts[i] - e) / e;
  }
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Three known and two unknown spherical classes, 8 sd apart.
LabeledDataset synthetic(std::uint64_t seed, int per_class) {
  std::mt19937_64 rng(seed);
  return testdata::gaussian_classes(testdata::five_means(), 1.0, per_class, rng);
}

StudyOptions synthetic_options(std::uint64_t seed) {
  StudyOptions o;
  o.omega = 3;
  o.repeats = 1;
  o.root_seed = seed;
  o.jobs = Execution::kSerial;
  return o;
}

Verdict openness_arithmetic() {
  const double a = openness(10, 10, 20), b = openness(5, 5, 8);
  return check(std::abs(a - 0.1835) <= 5e-5 && std::abs(b - 0.1229) <= 5e-5,
               fmt("openness(10,10,20)=%.6f openness(5,5,8)=%.6f", a, b));
}

Verdict delta_reproduction() {
  const int a = estimate_unknown_count(14, 19, 5), b = estimate_unknown_count(32, 43, 5);
  return check(a == 4 && b == 4, fmt("delta(14,19,5)=%.0f delta(32,43,5)=%.0f", a, b));
}

Verdict conjugacy_oracle() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z;
  double worst_point = 0.0, worst_mass = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    NormalWishartParams p;
    p.mu0 = Vector::Constant(1, -2 + 4 * u(rng));
    p.beta = 0.3 + 2.7 * u(rng);
    p.nu = 1.5 + 4.5 * u(rng);
    p.sigma0 = Matrix::Constant(1, 1, 0.3 + 2.7 * u(rng));
    const int n = static_cast<int>(rng() % 6);
    std::vector<double> data;
    GaussianSuffStats ctx(1);
    for (int i = 0; i < n; ++i) {
      data.push_back(p.mu0(0) + 1.5 * z(rng));
      ctx.add(Vector::Constant(1, data.back()));
    }
    const oracle::GridPosterior1D grid(p.mu0(0), p.beta, p.nu, p.sigma0(0, 0), data, 3000, 3000);
    auto density = [&](double x) {
      return std::exp(log_predictive(Vector::Constant(1, x), p, ctx));
    };
    const double mean = data.empty() ? p.mu0(0) : (p.mu0(0) + std::accumulate(data.begin(), data.end(), 0.0)) / (n + 1);
    for (int k = -6; k <= 6; ++k) {
      const double x = mean + 0.75 * k;
      worst_point = std::max(worst_point, std::abs(density(x) - grid.predictive(x)));
    }
    // x = mean + tan(theta) maps the real line onto (-pi/2, pi/2).
    const double h = std::numbers::pi / 2;
    const double mass = oracle::trapezoid(
        [&](double t) {
          const double c = std::cos(t);
          return c == 0.0 ? 0.0 : density(mean + std::tan(t)) / (c * c);
        },
        -h, h, 400000);
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
  }
  return check(worst_point <= 1e-3 && worst_mass <= 1e-4,
               fmt("max pointwise error %.2e, max mass error %.2e", worst_point, worst_mass));
}

Verdict crp_reduction() {
  SamplerOptions stub;
  stub.likelihood = Likelihood::kConstant;
  std::mt19937_64 g(3);
  HDPConcentrations conc;

  // Table choice for the first point of a 10-point group.
  auto table_data = testdata::make_groups({testdata::blob(testdata::v2(0, 0), 1, 10, g)});
  Rng rng(9);
  conc.gamma = 5.0;
  conc.alpha0 = 2.0;
  const CRFState tbase = init_state(table_data, conc, testdata::unit_prior(2), 3, rng, stub);
  const int own = tbase.table_of(0, 0);
  std::vector<double> tprobs;
  for (std::size_t t = 0; t < tbase.table_capacity(0); ++t)
    tprobs.push_back((tbase.table_size(0, t) - (static_cast<int>(t) == own)) / (9.0 + conc.alpha0));
  tprobs.push_back(conc.alpha0 / (9.0 + conc.alpha0));
  std::vector<long> tcounts(tprobs.size(), 0);
  for (int draw = 0; draw < 100000; ++draw) {
    CRFState s = tbase;
    s.sample_table(0, 0, rng);
    const int t = s.table_of(0, 0);
    const bool existing = t < static_cast<int>(tbase.table_capacity(0)) && s.table_size(0, t) > 1;
    ++tcounts[existing ? static_cast<std::size_t>(t) : tprobs.size() - 1];
  }
  const double p_table = chi2_pvalue(tcounts, tprobs);

  // Dish choice for the single table of a one-point group; dish table
  // counts without it are 2, 2, 1.
  auto dish_data = testdata::make_groups({testdata::blob(testdata::v2(0, 0), 1, 5, g),
                                          testdata::blob(testdata::v2(0, 0), 1, 2, g),
                                          testdata::blob(testdata::v2(0, 0), 1, 1, g)});
  conc.gamma = 1.5;
  conc.alpha0 = 1.0;
  const CRFState dbase = init_state(dish_data, conc, testdata::unit_prior(2), 3, rng, stub);
  const double total = 5.0 + conc.gamma;
  const std::vector<double> dprobs = {2 / total, 2 / total, 1 / total, conc.gamma / total};
  std::vector<long> dcounts(4, 0);
  for (int draw = 0; draw < 100000; ++draw) {
    CRFState s = dbase;
    s.sample_dish(2, 0, rng);
    ++dcounts[s.num_dishes() > 3 ? 3 : static_cast<std::size_t>(s.table_dish(2, 0))];
  }
  const double p_dish = chi2_pvalue(dcounts, dprobs);
  return check(p_table > 0.001 && p_dish > 0.001,
               fmt("table p=%.4f dish p=%.4f over 1e5 draws each", p_table, p_dish));
}

Verdict synthetic_recognition() {
  double f_sum = 0.0;
  std::ostringstream deltas;
  bool deltas_ok = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DiscoveryResult r = run_discovery(synthetic(seed, 100), synthetic_options(seed), 2);
    f_sum += r.metrics.f;
    deltas << r.prediction.delta << (seed < 9 ? "," : "");
    deltas_ok = deltas_ok && r.prediction.delta >= 1 && r.prediction.delta <= 3;
  }
  const double mean_f = f_sum / 10;
  return check(mean_f >= 0.90 && deltas_ok,
               fmt("mean F=%.4f", mean_f) + " delta per seed=" + deltas.str());
}

Verdict batch_insensitivity() {
  double f20 = 0.0, f100 = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rows = run_batch_size_study(synthetic(seed, 100), synthetic_options(seed), {0.2, 1.0}, 2);
    f20 += rows[0].mean_f / 10;
    f100 += rows[1].mean_f / 10;
  }
  return check(std::abs(f20 - f100) < 0.05, fmt("mean F at 20%%=%.4f at 100%%=%.4f", f20, f100));
}

Verdict epsilon_shape() {
  const std::vector<double> grid = {0, 1e-5, 1e-4, 1e-3, 1e-2, 0.1};
  std::vector<double> mean(grid.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rows = run_epsilon_study(synthetic(seed, 100), synthetic_options(seed), grid, 2);
    for (std::size_t i = 0; i < grid.size(); ++i) mean[i] += rows[grid.size() + i].mean_f / 10;
  }
  const double best = *std::max_element(mean.begin(), mean.end());
  return check(best - mean[4] <= 0.05, fmt("F at 0.01=%.4f best=%.4f", mean[4], best));
}

std::string recompute_dish_stats(const CRFState& s) {
  std::vector<GaussianSuffStats> stats(s.dish_capacity(), GaussianSuffStats(s.data().dim));
  for (std::size_t j = 0; j < s.num_groups(); ++j)
    for (std::size_t i = 0; i < s.data().group_size(j); ++i)
      stats[static_cast<std::size_t>(s.dish_of(j, i))].add(s.point(j, i));
  for (std::size_t k = 0; k < s.dish_capacity(); ++k) {
    if (!s.dish_live(k)) continue;
    const auto& got = s.dish_stats(k);
    if (got.count() != stats[k].count()) return "dish count mismatch";
    if ((got.sum() - stats[k].sum()).cwiseAbs().maxCoeff() > 1e-9 * (1 + stats[k].sum().cwiseAbs().maxCoeff()))
      return "dish sum mismatch";
    if ((got.scatter() - stats[k].scatter()).cwiseAbs().maxCoeff() >
        1e-9 * (1 + stats[k].scatter().cwiseAbs().maxCoeff()))
      return "dish scatter mismatch";
  }
  return {};
}

Verdict sampler_fuzzing() {
  std::mt19937_64 g(77);
  std::uniform_real_distribution<double> u(-4, 4);
  long ops = 0, violations = 0;
  std::string first;
  while (ops < 10000) {
    const int J = 1 + static_cast<int>(g() % 4), d = 1 + static_cast<int>(g() % 3);
    std::vector<Matrix> groups;
    for (int j = 0; j < J; ++j)
      groups.push_back(testdata::blob(Vector::NullaryExpr(d, [&] { return u(g); }), 1.0,
                                      1 + static_cast<int>(g() % 12), g));
    HDPConcentrations conc;
    conc.gamma = std::exp(u(g));
    conc.alpha0 = std::exp(u(g));
    SamplerOptions opt;
    opt.refresh_interval = 1 + static_cast<long>(g() % 200);
    opt.resample_concentrations = g() % 2 == 0;
    Rng rng(g());
    CRFState s = init_state(testdata::make_groups(groups), conc, testdata::unit_prior(d, 0.5),
                            1 + static_cast<int>(g() % 8), rng, opt);
    for (int step = 0; step < 200 && ops < 10000; ++step, ++ops) {
      const std::size_t j = rng() % s.num_groups();
      switch (rng() % 3) {
        case 0: s.sample_table(j, rng() % s.data().group_size(j), rng); break;
        case 1: {
          std::vector<std::size_t> live;
          for (std::size_t t = 0; t < s.table_capacity(j); ++t)
            if (s.table_live(j, t)) live.push_back(t);
          s.sample_dish(j, live[rng() % live.size()], rng);
          break;
        }
        default: s.refresh_statistics(); break;
      }
      auto problems = s.check_invariants(1e-9);
      const std::string stats = recompute_dish_stats(s);
      if (!stats.empty()) problems.push_back(stats);
      if (!problems.empty()) {
        ++violations;
        if (first.empty()) first = problems.front();
      }
    }
  }
  return check(violations == 0, std::to_string(ops) + " operations, " + std::to_string(violations) +
                                    " violations" + (first.empty() ? "" : " (" + first + ")"));
}

double median_seconds(const std::function<void()>& f, int runs) {
  std::vector<double> t;
  for (int r = 0; r < runs; ++r) {
    const auto a = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Verdict complexity_sanity() {
  auto timed = [](int per_class) {
    const LabeledDataset ds = synthetic(5, per_class);
    const SplitPlan plan = split_protocol(ds, 3, 5);
    const StudyOptions o = synthetic_options(5);
    const EvalSet set = prepare_eval_set(ds, plan.train, plan.test, plan.known_classes,
                                         plan.unknown_classes, 1.0, 0, o);
    return median_seconds([&] { evaluate(set, o.hyper); }, 7);
  };
  const double t1 = timed(200), t2 = timed(400);
  const double ratio = t2 / t1;
  return check(ratio >= 1.5 && ratio <= 3.5,
               fmt("N=1000: %.3fs  N=2000: %.3fs  ratio %.2f", t1, t2, ratio));
}

std::filesystem::path letter_path() {
  if (const char* env = std::getenv("CDOSR_LETTER_DATA")) return env;
  return CDOSR_TEST_DATA_DIR "/letter-recognition.data";
}

// Closed-set baseline: every test point goes to the nearest class mean.
MicroF nearest_centroid(const EvalSet& set) {
  const auto classes = set.train.classes();
  Matrix centroids(static_cast<Eigen::Index>(classes.size()), set.train.dim());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Vector sum = Vector::Zero(set.train.dim());
    const auto rows = set.train.rows_of_class(classes[c]);
    for (auto r : rows) sum += set.train.features.row(static_cast<Eigen::Index>(r)).transpose();
    centroids.row(static_cast<Eigen::Index>(c)) = (sum / static_cast<double>(rows.size())).transpose();
  }
  std::vector<std::optional<int>> pred;
  for (Eigen::Index i = 0; i < set.test.rows(); ++i) {
    Eigen::Index best;
    (centroids.rowwise() - set.test.row(i)).rowwise().squaredNorm().minCoeff(&best);
    pred.push_back(classes[static_cast<std::size_t>(best)]);
  }
  return micro_f(pred, set.truth, set.known);
}

Verdict letter_run() {
  const auto path = letter_path();
  if (!std::filesystem::exists(path))
    return {Status::kNoData, "dataset unavailable: " + path.string() +
                                 " (set CDOSR_LETTER_DATA to the LETTER file)"};
  const LabeledDataset full = load_dataset(path);
  double cd = 0.0, nc = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::size_t> rows(full.size());
    std::iota(rows.begin(), rows.end(), 0);
    Rng rng(stream_seed(seed, SeedStream::kBatch));
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(std::min<std::size_t>(2000, rows.size()));
    std::sort(rows.begin(), rows.end());
    const LabeledDataset ds = full.subset(rows);
    StudyOptions o;
    o.omega = 10;
    o.root_seed = seed;
    const SplitPlan plan = split_protocol(ds, 10, stream_seed(seed, SeedStream::kSplit));
    std::vector<int> unknown = plan.unknown_classes;
    Rng urng(stream_seed(seed, SeedStream::kUnknownSubset));
    std::shuffle(unknown.begin(), unknown.end(), urng);
    unknown.resize(10);
    std::sort(unknown.begin(), unknown.end());
    const EvalSet set =
        prepare_eval_set(ds, plan.train, plan.test, plan.known_classes, unknown, 1.0, 0, o);
    HyperConfig h = o.hyper;
    h.seed = stream_seed(seed, SeedStream::kChain);
    cd += evaluate(set, h).f / 10;
    nc += nearest_centroid(set).f / 10;
  }
  return check(cd > nc, fmt("openness %.4f  CD-OSR mean F=%.4f  nearest-centroid mean F=%.4f",
                            openness(10, 10, 20), cd, nc));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"openness arithmetic", openness_arithmetic},
      {"unknown-count estimate", delta_reproduction},
      {"conjugacy oracle", conjugacy_oracle},
      {"CRP reduction", crp_reduction},
      {"synthetic open-set recognition", synthetic_recognition},
      {"batch-size insensitivity", batch_insensitivity},
      {"epsilon sensitivity", epsilon_shape},
      {"sampler invariant fuzzing", sampler_fuzzing},
      {"complexity sanity", complexity_sanity},
      {"LETTER desk-scale run", letter_run},
  };
  int failed = 0, missing = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.status == Status::kPass ? "PASS" : "FAIL") << "  criterion " << (i + 1)
              << "  " << criteria[i].first << ": " << v.detail << "  [" << fmt("%.1fs", secs)
              << "]" << std::endl;
    failed += v.status == Status::kFail;
    missing += v.status == Status::kNoData;
  }
  if (failed) return 1;
  return missing ? 77 : 0;
}
