// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "cdosr/random.hpp"

namespace cdosr {

namespace {

constexpr std::size_t kMinClassSize = 5;
constexpr double kTrainShare = 0.6;
constexpr double kFittingShare = 0.6;

template <typename T>
std::vector<T> pick(std::vector<T> pool, std::size_t n, Rng& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::size_t rounded_share(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

int fitting_known_count(int omega) {
  return static_cast<int>(std::floor(omega / 2.0 + 0.5));
}

SplitPlan split_protocol(const LabeledDataset& dataset, int omega, std::uint64_t seed) {
  const auto classes = dataset.classes();
  if (omega < 1) throw std::invalid_argument("split_protocol: omega must be >= 1");
  if (classes.size() <= static_cast<std::size_t>(omega))
    throw std::invalid_argument("split_protocol: dataset has " +
                                std::to_string(classes.size()) + " classes, need more than " +
                                std::to_string(omega));
  std::map<int, std::vector<std::size_t>> rows;
  for (int c : classes) {
    rows[c] = dataset.rows_of_class(c);
    if (rows[c].size() < kMinClassSize)
      throw std::invalid_argument("split_protocol: class " + std::to_string(c) + " has only " +
                                  std::to_string(rows[c].size()) + " instances (need " +
                                  std::to_string(kMinClassSize) + ")");
  }

  Rng rng(seed);
  SplitPlan plan;
  plan.seed = seed;
  plan.known_classes = pick(classes, static_cast<std::size_t>(omega), rng);
  for (int c : classes)
    if (!std::binary_search(plan.known_classes.begin(), plan.known_classes.end(), c))
      plan.unknown_classes.push_back(c);

  std::map<int, std::vector<std::size_t>> train_rows;
  for (int c : plan.known_classes) {
    auto& r = rows[c];
    std::vector<std::size_t> shuffled = r;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t n_train = rounded_share(r.size(), kTrainShare);
    std::vector<std::size_t> tr(shuffled.begin(), shuffled.begin() + n_train);
    std::vector<std::size_t> te(shuffled.begin() + n_train, shuffled.end());
    std::sort(tr.begin(), tr.end());
    plan.train.insert(plan.train.end(), tr.begin(), tr.end());
    plan.test.insert(plan.test.end(), te.begin(), te.end());
    train_rows[c] = std::move(tr);
  }
  for (int c : plan.unknown_classes) plan.test.insert(plan.test.end(), rows[c].begin(), rows[c].end());
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());

  plan.fitting_known_classes =
      pick(plan.known_classes, static_cast<std::size_t>(fitting_known_count(omega)), rng);
  for (int c : plan.known_classes)
    if (!std::binary_search(plan.fitting_known_classes.begin(),
                            plan.fitting_known_classes.end(), c))
      plan.fitting_unknown_classes.push_back(c);

  for (int c : plan.fitting_known_classes) {
    std::vector<std::size_t> shuffled = train_rows[c];
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t n_fit = rounded_share(shuffled.size(), kFittingShare);
    plan.fitting.insert(plan.fitting.end(), shuffled.begin(), shuffled.begin() + n_fit);
    plan.closed_set.insert(plan.closed_set.end(), shuffled.begin() + n_fit, shuffled.end());
  }
  plan.open_set = plan.closed_set;
  for (int c : plan.fitting_unknown_classes)
    plan.open_set.insert(plan.open_set.end(), train_rows[c].begin(), train_rows[c].end());
  std::sort(plan.fitting.begin(), plan.fitting.end());
  std::sort(plan.closed_set.begin(), plan.closed_set.end());
  std::sort(plan.open_set.begin(), plan.open_set.end());
  plan.validation = plan.open_set;
  return plan;
}

}  // namespace cdosr
