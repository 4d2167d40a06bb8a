// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/hdp_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cdosr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_gamma_prior(const GammaPrior& p, const char* name) {
  if (!(p.shape > 0.0) || !(p.rate > 0.0))
    throw std::invalid_argument(std::string("HDPConcentrations: ") + name +
                                " prior shape and rate must be > 0");
}

}  // namespace

void HDPConcentrations::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("HDPConcentrations: gamma must be > 0");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("HDPConcentrations: alpha0 must be > 0");
  check_gamma_prior(gamma_prior, "gamma");
  check_gamma_prior(alpha0_prior, "alpha0");
}

std::pair<double, double> draw_concentrations(const HDPConcentrations& conc,
                                              ConcentrationMode mode, Rng& rng) {
  conc.validate();
  if (mode == ConcentrationMode::kPriorMean)
    return {conc.gamma_prior.shape / conc.gamma_prior.rate,
            conc.alpha0_prior.shape / conc.alpha0_prior.rate};
  const double g = draw_gamma(conc.gamma_prior.shape, conc.gamma_prior.rate, rng);
  const double a = draw_gamma(conc.alpha0_prior.shape, conc.alpha0_prior.rate, rng);
  return {g, a};
}

CRFState::CRFState(std::shared_ptr<const GroupedDataset> data,
                   HDPConcentrations conc, NormalWishartParams prior,
                   SamplerOptions options)
    : data_(std::move(data)),
      conc_(conc),
      prior_(std::move(prior)),
      options_(options) {
  if (!data_) throw std::invalid_argument("CRFState: null dataset");
  conc_.validate();
  prior_.validate();
  if (prior_.dim() != data_->dim)
    throw std::invalid_argument("CRFState: prior dimension does not match data");
  prior_posterior_ = NormalWishartPosterior(prior_);

  const std::size_t J = data_->num_groups();
  seating_.resize(J);
  tables_.resize(J);
  free_tables_.resize(J);
  group_dish_tables_.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    if (data_->groups[j].rows() != data_->dim && data_->groups[j].cols() > 0)
      throw std::invalid_argument("CRFState: group dimension mismatch");
    seating_[j].assign(data_->group_size(j), -1);
  }
}

std::vector<int> CRFState::live_dishes() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < dishes_.size(); ++k)
    if (dishes_[k].tables > 0) out.push_back(static_cast<int>(k));
  return out;
}

std::vector<double> CRFState::dish_prior_log_weights() const {
  const double log_norm = std::log(num_tables_ + conc_.gamma);
  std::vector<double> w(dishes_.size() + 1, kNegInf);
  for (std::size_t k = 0; k < dishes_.size(); ++k)
    if (dishes_[k].tables > 0) w[k] = std::log(dishes_[k].tables) - log_norm;
  w.back() = std::log(conc_.gamma) - log_norm;
  return w;
}

int CRFState::create_dish() {
  int k;
  if (!free_dishes_.empty()) {
    k = free_dishes_.back();
    free_dishes_.pop_back();
  } else {
    k = static_cast<int>(dishes_.size());
    dishes_.push_back(Dish{0, GaussianSuffStats(data_->dim), std::nullopt});
    for (auto& row : group_dish_tables_) row.push_back(0);
  }
  dishes_[k].posterior.reset();
  ++num_dishes_;
  return k;
}

void CRFState::delete_dish(int k) {
  Dish& d = dishes_[k];
  d.tables = 0;
  d.stats.clear();
  d.posterior.reset();
  free_dishes_.push_back(k);
  --num_dishes_;
}

int CRFState::create_table(std::size_t j, int dish) {
  int t;
  if (!free_tables_[j].empty()) {
    t = free_tables_[j].back();
    free_tables_[j].pop_back();
  } else {
    t = static_cast<int>(tables_[j].size());
    tables_[j].push_back(Table{-1, 0, GaussianSuffStats(data_->dim)});
  }
  attach_table(j, t, dish);
  return t;
}

void CRFState::delete_table(std::size_t j, int t) {
  Table& tab = tables_[j][t];
  const int k = tab.dish;
  detach_table(j, t);
  tab.stats.clear();
  free_tables_[j].push_back(t);
  if (dishes_[k].tables == 0) delete_dish(k);
}

void CRFState::attach_table(std::size_t j, int t, int dish) {
  Table& tab = tables_[j][t];
  tab.dish = dish;
  Dish& d = dishes_[dish];
  ++d.tables;
  ++group_dish_tables_[j][dish];
  ++num_tables_;
  if (tab.size > 0) {
    d.stats.merge(tab.stats);
    touch_dish(dish);
  }
}

void CRFState::detach_table(std::size_t j, int t) {
  Table& tab = tables_[j][t];
  Dish& d = dishes_[tab.dish];
  if (tab.size > 0) {
    d.stats.unmerge(tab.stats);
    touch_dish(tab.dish);
  }
  --d.tables;
  --group_dish_tables_[j][tab.dish];
  --num_tables_;
  tab.dish = -1;
}

void CRFState::touch_dish(int k) { dishes_[k].posterior.reset(); }

void CRFState::seat(std::size_t j, std::size_t i, int t) {
  const auto x = point(j, i);
  Table& tab = tables_[j][t];
  ++tab.size;
  tab.stats.add(x);
  dishes_[tab.dish].stats.add(x);
  touch_dish(tab.dish);
  seating_[j][i] = t;
  note_updates(1);
}

void CRFState::unseat(std::size_t j, std::size_t i) {
  const int t = seating_[j][i];
  const auto x = point(j, i);
  Table& tab = tables_[j][t];
  --tab.size;
  tab.stats.remove(x);
  dishes_[tab.dish].stats.remove(x);
  touch_dish(tab.dish);
  seating_[j][i] = -1;
  if (tab.size == 0) delete_table(j, t);
  note_updates(1);
}

void CRFState::note_updates(long n) { updates_since_refresh_ += n; }

void CRFState::prepare_posteriors() {
  if (options_.likelihood == Likelihood::kConstant) return;
  std::vector<int> stale;
  for (std::size_t k = 0; k < dishes_.size(); ++k)
    if (dishes_[k].tables > 0 && !dishes_[k].posterior) stale.push_back(static_cast<int>(k));
  const auto n = static_cast<std::ptrdiff_t>(stale.size());
  const bool par = options_.execution == Execution::kParallel;
#pragma omp parallel for schedule(dynamic) if (par && n >= 4)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    Dish& d = dishes_[stale[s]];
    d.posterior.emplace(posterior_params(prior_, d.stats));
  }
}

void CRFState::sample_table(std::size_t j, std::size_t i, Rng& rng) {
  if (j >= seating_.size() || i >= seating_[j].size())
    throw std::out_of_range("sample_table: no such point");
  unseat(j, i);
  const auto x = point(j, i);
  const std::size_t K = dishes_.size();

  // Per-dish log f_k^{-x}(x); dead slots stay -inf.
  scratch_scores_.assign(K, kNegInf);
  double new_dish_score = 0.0;
  if (options_.likelihood == Likelihood::kConstant) {
    for (std::size_t k = 0; k < K; ++k)
      if (dishes_[k].tables > 0) scratch_scores_[k] = 0.0;
  } else {
    prepare_posteriors();
    scratch_components_.assign(K, nullptr);
    for (std::size_t k = 0; k < K; ++k)
      if (dishes_[k].tables > 0) scratch_components_[k] = &*dishes_[k].posterior;
    score_point(options_.execution, scratch_components_, x, scratch_scores_);
    new_dish_score = prior_posterior_.log_predictive(x);
  }

  // Dish mixture for a new table: m_.k f_k and gamma f_new, unnormalized.
  std::vector<double> dish_mix(K + 1, kNegInf);
  for (std::size_t k = 0; k < K; ++k)
    if (dishes_[k].tables > 0)
      dish_mix[k] = std::log(dishes_[k].tables) + scratch_scores_[k];
  dish_mix[K] = std::log(conc_.gamma) + new_dish_score;
  const double log_new_table = std::log(conc_.alpha0) + log_sum_exp(dish_mix) -
                               std::log(num_tables_ + conc_.gamma);

  auto& group_tables = tables_[j];
  scratch_weights_.clear();
  scratch_choices_.clear();
  for (std::size_t t = 0; t < group_tables.size(); ++t) {
    const Table& tab = group_tables[t];
    if (tab.size == 0) continue;
    scratch_weights_.push_back(std::log(tab.size) + scratch_scores_[tab.dish]);
    scratch_choices_.push_back(static_cast<int>(t));
  }
  scratch_weights_.push_back(log_new_table);
  scratch_choices_.push_back(-1);

  const std::size_t pick = sample_log_categorical(scratch_weights_, rng);
  int t = scratch_choices_[pick];
  if (t < 0) {
    const std::size_t dpick = sample_log_categorical(dish_mix, rng);
    const int k = dpick == K ? create_dish() : static_cast<int>(dpick);
    t = create_table(j, k);
  }
  seat(j, i, t);
  if (updates_since_refresh_ >= options_.refresh_interval) refresh_statistics();
}

void CRFState::sample_dish(std::size_t j, std::size_t t, Rng& rng) {
  if (j >= tables_.size() || t >= tables_[j].size() || tables_[j][t].size == 0)
    throw std::out_of_range("sample_dish: no such live table");
  const int old = tables_[j][t].dish;
  detach_table(j, static_cast<int>(t));
  if (dishes_[old].tables == 0) delete_dish(old);
  note_updates(1);

  const GaussianSuffStats& added = tables_[j][t].stats;
  const std::size_t K = dishes_.size();
  scratch_scores_.assign(K, kNegInf);
  double new_dish_score = 0.0;
  if (options_.likelihood == Likelihood::kConstant) {
    for (std::size_t k = 0; k < K; ++k)
      if (dishes_[k].tables > 0) scratch_scores_[k] = 0.0;
  } else {
    prepare_posteriors();
    scratch_components_.assign(K, nullptr);
    for (std::size_t k = 0; k < K; ++k)
      if (dishes_[k].tables > 0) scratch_components_[k] = &*dishes_[k].posterior;
    score_set(options_.execution, scratch_components_, added, scratch_scores_);
    new_dish_score = prior_posterior_.log_marginal(added);
  }

  scratch_weights_.assign(K + 1, kNegInf);
  for (std::size_t k = 0; k < K; ++k)
    if (dishes_[k].tables > 0)
      scratch_weights_[k] = std::log(dishes_[k].tables) + scratch_scores_[k];
  scratch_weights_[K] = std::log(conc_.gamma) + new_dish_score;

  const std::size_t pick = sample_log_categorical(scratch_weights_, rng);
  const int k = pick == K ? create_dish() : static_cast<int>(pick);
  attach_table(j, static_cast<int>(t), k);
  note_updates(1);
  if (updates_since_refresh_ >= options_.refresh_interval) refresh_statistics();
}

void CRFState::sweep(Rng& rng) {
  for (std::size_t j = 0; j < seating_.size(); ++j)
    for (std::size_t i = 0; i < seating_[j].size(); ++i) sample_table(j, i, rng);
  for (std::size_t j = 0; j < tables_.size(); ++j)
    for (std::size_t t = 0; t < tables_[j].size(); ++t)
      if (tables_[j][t].size > 0) sample_dish(j, t, rng);
  if (options_.resample_concentrations) {
    const auto [g, a] = draw_concentrations(conc_, ConcentrationMode::kDraw, rng);
    conc_.gamma = g;
    conc_.alpha0 = a;
  }
}

void CRFState::refresh_statistics() {
  for (auto& group : tables_)
    for (auto& tab : group) tab.stats.clear();
  for (auto& d : dishes_) {
    d.stats.clear();
    d.posterior.reset();
  }
  for (std::size_t j = 0; j < seating_.size(); ++j)
    for (std::size_t i = 0; i < seating_[j].size(); ++i) {
      const int t = seating_[j][i];
      if (t < 0) continue;
      tables_[j][t].stats.add(point(j, i));
    }
  for (std::size_t j = 0; j < tables_.size(); ++j)
    for (const auto& tab : tables_[j])
      if (tab.size > 0) dishes_[tab.dish].stats.merge(tab.stats);
  updates_since_refresh_ = 0;
}

std::vector<std::string> CRFState::check_invariants(double tol) const {
  std::vector<std::string> errors;
  auto fail = [&errors](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    errors.push_back(os.str());
  };

  const std::size_t J = seating_.size();
  const std::size_t K = dishes_.size();
  const int d = data_->dim;
  std::vector<GaussianSuffStats> dish_stats(K, GaussianSuffStats(d));
  std::vector<int> dish_tables(K, 0);
  int total_tables = 0;
  int live = 0;

  for (std::size_t j = 0; j < J; ++j) {
    const auto& group = tables_[j];
    std::vector<int> sizes(group.size(), 0);
    std::vector<GaussianSuffStats> table_stats(group.size(), GaussianSuffStats(d));
    for (std::size_t i = 0; i < seating_[j].size(); ++i) {
      const int t = seating_[j][i];
      if (t < 0 || static_cast<std::size_t>(t) >= group.size()) {
        fail("point (", j, ",", i, ") has invalid table ", t);
        continue;
      }
      ++sizes[t];
      table_stats[t].add(point(j, i));
    }
    int seated = 0;
    std::vector<int> m_jk(K, 0);
    for (std::size_t t = 0; t < group.size(); ++t) {
      const Table& tab = group[t];
      seated += tab.size;
      if (tab.size != sizes[t])
        fail("table (", j, ",", t, ") size ", tab.size, " != recount ", sizes[t]);
      if (tab.size == 0) {
        if (tab.dish != -1) fail("empty table (", j, ",", t, ") still serves a dish");
        continue;
      }
      if (tab.dish < 0 || static_cast<std::size_t>(tab.dish) >= K) {
        fail("table (", j, ",", t, ") has invalid dish ", tab.dish);
        continue;
      }
      ++m_jk[tab.dish];
      ++dish_tables[tab.dish];
      ++total_tables;
      dish_stats[tab.dish].merge(table_stats[t]);
      if (tab.stats.count() != table_stats[t].count() ||
          (tab.stats.sum() - table_stats[t].sum()).cwiseAbs().maxCoeff() > tol ||
          (tab.stats.scatter() - table_stats[t].scatter()).cwiseAbs().maxCoeff() > tol)
        fail("table (", j, ",", t, ") statistics drifted");
    }
    if (seated != static_cast<int>(seating_[j].size()))
      fail("group ", j, " seats ", seated, " of ", seating_[j].size(), " points");
    for (std::size_t k = 0; k < K; ++k)
      if (m_jk[k] != group_dish_tables_[j][k])
        fail("m_jk mismatch at (", j, ",", k, ")");
  }

  for (std::size_t k = 0; k < K; ++k) {
    const Dish& dish = dishes_[k];
    if (dish.tables != dish_tables[k])
      fail("dish ", k, " table count ", dish.tables, " != recount ", dish_tables[k]);
    if (dish.tables > 0) ++live;
    const GaussianSuffStats& s = dish.stats;
    if (s.count() != dish_stats[k].count() ||
        (s.sum() - dish_stats[k].sum()).cwiseAbs().maxCoeff() > tol ||
        (s.scatter() - dish_stats[k].scatter()).cwiseAbs().maxCoeff() > tol)
      fail("dish ", k, " statistics differ from recomputation");
  }
  if (live != num_dishes_) fail("live dish count ", num_dishes_, " != recount ", live);
  if (total_tables != num_tables_)
    fail("total tables ", num_tables_, " != recount ", total_tables);
  return errors;
}

CRFState init_state(std::shared_ptr<const GroupedDataset> data,
                    HDPConcentrations conc, NormalWishartParams prior,
                    int init_components, Rng& rng, SamplerOptions options) {
  if (init_components < 1)
    throw std::invalid_argument("init_state: init_components must be >= 1");
  if (!data || data->num_groups() == 0)
    throw std::invalid_argument("init_state: no groups");
  for (std::size_t j = 0; j < data->num_groups(); ++j)
    if (data->group_size(j) == 0)
      throw std::invalid_argument("init_state: group " + std::to_string(j) + " is empty");

  CRFState s(std::move(data), conc, std::move(prior), options);
  const std::size_t J = s.num_groups();
  std::size_t dishes_needed = 0;
  for (std::size_t j = 0; j < J; ++j)
    dishes_needed = std::max(dishes_needed, std::min<std::size_t>(init_components,
                                                                  s.data().group_size(j)));
  for (std::size_t k = 0; k < dishes_needed; ++k) s.create_dish();

  for (std::size_t j = 0; j < J; ++j) {
    const std::size_t n = s.data().group_size(j);
    const std::size_t n_tables = std::min<std::size_t>(init_components, n);
    for (std::size_t t = 0; t < n_tables; ++t) s.create_table(j, static_cast<int>(t));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t p = 0; p < n; ++p) s.seat(j, order[p], static_cast<int>(p % n_tables));
  }
  s.updates_since_refresh_ = 0;
  return s;
}

CRFState run_chain(std::shared_ptr<const GroupedDataset> data,
                   const ChainConfig& config, Rng& rng) {
  if (config.sweeps < 0) throw std::invalid_argument("run_chain: sweeps must be >= 0");
  CRFState s = init_state(std::move(data), config.conc, config.prior,
                          config.init_components, rng, config.options);
  for (int it = 1; it <= config.sweeps; ++it) {
    s.sweep(rng);
    if (config.on_sweep) config.on_sweep(it, s.num_dishes());
  }
  return s;
}

}  // namespace cdosr
