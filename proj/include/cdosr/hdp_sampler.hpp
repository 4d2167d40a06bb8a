// Apache License, Version 2.0, refer to LICENSE.txt

// Collapsed Chinese-restaurant-franchise Gibbs sampler for a hierarchical
// Dirichlet process mixture with Normal-Wishart components.
//
// Vocabulary: each group is a restaurant, each point a customer sitting at
// a table, and each table serves one dish (a mixture component shared
// across groups). Component parameters are integrated out; the sampler
// moves only the seating t(j,i) and the menu k(j,t).

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdosr/grouped_dataset.hpp"
#include "cdosr/kernels.hpp"
#include "cdosr/normal_wishart.hpp"
#include "cdosr/random.hpp"

namespace cdosr {

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

struct HDPConcentrations {
  double gamma = 100.0;  // top-level (new dish) concentration
  double alpha0 = 10.0;  // group-level (new table) concentration
  GammaPrior gamma_prior{100.0, 1.0};
  GammaPrior alpha0_prior{10.0, 1.0};

  void validate() const;
};

enum class ConcentrationMode { kPriorMean, kDraw };

// Returns (gamma, alpha0): the prior means, or one draw from each prior.
std::pair<double, double> draw_concentrations(const HDPConcentrations& conc,
                                              ConcentrationMode mode, Rng& rng);

// kConstant replaces every component density by 1, which reduces the
// conditionals to the bare franchise process. Used for testing.
enum class Likelihood { kNormalWishart, kConstant };

struct SamplerOptions {
  Likelihood likelihood = Likelihood::kNormalWishart;
  Execution execution = Execution::kSerial;
  // Redraw gamma and alpha0 from their priors after every sweep.
  bool resample_concentrations = false;
  // Sufficient statistics are rebuilt from scratch after this many updates.
  long refresh_interval = 10000;
};

class CRFState {
 public:
  CRFState(std::shared_ptr<const GroupedDataset> data, HDPConcentrations conc,
           NormalWishartParams prior, SamplerOptions options = {});

  const GroupedDataset& data() const { return *data_; }
  const HDPConcentrations& concentrations() const { return conc_; }
  HDPConcentrations& concentrations() { return conc_; }
  const NormalWishartParams& prior() const { return prior_; }
  const SamplerOptions& options() const { return options_; }

  std::size_t num_groups() const { return data_->num_groups(); }
  int num_dishes() const { return num_dishes_; }
  int num_tables() const { return num_tables_; }

  auto point(std::size_t j, std::size_t i) const { return data_->groups[j].col(i); }

  int table_of(std::size_t j, std::size_t i) const { return seating_[j][i]; }
  int dish_of(std::size_t j, std::size_t i) const {
    return tables_[j][seating_[j][i]].dish;
  }

  std::size_t table_capacity(std::size_t j) const { return tables_[j].size(); }
  bool table_live(std::size_t j, std::size_t t) const { return tables_[j][t].size > 0; }
  int table_size(std::size_t j, std::size_t t) const { return tables_[j][t].size; }
  int table_dish(std::size_t j, std::size_t t) const { return tables_[j][t].dish; }

  std::size_t dish_capacity() const { return dishes_.size(); }
  bool dish_live(std::size_t k) const { return dishes_[k].tables > 0; }
  // m_.k: tables serving dish k across all groups.
  int dish_tables(std::size_t k) const { return dishes_[k].tables; }
  // m_jk: tables in group j serving dish k.
  int group_dish_tables(std::size_t j, std::size_t k) const {
    return group_dish_tables_[j][k];
  }
  const GaussianSuffStats& dish_stats(std::size_t k) const { return dishes_[k].stats; }
  std::vector<int> live_dishes() const;

  // Log prior weights for the dish of a fresh table, one per dish slot
  // (log m_.k/(m_..+gamma), -inf for dead slots) followed by the new-dish
  // weight log gamma/(m_..+gamma).
  std::vector<double> dish_prior_log_weights() const;

  // Reseats point (j, i) given all other assignments.
  void sample_table(std::size_t j, std::size_t i, Rng& rng);
  // Redraws the dish of live table (j, t) given all other assignments.
  void sample_dish(std::size_t j, std::size_t t, Rng& rng);
  // All points in scan order, then all live tables in scan order.
  void sweep(Rng& rng);

  // Rebuilds table and dish statistics from the raw points.
  void refresh_statistics();

  // Empty when every count and statistic is consistent with the seating.
  std::vector<std::string> check_invariants(double tol = 1e-9) const;

 private:
  struct Table {
    int dish = -1;
    int size = 0;
    GaussianSuffStats stats;
  };
  struct Dish {
    int tables = 0;
    GaussianSuffStats stats;
    std::optional<NormalWishartPosterior> posterior;
  };

  friend CRFState init_state(std::shared_ptr<const GroupedDataset>,
                             HDPConcentrations, NormalWishartParams, int, Rng&,
                             SamplerOptions);

  int create_dish();
  void delete_dish(int k);
  int create_table(std::size_t j, int dish);
  void delete_table(std::size_t j, int t);
  void seat(std::size_t j, std::size_t i, int t);
  void unseat(std::size_t j, std::size_t i);
  void attach_table(std::size_t j, int t, int dish);
  void detach_table(std::size_t j, int t);
  void touch_dish(int k);
  void prepare_posteriors();
  void note_updates(long n);

  std::shared_ptr<const GroupedDataset> data_;
  HDPConcentrations conc_;
  NormalWishartParams prior_;
  SamplerOptions options_;
  NormalWishartPosterior prior_posterior_;

  std::vector<std::vector<int>> seating_;
  std::vector<std::vector<Table>> tables_;
  std::vector<std::vector<int>> free_tables_;
  std::vector<Dish> dishes_;
  std::vector<int> free_dishes_;
  std::vector<std::vector<int>> group_dish_tables_;
  int num_dishes_ = 0;
  int num_tables_ = 0;
  long updates_since_refresh_ = 0;

  std::vector<const NormalWishartPosterior*> scratch_components_;
  std::vector<double> scratch_scores_;
  std::vector<double> scratch_weights_;
  std::vector<int> scratch_choices_;
};

// Seats every point of every group: within group j the points are shuffled
// and dealt round-robin onto min(init_components, n_j) tables, table t
// serving shared dish t. Throws std::invalid_argument on empty groups.
CRFState init_state(std::shared_ptr<const GroupedDataset> data,
                    HDPConcentrations conc, NormalWishartParams prior,
                    int init_components, Rng& rng, SamplerOptions options = {});

inline void sample_table(CRFState& s, std::size_t j, std::size_t i, Rng& rng) {
  s.sample_table(j, i, rng);
}
inline void sample_dish(CRFState& s, std::size_t j, std::size_t t, Rng& rng) {
  s.sample_dish(j, t, rng);
}
inline void gibbs_sweep(CRFState& s, Rng& rng) { s.sweep(rng); }

struct ChainConfig {
  HDPConcentrations conc;
  NormalWishartParams prior;
  int init_components = 30;
  int sweeps = 30;
  SamplerOptions options;
  // Called after each sweep with (sweep index starting at 1, live dishes).
  std::function<void(int, int)> on_sweep;
};

// init_state followed by `sweeps` Gibbs sweeps; returns the final state.
CRFState run_chain(std::shared_ptr<const GroupedDataset> data,
                   const ChainConfig& config, Rng& rng);

}  // namespace cdosr
