// Apache License, Version 2.0, refer to LICENSE.txt

// Run configuration for the command-line front end. Files are INI-style:
//
//   [data]    path, omega, standardize, pca_retain
//   [hdp]     gamma, alpha0, gamma_shape, gamma_rate, alpha0_shape,
//             alpha0_rate, resample_concentrations, init_components,
//             sweeps, parallel_scoring
//   [prior]   beta, nu_offset, varsigma
//   [cdosr]   epsilon
//   [study]   repeats, unknown_counts, unknown_count, fractions, eps_grid,
//             nu_grid, varsigma_grid, parallel_jobs
//   [output]  dir
//   [run]     seed
//
// Lists are comma-separated. Precedence: file, then the CDOSR_SEED
// environment variable (root seed only), then command-line flags.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdosr/report.hpp"
#include "cdosr/studies.hpp"

namespace cdosr {

enum class StudyKind { kFit, kSweep, kBatch, kEpsilon, kDiscover, kReport };

std::string to_string(StudyKind kind);
StudyKind parse_study_kind(const std::string& name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  StudyKind kind = StudyKind::kDiscover;
  std::filesystem::path dataset;
  std::filesystem::path output_dir = ".";
  std::filesystem::path input;  // artifact for `report`
  StudyOptions study;
  std::vector<int> unknown_counts = {0};
  int unknown_count = -1;  // -1: every class left out of training
  std::vector<double> fractions = default_batch_fractions();
  std::vector<double> eps_grid = default_epsilon_grid();
  std::vector<double> nu_grid = default_nu_offset_grid();
  std::vector<double> varsigma_grid = default_varsigma_grid();
  bool verbose = false;

  // Throws ConfigError when a referenced path is missing or a field is out
  // of range.
  void validate() const;
  // Every resolved setting, for embedding in artifacts.
  ConfigEcho echo() const;
};

// Applies the settings in an INI file on top of `base`. Throws ConfigError
// on unreadable files, unknown keys or malformed values.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace cdosr
