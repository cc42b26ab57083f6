#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughmle/path_simulation.hpp"

namespace roughmle {

enum class ExperimentKind { spectral_norm, noconvergence, l2_heatmap, homogenization };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::spectral_norm;
  std::vector<double> H;
  std::vector<double> epsilon;
  std::vector<double> alpha;
  std::vector<std::size_t> n;
  /// noconvergence: delta = eps * 2^{-k} for each k (in addition to alpha).
  std::vector<int> delta_halvings;
  std::size_t M = 100;
  double sigma = 1.0;
  double T = 1.0;
  std::uint64_t seed_base = 0;
  /// 0 means auto (ROUGHMLE_THREADS, else the hardware concurrency).
  std::size_t parallelism = 0;
  int kappa = 50;
  double burn_in_multiple = 10.0;
  Scheme scheme = Scheme::euler;
  double x0 = 0.0;

  /// ConfigError when a list required by the experiment is empty or M < 2.
  void validate() const;
};

/// One CSV row. Absent fields are written as empty cells.
struct ExperimentRow {
  std::string experiment;
  double H = 0.0;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<std::size_t> n;
  std::optional<std::size_t> M;
  std::string stat;
  double value = 0.0;
  std::optional<double> se;
  std::uint64_t seed_base = 0;
  /// Per-replicate inputs of the statistic, kept for SE recomputation.
  std::vector<double> replicates;
};

double sample_mean(std::span<const double> v);
/// Standard deviation / sqrt(M).
double standard_error(std::span<const double> v);
/// sqrt(mean of e_r^2) over replicates e_r.
double rms(std::span<const double> v);
/// Leave-one-out jackknife standard error of rms().
double jackknife_rms_se(std::span<const double> v);
/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Recomputes a row's SE from its stored replicates (mean_* stats use the
/// plain SE, rms_* stats the jackknife). Empty if the row has no SE.
std::optional<double> recompute_se(const ExperimentRow& row);

/// Worker count after applying ROUGHMLE_THREADS.
std::size_t resolve_parallelism(std::size_t requested);

std::vector<ExperimentRow> run_spectral_norm(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_noconvergence(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_l2_heatmap(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_homogenization(const ExperimentConfig& cfg);
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

/// Replicate seed from (seed_base, experiment, cell key, replicate index).
std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::span<const double> cell_key,
                             std::size_t replicate);

}  // namespace roughmle
