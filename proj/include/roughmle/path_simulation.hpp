#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughmle/types.hpp"

namespace roughmle {

enum class PathKind { fbm, fgn, fou, slow };
enum class Scheme { euler, expeuler };

std::string to_string(PathKind kind);
std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct PathMeta {
  std::uint64_t seed = 0;
  double H = 0.5;
  std::optional<double> epsilon;
  double sigma = 1.0;
  PathKind kind = PathKind::fgn;
  std::string scheme = "exact";
};

/// Uniformly timestamped realization. For fgn paths, times[k] is the left
/// end of the k-th increment.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  PathMeta meta;

  std::size_t size() const noexcept { return values.size(); }
  /// Grid step (0 for a single point).
  double step() const noexcept { return times.size() < 2 ? 0.0 : times[1] - times[0]; }
};

/// Counter-based seed splitting (splitmix64 finalizer chained over the words).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words);

/// Exact fGN draw: circulant embedding, Cholesky fallback if the embedding
/// is not nonnegative definite.
PathSample sample_fgn(std::size_t N, double delta, HurstParameter H, std::uint64_t seed);

/// Cumulative sum of sample_fgn with B_0 = 0 (N + 1 points).
PathSample sample_fbm(std::size_t N, double delta, HurstParameter H, std::uint64_t seed);

struct MultiscaleParams {
  double H = 0.5;
  double sigma = 1.0;
  double epsilon = 0.1;
  double T = 1.0;
  double x0 = 0.0;
  int kappa = 50;
  double burn_in_multiple = 10.0;
  Scheme scheme = Scheme::euler;

  /// Throws DomainError / ConfigError on out-of-range fields.
  void validate() const;
};

struct MultiscalePaths {
  PathSample slow;    // X^eps on [0, T]
  PathSample fast;    // Y^eps on [0, T]
  PathSample driver;  // B^H on [0, T], B_0 = 0
  double h = 0.0;
};

/// h = min(eps, out_delta) / kappa.
double fine_step(const MultiscaleParams& params, double out_delta);

/// Number of fine steps in the burn-in window and in [0, T].
std::size_t burn_in_steps(const MultiscaleParams& params, double h);
std::size_t horizon_steps(const MultiscaleParams& params, double h);

/// Fine-grid simulation of the kinetic system on step h = fine_step(params,
/// out_delta). ConfigError if out_delta is not a multiple of h or exceeds T.
MultiscalePaths sample_multiscale(const MultiscaleParams& params, double out_delta,
                                  std::uint64_t seed);

/// Same system on an explicit fine step h.
MultiscalePaths sample_multiscale_on_step(const MultiscaleParams& params, double h,
                                          std::uint64_t seed);

/// Deterministic integrator given the fBm increments of the whole window
/// (burn-in first, then [0, T]); length must be burn_in_steps + horizon_steps.
MultiscalePaths simulate_multiscale_from_driver(const MultiscaleParams& params, double h,
                                                std::span<const double> increments,
                                                std::uint64_t seed = 0);

/// sup_t |X_t - x0 - sigma B_t| over the fine grid of one seed (h = eps / kappa).
struct SupErrorSample {
  double sup_abs = 0.0;
  std::vector<double> pointwise;  // |X_t - x0 - sigma B_t| at every fine node
};
SupErrorSample homogenization_sup_error(const MultiscaleParams& params, std::uint64_t seed);

struct HomogenizationError {
  double eps = 0.0;
  double mean_sup_error = 0.0;
  double se = 0.0;
  /// sup_t sqrt(E|X_t - x0 - sigma B_t|^2), the quantity the homogenization limit bounds.
  double sup_rms_error = 0.0;
  std::vector<double> per_seed;
};

/// Monte Carlo estimate over >= 30 seeds, same driver for both paths.
HomogenizationError homogenization_error(const MultiscaleParams& params,
                                         std::span<const std::uint64_t> seeds);

}  // namespace roughmle
