#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "roughmle/path_simulation.hpp"
#include "roughmle/types.hpp"

namespace roughmle {

/// Observation design delta = eps^alpha, N = floor(T / delta).
struct SubsampleSpec {
  double alpha = 0.5;
  double epsilon = 0.1;
  double delta = 0.0;
  std::size_t N = 0;

  /// ConfigError if N < 2.
  static SubsampleSpec make(double alpha, double epsilon, double T);

  /// alpha < min{1, H / (1 - H)}: the region where consistency is proven.
  bool valid_for(HurstParameter H) const;
};

struct EstimateResult {
  double sigma2_hat = 0.0;
  std::size_t N_used = 0;
  double H = 0.5;
  double delta = 0.0;
  std::optional<double> epsilon;
  std::optional<double> alpha;
};

/// Values at indices 0, m, 2m, ... with m = delta / step; floor(T / delta) + 1
/// points. AlignmentError if delta is not a multiple of the path step.
std::vector<double> subsample(const PathSample& path, double delta);

std::vector<double> increments(std::span<const double> v);

/// sigma2_hat = dx^T P^{-1} dx / N with P the fGN covariance on spacing delta.
EstimateResult mle_sigma2(std::span<const double> dx, double delta, HurstParameter H);

/// The general Cholesky route, bypassing the H = 1/2 shortcut.
double mle_sigma2_general(std::span<const double> dx, double delta, HurstParameter H);

/// Fine step used when estimating at spacing delta: min(eps, delta) / kappa.
/// The realized spacing is the nearest positive multiple of it.
double realized_delta(double delta, double h);

/// sample_multiscale -> subsample -> increments -> mle_sigma2, with the
/// realized delta on the fine grid.
EstimateResult estimate_from_multiscale(const MultiscaleParams& params, const SubsampleSpec& spec,
                                        std::uint64_t seed);

/// Estimates from one already-simulated slow path at spacing delta (rounded to
/// the nearest multiple of the path step).
EstimateResult estimate_from_path(const PathSample& slow, double delta, HurstParameter H);

}  // namespace roughmle
