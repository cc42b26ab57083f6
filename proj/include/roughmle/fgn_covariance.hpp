#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "roughmle/types.hpp"

namespace roughmle {

/// Covariance of two fGN increments `lag` cells apart on a grid of spacing
/// `delta`: 1/2 delta^{2H} [(n+1)^{2H} + (n-1)^{2H} - 2 n^{2H}].
double fgn_autocovariance(std::size_t lag, double delta, HurstParameter H);

/// E[B_t B_s] = 1/2 (t^{2H} + s^{2H} - |t - s|^{2H}).
double fbm_covariance(double t, double s, HurstParameter H);

/// Symmetric Toeplitz covariance P of the fGN increment vector on a grid.
///
/// Immutable after construction. The Cholesky factor is computed on first use
/// behind a once-only guard, so a single instance can be shared read-only
/// between threads.
class FgnCovariance {
 public:
  FgnCovariance(GridSpec grid, HurstParameter H);
  ~FgnCovariance();
  FgnCovariance(FgnCovariance&&) noexcept;
  FgnCovariance& operator=(FgnCovariance&&) noexcept;

  const GridSpec& grid() const noexcept { return grid_; }
  HurstParameter hurst() const noexcept { return H_; }
  std::size_t size() const noexcept { return grid_.N; }
  std::span<const double> first_row() const noexcept { return first_row_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return first_row_[i > j ? i - j : j - i];
  }

  Eigen::MatrixXd dense() const;

  /// Lower-triangular L with P = L L^T. Throws FactorizationFailure.
  const Eigen::MatrixXd& cholesky() const;

  /// Solves L y = v (forward substitution against the cached factor).
  Eigen::VectorXd whiten(std::span<const double> v) const;

 private:
  struct Factor;

  GridSpec grid_;
  HurstParameter H_;
  std::vector<double> first_row_;
  std::unique_ptr<Factor> factor_;
};

FgnCovariance build_covariance(GridSpec grid, HurstParameter H);

/// v^T P^{-1} v via one triangular solve against the cached factor.
double quadratic_form_inverse(const FgnCovariance& cov, std::span<const double> v);

struct EigenOptions {
  /// Above this size the dense eigensolver is replaced by shifted inverse
  /// iteration on the Cholesky factor.
  std::size_t dense_limit = 2048;
  double rel_tol = 1e-10;
  int max_iterations = 10000;
};

double smallest_eigenvalue(const FgnCovariance& cov, const EigenOptions& opts = {});

/// ||P^{-1}||_2 = 1 / lambda_min(P).
double inverse_spectral_norm(const FgnCovariance& cov, const EigenOptions& opts = {});

/// beta = max{1, 2H}.
double spectral_bound_exponent(HurstParameter H);

/// ||(P^{(n)})^{-1}||_2 / n^beta on the unit interval (delta = 1/n).
double bound_ratio(std::size_t n, HurstParameter H, const EigenOptions& opts = {});

/// Read-mostly memo of covariance objects keyed by (N, delta, H).
///
/// Lookups take a shared lock; insertion takes the exclusive lock. Entries
/// are never evicted once inserted, insertion stops at `capacity`.
class CovarianceCache {
 public:
  explicit CovarianceCache(std::size_t capacity = 512);
  ~CovarianceCache();

  std::shared_ptr<const FgnCovariance> get(std::size_t N, double delta, HurstParameter H);
  std::size_t size() const;

  static CovarianceCache& global();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace roughmle
