#include "roughmle/fgn_covariance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <tuple>

#include "roughmle/errors.hpp"

namespace roughmle {

namespace {

// (n+1)^p + (n-1)^p - 2 n^p. The direct form loses ~log10(n^2) digits to
// cancellation, so from lag 32 on use n^p * 2 sum_k C(p, 2k) n^{-2k}.
long double second_difference(std::size_t n, long double p) {
  const auto nl = static_cast<long double>(n);
  if (n < 32) {
    const long double below = n == 0 ? 1.0L : std::pow(nl - 1.0L, p);
    return std::pow(nl + 1.0L, p) + below - 2.0L * std::pow(nl, p);
  }
  const long double x = 1.0L / nl;
  long double binom = 1.0L;
  long double xpow = 1.0L;
  long double sum = 0.0L;
  for (int m = 1; m <= 80; ++m) {
    binom *= (p - static_cast<long double>(m - 1)) / static_cast<long double>(m);
    xpow *= x;
    if (m % 2 == 1) continue;
    const long double term = 2.0L * binom * xpow;
    sum += term;
    if (std::fabs(term) <= 1e-22L * std::fabs(sum)) break;
  }
  return std::pow(nl, p) * sum;
}

bool cholesky_succeeds(const Eigen::MatrixXd& P, double shift,
                       Eigen::LLT<Eigen::MatrixXd>* out = nullptr) {
  Eigen::MatrixXd shifted = P;
  shifted.diagonal().array() -= shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) return false;
  if (out != nullptr) *out = std::move(llt);
  return true;
}

double smallest_eigenvalue_dense(const FgnCovariance& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("symmetric eigensolver did not converge",
                             std::numeric_limits<double>::quiet_NaN());
  }
  const double lambda = solver.eigenvalues()(0);
  if (!(lambda > 0.0)) {
    std::ostringstream msg;
    msg << "covariance is numerically indefinite (lambda_min = " << lambda << ")";
    throw FactorizationFailure(msg.str());
  }
  return lambda;
}

// Shifted inverse iteration. A successful Cholesky of P - mu I proves
// mu < lambda_min, which both certifies the final answer and supplies shifts
// that keep the iteration pinned to the bottom of the spectrum.
double smallest_eigenvalue_iterative(const FgnCovariance& cov, const EigenOptions& opts) {
  const Eigen::MatrixXd P = cov.dense();
  const Eigen::Index n = P.rows();
  const auto& L = cov.cholesky();

  std::mt19937_64 rng(0x5eedf00dULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
  x.normalize();

  Eigen::LLT<Eigen::MatrixXd> shifted;
  double shift = 0.0;
  bool use_shift = false;

  double rho = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  const double tol = opts.rel_tol;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::VectorXd y;
    if (use_shift) {
      y = shifted.solve(x);
    } else {
      y = L.triangularView<Eigen::Lower>().solve(x);
      L.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
    }
    x = y.normalized();
    const Eigen::VectorXd Px = P * x;
    const double rho_prev = rho;
    rho = x.dot(Px);
    residual = (Px - rho * x).norm();

    const bool stalled = std::fabs(rho - rho_prev) <= 1e-2 * tol * rho;
    if (!stalled && residual > tol * rho && it % 200 != 0) continue;

    if (cholesky_succeeds(P, rho * (1.0 - tol))) return rho;

    // lambda_min < rho (1 - tol): move the shift closer from below.
    double theta = std::max(2.0 * residual, tol * rho);
    while (true) {
      const double mu = rho - theta;
      if (mu <= shift) break;
      if (cholesky_succeeds(P, mu, &shifted)) {
        shift = mu;
        use_shift = true;
        break;
      }
      theta *= 4.0;
    }
  }
  std::ostringstream msg;
  msg << "inverse iteration for lambda_min did not converge in " << opts.max_iterations
      << " iterations (residual " << residual << ")";
  throw ConvergenceFailure(msg.str(), residual);
}

}  // namespace

double fgn_autocovariance(std::size_t lag, double delta, HurstParameter H) {
  if (H.is_brownian()) return lag == 0 ? delta : 0.0;
  const long double p = 2.0L * H.value();
  const long double scale = std::pow(static_cast<long double>(delta), p);
  if (lag == 0) return static_cast<double>(scale);
  return static_cast<double>(0.5L * scale * second_difference(lag, p));
}

double fbm_covariance(double t, double s, HurstParameter H) {
  const double p = 2.0 * H.value();
  return 0.5 * (std::pow(t, p) + std::pow(s, p) - std::pow(std::fabs(t - s), p));
}

struct FgnCovariance::Factor {
  std::once_flag once;
  Eigen::MatrixXd lower;
};

FgnCovariance::FgnCovariance(GridSpec grid, HurstParameter H)
    : grid_(grid), H_(H), first_row_(grid.N), factor_(std::make_unique<Factor>()) {
  for (std::size_t k = 0; k < grid_.N; ++k) {
    first_row_[k] = fgn_autocovariance(k, grid_.delta, H_);
  }
}

FgnCovariance::~FgnCovariance() = default;
FgnCovariance::FgnCovariance(FgnCovariance&&) noexcept = default;
FgnCovariance& FgnCovariance::operator=(FgnCovariance&&) noexcept = default;

Eigen::MatrixXd FgnCovariance::dense() const {
  const auto n = static_cast<Eigen::Index>(grid_.N);
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      P(i, j) = first_row_[static_cast<std::size_t>(i > j ? i - j : j - i)];
    }
  }
  return P;
}

const Eigen::MatrixXd& FgnCovariance::cholesky() const {
  std::call_once(factor_->once, [this] {
    Eigen::LLT<Eigen::MatrixXd> llt(dense());
    if (llt.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "Cholesky factorization of the fGN covariance failed (N = " << grid_.N
          << ", H = " << H_.value() << ", delta = " << grid_.delta << ")";
      throw FactorizationFailure(msg.str());
    }
    factor_->lower = llt.matrixL();
  });
  return factor_->lower;
}

Eigen::VectorXd FgnCovariance::whiten(std::span<const double> v) const {
  if (v.size() != grid_.N) {
    throw DomainError("vector length does not match covariance size");
  }
  const auto& L = cholesky();
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  L.triangularView<Eigen::Lower>().solveInPlace(y);
  return y;
}

FgnCovariance build_covariance(GridSpec grid, HurstParameter H) {
  return FgnCovariance(grid, H);
}

double quadratic_form_inverse(const FgnCovariance& cov, std::span<const double> v) {
  return cov.whiten(v).squaredNorm();
}

double smallest_eigenvalue(const FgnCovariance& cov, const EigenOptions& opts) {
  if (cov.hurst().is_brownian() || cov.size() == 1) return cov.first_row()[0];
  if (cov.size() <= opts.dense_limit) return smallest_eigenvalue_dense(cov);
  return smallest_eigenvalue_iterative(cov, opts);
}

double inverse_spectral_norm(const FgnCovariance& cov, const EigenOptions& opts) {
  return 1.0 / smallest_eigenvalue(cov, opts);
}

double spectral_bound_exponent(HurstParameter H) {
  return std::max(1.0, 2.0 * H.value());
}

double bound_ratio(std::size_t n, HurstParameter H, const EigenOptions& opts) {
  const auto cov = build_covariance(GridSpec::unit(n), H);
  return inverse_spectral_norm(cov, opts) /
         std::pow(static_cast<double>(n), spectral_bound_exponent(H));
}

struct CovarianceCache::Impl {
  using Key = std::tuple<std::size_t, std::uint64_t, std::uint64_t>;
  std::size_t capacity;
  mutable std::shared_mutex mutex;
  std::map<Key, std::shared_ptr<const FgnCovariance>> entries;
};

CovarianceCache::CovarianceCache(std::size_t capacity) : impl_(std::make_unique<Impl>()) {
  impl_->capacity = capacity;
}

CovarianceCache::~CovarianceCache() = default;

std::shared_ptr<const FgnCovariance> CovarianceCache::get(std::size_t N, double delta,
                                                          HurstParameter H) {
  const Impl::Key key{N, std::bit_cast<std::uint64_t>(delta),
                      std::bit_cast<std::uint64_t>(H.value())};
  {
    std::shared_lock lock(impl_->mutex);
    if (auto it = impl_->entries.find(key); it != impl_->entries.end()) return it->second;
  }
  auto fresh = std::make_shared<const FgnCovariance>(GridSpec::from_spacing(delta, N), H);
  std::unique_lock lock(impl_->mutex);
  if (auto it = impl_->entries.find(key); it != impl_->entries.end()) return it->second;
  if (impl_->entries.size() < impl_->capacity) impl_->entries.emplace(key, fresh);
  return fresh;
}

std::size_t CovarianceCache::size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->entries.size();
}

CovarianceCache& CovarianceCache::global() {
  static CovarianceCache cache;
  return cache;
}

}  // namespace roughmle
