#include "roughmle/path_simulation.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "roughmle/errors.hpp"
#include "roughmle/fgn_covariance.hpp"

namespace roughmle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> uniform_times(std::size_t count, double step) {
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) t[k] = static_cast<double>(k) * step;
  return t;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> fgn_cholesky(std::size_t N, double delta, HurstParameter H,
                                 std::mt19937_64& rng) {
  const auto cov = build_covariance(GridSpec::from_spacing(delta, N), H);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(static_cast<Eigen::Index>(N));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  const Eigen::VectorXd x = cov.cholesky().triangularView<Eigen::Lower>() * z;
  return {x.data(), x.data() + x.size()};
}

// Davies-Harte: with lambda the spectrum of the circulant embedding and W
// complex standard normal, Re FFT(sqrt(lambda / M) W) has the fGN law.
std::vector<double> fgn_values(std::size_t N, double delta, HurstParameter H,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (H.is_brownian()) {
    std::normal_distribution<double> normal(0.0, std::sqrt(delta));
    std::vector<double> x(N);
    for (auto& v : x) v = normal(rng);
    return x;
  }
  if (N == 1) return fgn_cholesky(N, delta, H, rng);

  const std::size_t K = next_pow2(N - 1);
  const std::size_t M = 2 * K;
  std::vector<std::complex<double>> c(M);
  for (std::size_t k = 0; k <= K; ++k) c[k] = fgn_autocovariance(k, delta, H);
  for (std::size_t k = K + 1; k < M; ++k) c[k] = c[M - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> lambda;
  fft.fwd(lambda, c);
  double largest = 0.0;
  for (const auto& l : lambda) largest = std::max(largest, l.real());
  for (const auto& l : lambda) {
    if (l.real() < -1e-12 * largest) return fgn_cholesky(N, delta, H, rng);
  }

  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> w(M);
  for (std::size_t k = 0; k < M; ++k) {
    const double scale = std::sqrt(std::max(lambda[k].real(), 0.0) / static_cast<double>(M));
    const double re = normal(rng);
    const double im = normal(rng);
    w[k] = scale * std::complex<double>(re, im);
  }
  std::vector<std::complex<double>> z;
  fft.fwd(z, w);
  std::vector<double> x(N);
  for (std::size_t k = 0; k < N; ++k) x[k] = z[k].real();
  return x;
}

}  // namespace

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::fbm: return "fbm";
    case PathKind::fgn: return "fgn";
    case PathKind::fou: return "fou";
    case PathKind::slow: return "slow";
  }
  return "unknown";
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::euler ? "euler" : "expeuler";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "expeuler") return Scheme::expeuler;
  throw ConfigError("unknown scheme '" + name + "' (expected euler or expeuler)");
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
  std::uint64_t state = splitmix64(base);
  for (const auto w : words) state = splitmix64(state ^ splitmix64(w));
  return state;
}

PathSample sample_fgn(std::size_t N, double delta, HurstParameter H, std::uint64_t seed) {
  if (N == 0) throw DomainError("sample_fgn needs N >= 1");
  if (!(delta > 0.0)) throw DomainError("sample_fgn needs delta > 0");
  PathSample out;
  out.values = fgn_values(N, delta, H, seed);
  out.times = uniform_times(N, delta);
  out.meta = PathMeta{seed, H.value(), std::nullopt, 1.0, PathKind::fgn, "exact"};
  return out;
}

PathSample sample_fbm(std::size_t N, double delta, HurstParameter H, std::uint64_t seed) {
  PathSample noise = sample_fgn(N, delta, H, seed);
  PathSample out;
  out.values.resize(N + 1);
  out.values[0] = 0.0;
  for (std::size_t k = 0; k < N; ++k) out.values[k + 1] = out.values[k] + noise.values[k];
  out.times = uniform_times(N + 1, delta);
  out.meta = noise.meta;
  out.meta.kind = PathKind::fbm;
  return out;
}

void MultiscaleParams::validate() const {
  (void)HurstParameter{H};
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
  if (!std::isfinite(x0)) throw DomainError("x0 must be finite");
  if (kappa < 1) throw ConfigError("kappa must be a positive integer");
  if (!(burn_in_multiple >= 0.0)) throw ConfigError("burn_in_multiple must be >= 0");
}

double fine_step(const MultiscaleParams& params, double out_delta) {
  if (!(out_delta > 0.0)) throw ConfigError("output spacing must be positive");
  return std::min(params.epsilon, out_delta) / static_cast<double>(params.kappa);
}

std::size_t burn_in_steps(const MultiscaleParams& params, double h) {
  return static_cast<std::size_t>(std::ceil(params.burn_in_multiple * params.epsilon / h - 1e-9));
}

std::size_t horizon_steps(const MultiscaleParams& params, double h) {
  return static_cast<std::size_t>(std::floor(params.T / h + 1e-9));
}

MultiscalePaths sample_multiscale(const MultiscaleParams& params, double out_delta,
                                  std::uint64_t seed) {
  params.validate();
  if (out_delta > params.T * (1.0 + 1e-9)) throw ConfigError("output spacing exceeds T");
  const double h = fine_step(params, out_delta);
  const double ratio = out_delta / h;
  if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "output spacing " << out_delta << " is not a multiple of the fine step " << h;
    throw ConfigError(msg.str());
  }
  return sample_multiscale_on_step(params, h, seed);
}

MultiscalePaths sample_multiscale_on_step(const MultiscaleParams& params, double h,
                                          std::uint64_t seed) {
  params.validate();
  if (!(h > 0.0)) throw ConfigError("fine step must be positive");
  const std::size_t total = burn_in_steps(params, h) + horizon_steps(params, h);
  if (total == 0) throw ConfigError("fine grid is empty");
  const auto noise = fgn_values(total, h, HurstParameter{params.H}, seed);
  return simulate_multiscale_from_driver(params, h, noise, seed);
}

MultiscalePaths simulate_multiscale_from_driver(const MultiscaleParams& params, double h,
                                                std::span<const double> increments,
                                                std::uint64_t seed) {
  params.validate();
  const double ratio = h / params.epsilon;
  if (params.scheme == Scheme::euler && ratio > 0.5) {
    std::ostringstream msg;
    msg << "explicit Euler unstable: h / eps = " << ratio << " > 0.5";
    throw StabilityError(msg.str());
  }
  const std::size_t burn = burn_in_steps(params, h);
  const std::size_t n = horizon_steps(params, h);
  if (n == 0) throw ConfigError("fine step exceeds T");
  if (increments.size() != burn + n) {
    throw ConfigError("driver length does not match burn-in plus horizon steps");
  }

  const double noise_scale = params.sigma / std::pow(params.epsilon, params.H);
  double decay = 1.0 - ratio;
  double gain = noise_scale;
  if (params.scheme == Scheme::expeuler) {
    decay = std::exp(-ratio);
    gain = noise_scale * std::exp(-0.5 * ratio);
  }

  double y = 0.0;
  for (std::size_t k = 0; k < burn; ++k) y = decay * y + gain * increments[k];

  MultiscalePaths out;
  out.h = h;
  auto& fast = out.fast.values;
  auto& slow = out.slow.values;
  auto& driver = out.driver.values;
  fast.resize(n + 1);
  slow.resize(n + 1);
  driver.resize(n + 1);
  fast[0] = y;
  slow[0] = params.x0;
  driver[0] = 0.0;

  const double slow_scale = std::pow(params.epsilon, params.H - 1.0) * 0.5 * h;
  double area = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double db = increments[burn + k];
    fast[k + 1] = decay * fast[k] + gain * db;
    area += fast[k] + fast[k + 1];
    slow[k + 1] = params.x0 + slow_scale * area;
    driver[k + 1] = driver[k] + db;
  }

  const auto times = uniform_times(n + 1, h);
  const PathMeta meta{seed, params.H, params.epsilon, params.sigma, PathKind::slow,
                      to_string(params.scheme)};
  out.slow.times = times;
  out.slow.meta = meta;
  out.fast.times = times;
  out.fast.meta = meta;
  out.fast.meta.kind = PathKind::fou;
  out.driver.times = times;
  out.driver.meta = meta;
  out.driver.meta.kind = PathKind::fbm;
  out.driver.meta.sigma = 1.0;
  return out;
}

SupErrorSample homogenization_sup_error(const MultiscaleParams& params, std::uint64_t seed) {
  const auto paths = sample_multiscale(params, params.epsilon, seed);
  SupErrorSample out;
  out.pointwise.resize(paths.slow.size());
  for (std::size_t k = 0; k < paths.slow.size(); ++k) {
    const double err = std::fabs(paths.slow.values[k] - params.x0 -
                                 params.sigma * paths.driver.values[k]);
    out.pointwise[k] = err;
    out.sup_abs = std::max(out.sup_abs, err);
  }
  return out;
}

HomogenizationError homogenization_error(const MultiscaleParams& params,
                                         std::span<const std::uint64_t> seeds) {
  if (seeds.size() < 30) throw ConfigError("homogenization_error needs at least 30 seeds");
  HomogenizationError out;
  out.eps = params.epsilon;
  std::vector<double> sum_sq;
  for (const auto seed : seeds) {
    auto sample = homogenization_sup_error(params, seed);
    out.per_seed.push_back(sample.sup_abs);
    if (sum_sq.empty()) sum_sq.assign(sample.pointwise.size(), 0.0);
    for (std::size_t k = 0; k < sum_sq.size(); ++k) {
      sum_sq[k] += sample.pointwise[k] * sample.pointwise[k];
    }
  }
  const auto m = static_cast<double>(seeds.size());
  double mean = 0.0;
  for (const double v : out.per_seed) mean += v;
  mean /= m;
  double ss = 0.0;
  for (const double v : out.per_seed) ss += (v - mean) * (v - mean);
  out.mean_sup_error = mean;
  out.se = std::sqrt(ss / (m - 1.0) / m);
  double peak = 0.0;
  for (const double s : sum_sq) peak = std::max(peak, s / m);
  out.sup_rms_error = std::sqrt(peak);
  return out;
}

}  // namespace roughmle
