#include "roughmle/mle_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roughmle/errors.hpp"
#include "roughmle/fgn_covariance.hpp"

namespace roughmle {

SubsampleSpec SubsampleSpec::make(double alpha, double epsilon, double T) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  SubsampleSpec spec;
  spec.alpha = alpha;
  spec.epsilon = epsilon;
  spec.delta = std::pow(epsilon, alpha);
  spec.N = static_cast<std::size_t>(std::floor(T / spec.delta + 1e-9));
  if (spec.N < 2) {
    std::ostringstream msg;
    msg << "subsampling with delta = " << spec.delta << " leaves N = " << spec.N
        << " < 2 increments on [0, " << T << "]";
    throw ConfigError(msg.str());
  }
  return spec;
}

bool SubsampleSpec::valid_for(HurstParameter H) const {
  const double h = H.value();
  return alpha < std::min(1.0, h / (1.0 - h));
}

std::vector<double> subsample(const PathSample& path, double delta) {
  if (path.size() < 2) throw AlignmentError("path has fewer than two points");
  if (!(delta > 0.0)) throw AlignmentError("subsampling interval must be positive");
  const double h = path.step();
  const double ratio = delta / h;
  const double m_real = std::round(ratio);
  if (m_real < 1.0 || std::fabs(ratio - m_real) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "delta = " << delta << " is not a multiple of the path step " << h;
    throw AlignmentError(msg.str());
  }
  const auto m = static_cast<std::size_t>(m_real);
  std::vector<double> out;
  for (std::size_t k = 0; k < path.size(); k += m) out.push_back(path.values[k]);
  return out;
}

std::vector<double> increments(std::span<const double> v) {
  if (v.size() < 2) throw DomainError("increments need at least two values");
  std::vector<double> d(v.size() - 1);
  for (std::size_t k = 0; k + 1 < v.size(); ++k) d[k] = v[k + 1] - v[k];
  return d;
}

double mle_sigma2_general(std::span<const double> dx, double delta, HurstParameter H) {
  if (dx.empty()) throw DomainError("mle_sigma2 needs at least one increment");
  const auto cov = CovarianceCache::global().get(dx.size(), delta, H);
  return quadratic_form_inverse(*cov, dx) / static_cast<double>(dx.size());
}

EstimateResult mle_sigma2(std::span<const double> dx, double delta, HurstParameter H) {
  if (dx.empty()) throw DomainError("mle_sigma2 needs at least one increment");
  if (!(delta > 0.0)) throw DomainError("mle_sigma2 needs delta > 0");
  EstimateResult r;
  r.N_used = dx.size();
  r.H = H.value();
  r.delta = delta;
  if (H.is_brownian()) {
    double ss = 0.0;
    for (const double v : dx) ss += v * v;
    r.sigma2_hat = ss / (static_cast<double>(dx.size()) * delta);
  } else {
    r.sigma2_hat = mle_sigma2_general(dx, delta, H);
  }
  return r;
}

double realized_delta(double delta, double h) {
  return std::max(1.0, std::round(delta / h)) * h;
}

EstimateResult estimate_from_path(const PathSample& slow, double delta, HurstParameter H) {
  const double h = slow.step();
  const double d = realized_delta(delta, h);
  const auto obs = subsample(slow, d);
  const auto dx = increments(obs);
  return mle_sigma2(dx, d, H);
}

EstimateResult estimate_from_multiscale(const MultiscaleParams& params, const SubsampleSpec& spec,
                                        std::uint64_t seed) {
  const double h = fine_step(params, spec.delta);
  const auto paths = sample_multiscale_on_step(params, h, seed);
  auto r = estimate_from_path(paths.slow, spec.delta, HurstParameter{params.H});
  r.epsilon = params.epsilon;
  r.alpha = spec.alpha;
  return r;
}

}  // namespace roughmle
