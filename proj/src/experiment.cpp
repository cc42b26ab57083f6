#include "roughmle/experiment.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "roughmle/errors.hpp"
#include "roughmle/fgn_covariance.hpp"
#include "roughmle/mle_estimator.hpp"

namespace roughmle {

namespace {

constexpr std::size_t kRmsNodes = 2000;

template <typename Fn>
void parallel_indexed(std::size_t count, std::size_t parallelism, Fn&& fn) {
  // Lift the default hardware cap so an explicit worker count is honoured
  // even on machines with fewer cores.
  tbb::global_control cap(tbb::global_control::max_allowed_parallelism, parallelism);
  tbb::task_arena arena(static_cast<int>(parallelism));
  arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, 1),
                      [&](const tbb::blocked_range<std::size_t>& range) {
                        for (std::size_t i = range.begin(); i != range.end(); ++i) fn(i);
                      });
  });
}

MultiscaleParams multiscale_params(const ExperimentConfig& cfg, double H, double eps) {
  MultiscaleParams p;
  p.H = H;
  p.sigma = cfg.sigma;
  p.epsilon = eps;
  p.T = cfg.T;
  p.x0 = cfg.x0;
  p.kappa = cfg.kappa;
  p.burn_in_multiple = cfg.burn_in_multiple;
  p.scheme = cfg.scheme;
  return p;
}

struct Design {
  double delta_nominal;
  double alpha_nominal;
};

// Fine-grid realization shared by every design point of one (H, eps) cell.
struct CellGrid {
  double h = 0.0;
  std::vector<double> deltas;  // realized
  std::vector<std::size_t> N;
};

CellGrid cell_grid(const MultiscaleParams& p, const std::vector<Design>& designs) {
  double smallest = designs.front().delta_nominal;
  for (const auto& d : designs) smallest = std::min(smallest, d.delta_nominal);
  CellGrid g;
  g.h = fine_step(p, smallest);
  const std::size_t steps = horizon_steps(p, g.h);
  for (const auto& d : designs) {
    const double delta = realized_delta(d.delta_nominal, g.h);
    g.deltas.push_back(delta);
    g.N.push_back(steps / static_cast<std::size_t>(std::llround(delta / g.h)));
  }
  return g;
}

ExperimentRow base_row(const ExperimentConfig& cfg, double H) {
  ExperimentRow r;
  r.experiment = to_string(cfg.experiment);
  r.H = H;
  r.seed_base = cfg.seed_base;
  return r;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::spectral_norm: return "spectral_norm";
    case ExperimentKind::noconvergence: return "noconvergence";
    case ExperimentKind::l2_heatmap: return "l2_heatmap";
    case ExperimentKind::homogenization: return "homogenization";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "spectral_norm" || name == "spectral-norm") return ExperimentKind::spectral_norm;
  if (name == "noconvergence") return ExperimentKind::noconvergence;
  if (name == "l2_heatmap" || name == "heatmap") return ExperimentKind::l2_heatmap;
  if (name == "homogenization") return ExperimentKind::homogenization;
  throw ConfigError("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (H.empty()) throw ConfigError("config needs at least one H value");
  for (const double h : H) (void)HurstParameter{h};
  switch (experiment) {
    case ExperimentKind::spectral_norm:
      if (n.empty()) throw ConfigError("spectral_norm needs a list of n values");
      if (!std::is_sorted(n.begin(), n.end())) throw ConfigError("n values must be ascending");
      if (std::find(n.begin(), n.end(), std::size_t{0}) != n.end()) {
        throw ConfigError("n values must be positive");
      }
      return;
    case ExperimentKind::noconvergence:
      if (alpha.empty() && delta_halvings.empty()) {
        throw ConfigError("noconvergence needs alpha values or delta_halvings");
      }
      break;
    case ExperimentKind::l2_heatmap:
      if (alpha.empty()) throw ConfigError("l2_heatmap needs alpha values");
      break;
    case ExperimentKind::homogenization:
      break;
  }
  if (epsilon.empty()) throw ConfigError("config needs at least one epsilon value");
  if (M < 2) throw ConfigError("M must be at least 2 so a standard error exists");
  for (const double e : epsilon) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("epsilon values must lie in (0, 1)");
  }
  for (const double a : alpha) {
    if (!(a > 0.0)) throw ConfigError("alpha values must be positive");
  }
  for (const int k : delta_halvings) {
    if (k < 0) throw ConfigError("delta_halvings must be >= 0");
  }
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  if (kappa < 1) throw ConfigError("kappa must be positive");
}

double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  const double m = sample_mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  const auto n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double rms(std::span<const double> v) {
  double ss = 0.0;
  for (const double x : v) ss += x * x;
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double jackknife_rms_se(std::span<const double> v) {
  const std::size_t m = v.size();
  double total = 0.0;
  for (const double x : v) total += x * x;
  std::vector<double> loo(m);
  for (std::size_t i = 0; i < m; ++i) {
    loo[i] = std::sqrt((total - v[i] * v[i]) / static_cast<double>(m - 1));
  }
  const double mean = sample_mean(loo);
  double ss = 0.0;
  for (const double x : loo) ss += (x - mean) * (x - mean);
  return std::sqrt(static_cast<double>(m - 1) / static_cast<double>(m) * ss);
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::optional<double> recompute_se(const ExperimentRow& row) {
  if (!row.se || row.replicates.size() < 2) return std::nullopt;
  if (row.stat.rfind("rms_", 0) == 0) return jackknife_rms_se(row.replicates);
  return standard_error(row.replicates);
}

std::size_t resolve_parallelism(std::size_t requested) {
  if (const char* env = std::getenv("ROUGHMLE_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigError(std::string("ROUGHMLE_THREADS must be a positive integer, got '") + env +
                        "'");
    }
    return static_cast<std::size_t>(v);
  }
  if (requested > 0) return requested;
  return static_cast<std::size_t>(std::max(1, tbb::this_task_arena::max_concurrency()));
}

std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::span<const double> cell_key,
                             std::size_t replicate) {
  std::uint64_t cell = 0xcbf29ce484222325ULL;
  for (const double k : cell_key) cell = derive_seed(cell, {std::bit_cast<std::uint64_t>(k)});
  return derive_seed(cfg.seed_base, {static_cast<std::uint64_t>(cfg.experiment) + 1, cell,
                                     static_cast<std::uint64_t>(replicate)});
}

std::vector<ExperimentRow> run_spectral_norm(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    double H;
    std::size_t n;
  };
  std::vector<Task> tasks;
  for (const double H : cfg.H) {
    for (const std::size_t n : cfg.n) tasks.push_back({H, n});
  }
  std::vector<double> norms(tasks.size());
  parallel_indexed(tasks.size(), resolve_parallelism(cfg.parallelism), [&](std::size_t i) {
    const auto cov = build_covariance(GridSpec::unit(tasks[i].n), HurstParameter{tasks[i].H});
    norms[i] = inverse_spectral_norm(cov);
  });

  std::vector<ExperimentRow> rows;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const HurstParameter H{tasks[i].H};
    const auto n = static_cast<double>(tasks[i].n);
    const double ratio = norms[i] / std::pow(n, spectral_bound_exponent(H));
    auto row = base_row(cfg, tasks[i].H);
    row.n = tasks[i].n;
    row.delta = 1.0 / n;
    const std::pair<const char*, double> stats[] = {
        {"inv_spectral_norm", norms[i]}, {"ratio", ratio}, {"log2_ratio", std::log2(ratio)}};
    for (const auto& [name, value] : stats) {
      row.stat = name;
      row.value = value;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

// Shared driver for the two estimator sweeps: one fine path per (H, eps,
// replicate), every design point subsampled from it.
std::vector<ExperimentRow> run_estimator_sweep(const ExperimentConfig& cfg,
                                               const std::vector<std::vector<Design>>& designs,
                                               bool rms_stats) {
  struct Cell {
    double H;
    double eps;
    std::vector<Design> designs;
    CellGrid grid;
  };
  std::vector<Cell> cells;
  for (const double H : cfg.H) {
    for (std::size_t e = 0; e < cfg.epsilon.size(); ++e) {
      const double eps = cfg.epsilon[e];
      std::vector<Design> kept;
      for (const auto& d : designs[e]) {
        if (std::floor(cfg.T / d.delta_nominal + 1e-9) >= 2.0) kept.push_back(d);
      }
      if (kept.empty()) continue;
      Cell c{H, eps, kept, cell_grid(multiscale_params(cfg, H, eps), kept)};
      cells.push_back(std::move(c));
    }
  }

  const std::size_t M = cfg.M;
  std::vector<std::vector<double>> estimates(cells.size() * M);
  parallel_indexed(estimates.size(), resolve_parallelism(cfg.parallelism), [&](std::size_t t) {
    const Cell& c = cells[t / M];
    const std::size_t r = t % M;
    const double key[] = {c.H, c.eps};
    const auto params = multiscale_params(cfg, c.H, c.eps);
    const auto paths = sample_multiscale_on_step(params, c.grid.h, replicate_seed(cfg, key, r));
    std::vector<double> out;
    for (const double delta : c.grid.deltas) {
      out.push_back(estimate_from_path(paths.slow, delta, HurstParameter{c.H}).sigma2_hat);
    }
    estimates[t] = std::move(out);
  });

  std::vector<ExperimentRow> rows;
  const double s2 = cfg.sigma * cfg.sigma;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& c = cells[ci];
    for (std::size_t d = 0; d < c.designs.size(); ++d) {
      std::vector<double> values(M);
      for (std::size_t r = 0; r < M; ++r) values[r] = estimates[ci * M + r][d];
      auto row = base_row(cfg, c.H);
      row.epsilon = c.eps;
      row.delta = c.grid.deltas[d];
      row.alpha = std::log(c.grid.deltas[d]) / std::log(c.eps);
      row.n = c.grid.N[d];
      row.M = M;
      if (rms_stats) {
        std::vector<double> err(M);
        for (std::size_t r = 0; r < M; ++r) err[r] = values[r] - s2;
        row.stat = "rms_error";
        row.value = rms(err);
        row.se = jackknife_rms_se(err);
        row.replicates = err;
        rows.push_back(row);
      }
      row.stat = "mean_sigma2";
      row.value = sample_mean(values);
      row.se = standard_error(values);
      row.replicates = values;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

std::vector<ExperimentRow> run_noconvergence(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<Design>> designs;
  for (const double eps : cfg.epsilon) {
    std::vector<Design> d;
    for (const int k : cfg.delta_halvings) {
      const double delta = eps * std::ldexp(1.0, -k);
      d.push_back({delta, std::log(delta) / std::log(eps)});
    }
    for (const double a : cfg.alpha) d.push_back({std::pow(eps, a), a});
    designs.push_back(std::move(d));
  }
  return run_estimator_sweep(cfg, designs, false);
}

std::vector<ExperimentRow> run_l2_heatmap(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<Design>> designs;
  for (const double eps : cfg.epsilon) {
    std::vector<Design> d;
    for (const double a : cfg.alpha) d.push_back({std::pow(eps, a), a});
    designs.push_back(std::move(d));
  }
  return run_estimator_sweep(cfg, designs, true);
}

std::vector<ExperimentRow> run_homogenization(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Cell {
    double H;
    double eps;
  };
  std::vector<Cell> cells;
  for (const double H : cfg.H) {
    for (const double eps : cfg.epsilon) cells.push_back({H, eps});
  }
  const std::size_t M = cfg.M;
  std::vector<SupErrorSample> samples(cells.size() * M);
  parallel_indexed(samples.size(), resolve_parallelism(cfg.parallelism), [&](std::size_t t) {
    const Cell& c = cells[t / M];
    const double key[] = {c.H, c.eps};
    auto s = homogenization_sup_error(multiscale_params(cfg, c.H, c.eps),
                                      replicate_seed(cfg, key, t % M));
    // Thin the pointwise record; it only feeds the sup_t RMS summary.
    const std::size_t stride = (s.pointwise.size() + kRmsNodes - 1) / kRmsNodes;
    std::vector<double> thin;
    for (std::size_t k = 0; k < s.pointwise.size(); k += stride) thin.push_back(s.pointwise[k]);
    s.pointwise = std::move(thin);
    samples[t] = std::move(s);
  });

  std::vector<ExperimentRow> rows;
  std::size_t ci = 0;
  for (const double H : cfg.H) {
    std::vector<double> log_eps;
    std::vector<double> log_mean;
    std::vector<double> log_rms;
    for (const double eps : cfg.epsilon) {
      std::vector<double> sup(M);
      std::vector<double> mean_sq;
      for (std::size_t r = 0; r < M; ++r) {
        const auto& s = samples[ci * M + r];
        sup[r] = s.sup_abs;
        if (mean_sq.empty()) mean_sq.assign(s.pointwise.size(), 0.0);
        for (std::size_t k = 0; k < mean_sq.size(); ++k) {
          mean_sq[k] += s.pointwise[k] * s.pointwise[k] / static_cast<double>(M);
        }
      }
      ++ci;
      const auto params = multiscale_params(cfg, H, eps);
      auto row = base_row(cfg, H);
      row.epsilon = eps;
      row.delta = fine_step(params, eps);
      row.n = horizon_steps(params, *row.delta);
      row.M = M;
      row.stat = "mean_sup_error";
      row.value = sample_mean(sup);
      row.se = standard_error(sup);
      row.replicates = sup;
      rows.push_back(row);
      const double sup_rms = std::sqrt(*std::max_element(mean_sq.begin(), mean_sq.end()));
      row.stat = "sup_rms_error";
      row.value = sup_rms;
      row.se.reset();
      row.replicates.clear();
      rows.push_back(row);
      log_eps.push_back(std::log(eps));
      log_mean.push_back(std::log(rows[rows.size() - 2].value));
      log_rms.push_back(std::log(sup_rms));
    }
    if (cfg.epsilon.size() >= 2) {
      auto row = base_row(cfg, H);
      row.M = M;
      row.stat = "slope_mean_sup_error";
      row.value = ols_slope(log_eps, log_mean);
      rows.push_back(row);
      row.stat = "slope_sup_rms_error";
      row.value = ols_slope(log_eps, log_rms);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::spectral_norm: return run_spectral_norm(cfg);
    case ExperimentKind::noconvergence: return run_noconvergence(cfg);
    case ExperimentKind::l2_heatmap: return run_l2_heatmap(cfg);
    case ExperimentKind::homogenization: return run_homogenization(cfg);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace roughmle
