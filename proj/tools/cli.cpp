#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "roughmle/config.hpp"
#include "roughmle/csv.hpp"
#include "roughmle/errors.hpp"
#include "roughmle/experiment.hpp"
#include "roughmle/fractional_operators.hpp"
#include "roughmle/mle_estimator.hpp"
#include "roughmle/path_simulation.hpp"

namespace roughmle {

namespace {

constexpr int kExitCheckFailed = 2;

// Writes to --out if given, else to the caller's stream.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw Error("failed writing '" + path + "'");
}

struct SimulateOptions {
  MultiscaleParams params;
  std::optional<double> out_delta;
  std::uint64_t seed = 0;
  std::string scheme = "euler";
  std::string out;
};

struct EstimateOptions {
  MultiscaleParams params;
  std::optional<double> alpha;
  std::optional<double> eps;
  std::uint64_t seed = 0;
  std::string scheme = "euler";
  std::string from_csv;
};

// Command-line overrides for ExperimentConfig fields.
struct ExperimentOptions {
  std::string config;
  std::string out;
  std::vector<double> H;
  std::vector<double> eps;
  std::vector<double> alpha;
  std::vector<std::size_t> n;
  std::vector<int> halvings;
  std::optional<std::size_t> M;
  std::optional<double> T;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<int> kappa;
  std::optional<double> burn_in;
  std::string scheme;
  std::string schema = "spectral";
};

void add_experiment_options(CLI::App* cmd, ExperimentOptions& o) {
  cmd->add_option("--config", o.config, "Flat key = value config file");
  cmd->add_option("--out", o.out, "Output CSV (stdout if omitted)");
  cmd->add_option("--H", o.H, "Hurst values")->delimiter(',');
  cmd->add_option("--eps", o.eps, "Epsilon values")->delimiter(',');
  cmd->add_option("--alpha", o.alpha, "Alpha values")->delimiter(',');
  cmd->add_option("--n", o.n, "Grid sizes")->delimiter(',');
  cmd->add_option("--delta-halvings", o.halvings, "delta = eps 2^-k for each k")->delimiter(',');
  cmd->add_option("--M", o.M, "Replicates per cell");
  cmd->add_option("--T", o.T, "Horizon");
  cmd->add_option("--sigma", o.sigma, "Diffusion coefficient");
  cmd->add_option("--seed", o.seed, "seed_base");
  cmd->add_option("--parallelism", o.parallelism, "Worker threads (0 = auto)");
  cmd->add_option("--kappa", o.kappa, "Fine factor");
  cmd->add_option("--burn-in", o.burn_in, "Burn-in length in units of eps");
  cmd->add_option("--scheme", o.scheme, "euler or expeuler");
}

ExperimentConfig build_config(ExperimentKind kind, const ExperimentOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : parse_config_file(o.config);
  cfg.experiment = kind;
  if (!o.H.empty()) cfg.H = o.H;
  if (!o.eps.empty()) cfg.epsilon = o.eps;
  if (!o.alpha.empty()) cfg.alpha = o.alpha;
  if (!o.n.empty()) cfg.n = o.n;
  if (!o.halvings.empty()) cfg.delta_halvings = o.halvings;
  if (o.M) cfg.M = *o.M;
  if (o.T) cfg.T = *o.T;
  if (o.sigma) cfg.sigma = *o.sigma;
  if (o.seed) cfg.seed_base = *o.seed;
  if (o.parallelism) cfg.parallelism = *o.parallelism;
  if (o.kappa) cfg.kappa = *o.kappa;
  if (o.burn_in) cfg.burn_in_multiple = *o.burn_in;
  if (!o.scheme.empty()) cfg.scheme = parse_scheme(o.scheme);
  return cfg;
}

int run_simulate(const SimulateOptions& o, std::ostream& out) {
  MultiscaleParams p = o.params;
  p.scheme = parse_scheme(o.scheme);
  const double out_delta = o.out_delta.value_or(p.epsilon);
  const auto paths = sample_multiscale(p, out_delta, o.seed);
  const auto stride = static_cast<std::size_t>(std::llround(out_delta / paths.h));
  emit(o.out, out, [&](std::ostream& os) { write_path_csv(os, paths, stride); });
  return 0;
}

int run_estimate(const EstimateOptions& o, std::ostream& out) {
  nlohmann::json j;
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  EstimateResult r;
  if (!o.from_csv.empty()) {
    const auto ts = read_time_series_csv(o.from_csv);
    PathSample path;
    path.times = ts.t;
    path.values = ts.x;
    double delta = path.step();
    if (o.alpha && o.eps) delta = std::pow(*o.eps, *o.alpha);
    const auto dx = increments(subsample(path, delta));
    r = mle_sigma2(dx, delta, HurstParameter{o.params.H});
    r.epsilon = o.eps;
    r.alpha = o.alpha;
  } else {
    if (!o.eps || !o.alpha) throw ConfigError("estimate needs --eps and --alpha (or --from-csv)");
    MultiscaleParams p = o.params;
    p.epsilon = *o.eps;
    p.scheme = parse_scheme(o.scheme);
    const auto spec = SubsampleSpec::make(*o.alpha, *o.eps, p.T);
    r = estimate_from_multiscale(p, spec, o.seed);
  }
  j["sigma2_hat"] = r.sigma2_hat;
  j["N"] = r.N_used;
  j["delta"] = r.delta;
  j["epsilon"] = opt(r.epsilon);
  j["alpha"] = opt(r.alpha);
  out << j.dump() << '\n';
  return 0;
}

int run_experiment_command(ExperimentKind kind, const ExperimentOptions& o, std::ostream& out) {
  const auto cfg = build_config(kind, o);
  const auto rows = run_experiment(cfg);
  if (kind == ExperimentKind::spectral_norm && o.schema != "rows") {
    if (o.schema != "spectral") throw ConfigError("--schema must be 'spectral' or 'rows'");
    emit(o.out, out, [&](std::ostream& os) { write_spectral_csv(os, rows); });
  } else {
    emit(o.out, out, [&](std::ostream& os) { write_results_csv(os, rows); });
  }
  return 0;
}

struct AppendixOptions {
  std::optional<double> H;
  std::vector<std::size_t> n{16, 64};
  std::vector<double> gamma;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  double stability_factor = 1.1;
  std::string out;
};

int run_verify_appendix(const AppendixOptions& o, std::ostream& out) {
  std::vector<double> gammas = o.gamma;
  if (gammas.empty()) gammas.push_back(o.H ? *o.H - 0.5 : 0.2);
  if (o.n.empty()) throw ConfigError("verify-appendix needs at least one n");

  struct Line {
    std::string check;
    std::size_t n;
    double gamma;
    std::string statistic;
    double value;
    bool holds;
  };
  std::vector<Line> lines;
  for (const double g : gammas) {
    const FracOrder gamma(g);
    std::vector<AppendixReport> reports;
    for (const std::size_t n : o.n) {
      reports.push_back(verify_appendix_bounds(n, gamma, o.trials, o.seed));
      const auto& r = reports.back();
      const double max_a = *std::max_element(r.a.begin(), r.a.end());
      const bool finite = std::isfinite(r.max_A) && std::isfinite(r.max_B);
      lines.push_back({"bound_A", n, g, "max_A", r.max_A, finite && r.max_A > 0.0});
      lines.push_back({"bound_B", n, g, "max_B", r.max_B, finite && r.max_B > 0.0});
      lines.push_back({"a_i_limit", n, g, "max_a_i", max_a, r.a_within_bound});
      lines.push_back({"a_i_limit", n, g, "limit_1_over_1_minus_2gamma", r.a_bound, true});
    }
    if (reports.size() >= 2) {
      const auto& first = reports.front();
      const auto& last = reports.back();
      const double ra = last.max_A / first.max_A;
      const double rb = last.max_B / first.max_B;
      lines.push_back({"stability", last.n, g, "ratio_A", ra, ra <= o.stability_factor});
      lines.push_back({"stability", last.n, g, "ratio_B", rb, rb <= o.stability_factor});
    }
  }

  bool all = true;
  emit(o.out, out, [&](std::ostream& os) {
    os << "check,n,gamma,H,statistic,value,holds\n";
    for (const auto& l : lines) {
      all = all && l.holds;
      os << l.check << ',' << l.n << ',' << format_double(l.gamma) << ','
         << format_double(l.gamma + 0.5) << ',' << l.statistic << ',' << format_double(l.value)
         << ',' << (l.holds ? "true" : "false") << '\n';
    }
  });
  return all ? 0 : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rough homogenization MLE toolkit"};
  app.name("roughmle");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate the multiscale system");
  simulate->add_option("--H", sim.params.H, "Hurst index")->required();
  simulate->add_option("--sigma", sim.params.sigma, "Diffusion coefficient");
  simulate->add_option("--eps", sim.params.epsilon, "Scale separation")->required();
  simulate->add_option("--T", sim.params.T, "Horizon");
  simulate->add_option("--x0", sim.params.x0, "Initial slow value");
  simulate->add_option("--out-delta", sim.out_delta, "Output spacing (default eps)");
  simulate->add_option("--kappa", sim.params.kappa, "Fine factor");
  simulate->add_option("--burn-in", sim.params.burn_in_multiple, "Burn-in in units of eps");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--scheme", sim.scheme, "euler or expeuler");
  simulate->add_option("--out", sim.out, "Output CSV (stdout if omitted)");

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate sigma^2 by maximum likelihood");
  estimate->add_option("--H", est.params.H, "Hurst index")->required();
  estimate->add_option("--sigma", est.params.sigma, "Diffusion coefficient of simulated data");
  estimate->add_option("--eps", est.eps, "Scale separation");
  estimate->add_option("--alpha", est.alpha, "Subsampling exponent, delta = eps^alpha");
  estimate->add_option("--T", est.params.T, "Horizon");
  estimate->add_option("--kappa", est.params.kappa, "Fine factor");
  estimate->add_option("--burn-in", est.params.burn_in_multiple, "Burn-in in units of eps");
  estimate->add_option("--seed", est.seed, "Seed");
  estimate->add_option("--scheme", est.scheme, "euler or expeuler");
  estimate->add_option("--from-csv", est.from_csv, "Read observations from a t,x CSV");

  ExperimentOptions spec_opts;
  ExperimentOptions noconv_opts;
  ExperimentOptions heat_opts;
  ExperimentOptions homog_opts;
  auto* spectral = app.add_subcommand("spectral-norm", "Inverse spectral norm of fGN covariances");
  add_experiment_options(spectral, spec_opts);
  spectral->add_option("--schema", spec_opts.schema, "spectral (default) or rows");
  auto* noconv = app.add_subcommand("noconvergence", "Estimator collapse for fast sampling");
  add_experiment_options(noconv, noconv_opts);
  auto* heatmap = app.add_subcommand("heatmap", "L2 error over (eps, alpha)");
  add_experiment_options(heatmap, heat_opts);
  auto* homog = app.add_subcommand("homogenization", "Homogenization error versus eps");
  add_experiment_options(homog, homog_opts);

  AppendixOptions app_opts;
  auto* appendix = app.add_subcommand("verify-appendix", "Appendix bound constants");
  appendix->add_option("--H", app_opts.H, "Hurst index (gamma = H - 1/2 if --gamma is absent)");
  appendix->add_option("--n", app_opts.n, "Grid sizes, first and last compared")->delimiter(',');
  appendix->add_option("--gamma", app_opts.gamma, "Fractional orders")->delimiter(',');
  appendix->add_option("--trials", app_opts.trials, "Random unit vectors per n");
  appendix->add_option("--seed", app_opts.seed, "Seed");
  appendix->add_option("--stability-factor", app_opts.stability_factor,
                       "Allowed growth of the maxima from first to last n");
  appendix->add_option("--out", app_opts.out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return run_simulate(sim, out);
    if (*estimate) return run_estimate(est, out);
    if (*spectral) return run_experiment_command(ExperimentKind::spectral_norm, spec_opts, out);
    if (*noconv) return run_experiment_command(ExperimentKind::noconvergence, noconv_opts, out);
    if (*heatmap) return run_experiment_command(ExperimentKind::l2_heatmap, heat_opts, out);
    if (*homog) return run_experiment_command(ExperimentKind::homogenization, homog_opts, out);
    if (*appendix) return run_verify_appendix(app_opts, out);
  } catch (const std::exception& e) {
    err << "roughmle: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace roughmle
