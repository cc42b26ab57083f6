#include "roughmle/fractional_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "quadrature.hpp"
#include "roughmle/errors.hpp"
#include "roughmle/fgn_covariance.hpp"

namespace roughmle {

namespace {

constexpr int kGradingLevels = 16;

void require_same_grid(const StepFunction& f, const StepFunction& g) {
  if (f.n != g.n || f.delta != g.delta) {
    throw DomainError("step functions live on different grids");
  }
}

// (x + d)^{-g} - x^{-g} for x > 0, d > 0 without cancellation.
double power_step_down(double x, double d, double g) {
  return std::pow(x, -g) * std::expm1(-g * std::log1p(d / x));
}

// (x + d)^g - x^g for x > 0, d > 0.
double power_step_up(double x, double d, double g) {
  return std::pow(x, g) * std::expm1(g * std::log1p(d / x));
}

// int_A int_B |x - y|^{p-2} for disjoint intervals [a, b] left of [c, d].
double kernel_mass(double a, double b, double c, double d, double p) {
  const auto F = [p](double x) { return std::pow(x, p); };
  return (F(d - a) - F(d - b) - F(c - a) + F(c - b)) / (p * (p - 1.0));
}

std::vector<double> random_unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> u(n);
  double ss = 0.0;
  for (auto& v : u) {
    v = normal(rng);
    ss += v * v;
  }
  const double norm = std::sqrt(ss);
  for (auto& v : u) v /= norm;
  return u;
}

// int_0^1 g_p(y) g_q(y) dy with y = i + 1 - s and g_p(y) = (p + y)^{-g} - (p - 1 + y)^{-g}.
double appendix_I_local(std::size_t p, std::size_t q, double g) {
  const auto gp = [g](std::size_t k, double y) {
    const double lo = static_cast<double>(k - 1) + y;
    return power_step_down(lo, 1.0, g);
  };
  const auto integrand = [&](double y) { return gp(p, y) * gp(q, y); };
  if (p > 1 && q > 1) return quad::gauss_legendre(integrand, 0.0, 1.0);
  // Near y = 0: g_1(y) = -y^{-g} + 1 + O(y), g_k(0) = k^{-g} - (k-1)^{-g}.
  const auto expansion = [g](std::size_t k) -> std::pair<double, double> {
    if (k == 1) return {-1.0, 1.0};
    return {0.0, power_step_down(static_cast<double>(k - 1), 1.0, g)};
  };
  const auto [Ap, Bp] = expansion(p);
  const auto [Aq, Bq] = expansion(q);
  const quad::LeftSingularity s{g, Ap * Aq, Ap * Bq + Aq * Bp, Bp * Bq};
  return quad::graded_left_singular(integrand, 0.0, 1.0, s, kGradingLevels);
}

}  // namespace

StepFunction::StepFunction(std::vector<double> coeffs, double cell_width)
    : n(coeffs.size()), delta(cell_width), u(std::move(coeffs)) {
  if (n == 0) throw DomainError("step function needs at least one cell");
  if (!(delta > 0.0)) throw DomainError("step function cell width must be positive");
}

StepFunction StepFunction::on_unit_interval(std::vector<double> coeffs) {
  const double width = coeffs.empty() ? 0.0 : 1.0 / static_cast<double>(coeffs.size());
  return StepFunction(std::move(coeffs), width);
}

double StepFunction::l2_norm_sq() const noexcept {
  double ss = 0.0;
  for (const double v : u) ss += v * v;
  return delta * ss;
}

double StepFunction::operator()(double t) const noexcept {
  if (!(t > 0.0) || t > support_end()) return 0.0;
  const auto k = static_cast<std::size_t>(std::ceil(t / delta)) - 1;
  return u[std::min(k, n - 1)];
}

StepFunction StepFunction::scaled(double c) const {
  std::vector<double> v(u);
  for (auto& x : v) x *= c;
  return StepFunction(std::move(v), delta);
}

FracOrder::FracOrder(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 0.5)) {
    std::ostringstream msg;
    msg << "fractional order must lie in (0, 1/2), got " << gamma;
    throw DomainError(msg.str());
  }
}

double h_inner_product(const StepFunction& f, const StepFunction& g, HurstParameter H) {
  require_same_grid(f, g);
  std::vector<double> row(f.n);
  for (std::size_t k = 0; k < f.n; ++k) row[k] = fgn_autocovariance(k, f.delta, H);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < f.n; ++j) inner += row[i > j ? i - j : j - i] * g.u[j];
    sum += f.u[i] * inner;
  }
  return sum;
}

double weighted_double_integral(const StepFunction& f, const StepFunction& g, HurstParameter H) {
  if (!(H.value() > 0.5)) throw DomainError("weighted_double_integral needs H > 1/2");
  require_same_grid(f, g);
  const double p = 2.0 * H.value();
  const double d = f.delta;
  const auto P = [p](double x) { return std::pow(std::fabs(x), p); };
  double sum = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double a = static_cast<double>(i) * d;
    const double b = static_cast<double>(i + 1) * d;
    for (std::size_t j = 0; j < g.n; ++j) {
      const double c = static_cast<double>(j) * d;
      const double e = static_cast<double>(j + 1) * d;
      const double mass = 0.5 * (P(b - c) + P(a - e) - P(a - c) - P(b - e));
      sum += f.u[i] * g.u[j] * mass;
    }
  }
  return sum;
}

double sobolev_seminorm(const StepFunction& f, HurstParameter H) {
  const double h = H.value();
  if (!(h < 0.5)) throw DomainError("sobolev_seminorm needs H < 1/2");
  const double p = 2.0 * h;
  const double d = f.delta;
  const double L = f.support_end();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double a = static_cast<double>(i) * d;
    const double b = static_cast<double>(i + 1) * d;
    const double ui2 = f.u[i] * f.u[i];
    // Against (-inf, 0] and (L, inf), where the extension vanishes.
    sum += ui2 * (std::pow(b, p) - std::pow(a, p)) / (p * (1.0 - p));
    sum += ui2 * (std::pow(L - a, p) - std::pow(L - b, p)) / (p * (1.0 - p));
    for (std::size_t j = i + 1; j < f.n; ++j) {
      const double diff = f.u[i] - f.u[j];
      if (diff == 0.0) continue;
      const double c = static_cast<double>(j) * d;
      const double e = static_cast<double>(j + 1) * d;
      sum += diff * diff * kernel_mass(a, b, c, e, p);
    }
  }
  return h * (1.0 - 2.0 * h) * sum;
}

double fractional_integral(const StepFunction& f, FracOrder gamma, double t) {
  if (t < 0.0) throw DomainError("fractional_integral needs t >= 0");
  const double g = gamma.value();
  double sum = 0.0;
  for (std::size_t j = 0; j < f.n; ++j) {
    const double a = static_cast<double>(j) * f.delta;
    if (t <= a) break;
    const double b = static_cast<double>(j + 1) * f.delta;
    const double piece = t > b ? power_step_up(t - b, f.delta, g) : std::pow(t - a, g);
    sum += f.u[j] * piece;
  }
  return sum / std::tgamma(g + 1.0);
}

MarchaudDerivative::MarchaudDerivative(StepFunction f, FracOrder gamma)
    : f_(std::move(f)), gamma_(gamma.value()), inv_gamma_fn_(1.0 / std::tgamma(1.0 - gamma_)) {}

namespace {

// Value on cell i at distance y = (i+1) delta - t > 0 from its right end.
double marchaud_on_cell(const StepFunction& f, double g, double scale, std::size_t i, double y) {
  const double d = f.delta;
  const double ui = f.u[i];
  double sum = 0.0;
  for (std::size_t j = i + 1; j < f.n; ++j) {
    const double diff = f.u[j] - ui;
    if (diff == 0.0) continue;
    const double lo = static_cast<double>(j - i - 1) * d + y;
    sum += diff * power_step_down(lo, d, g);
  }
  sum += ui * std::pow(static_cast<double>(f.n - i - 1) * d + y, -g);
  return scale * sum;
}

}  // namespace

double MarchaudDerivative::operator()(double t) const {
  if (t < 0.0) throw DomainError("Marchaud derivative is evaluated on t >= 0");
  const double q = t / f_.delta;
  if (q == std::round(q)) {
    std::ostringstream msg;
    msg << "Marchaud derivative is singular at the grid point t = " << t;
    throw DomainError(msg.str());
  }
  if (t > f_.support_end()) return 0.0;
  const auto i = static_cast<std::size_t>(std::floor(q));
  const double y = static_cast<double>(i + 1) * f_.delta - t;
  return marchaud_on_cell(f_, gamma_, inv_gamma_fn_, i, y);
}

std::pair<double, double> MarchaudDerivative::right_expansion(std::size_t i) const {
  const double g = gamma_;
  const double d = f_.delta;
  const double ui = f_.u[i];
  if (i + 1 == f_.n) return {inv_gamma_fn_ * ui, 0.0};
  const double A = -(f_.u[i + 1] - ui);
  double B = std::pow(d, -g) * (f_.u[i + 1] - ui);
  for (std::size_t j = i + 2; j < f_.n; ++j) {
    B += (f_.u[j] - ui) * power_step_down(static_cast<double>(j - i - 1) * d, d, g);
  }
  B += ui * std::pow(static_cast<double>(f_.n - i - 1) * d, -g);
  return {inv_gamma_fn_ * A, inv_gamma_fn_ * B};
}

MarchaudDerivative marchaud_derivative(const StepFunction& f, FracOrder gamma) {
  return MarchaudDerivative(f, gamma);
}

double marchaud_l2_norm_sq(const StepFunction& f, FracOrder gamma) {
  const MarchaudDerivative D(f, gamma);
  const double g = gamma.value();
  const double scale = 1.0 / std::tgamma(1.0 - g);
  double total = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const auto [A, B] = D.right_expansion(i);
    const auto integrand = [&, i](double y) {
      const double v = marchaud_on_cell(f, g, scale, i, y);
      return v * v;
    };
    const quad::LeftSingularity s{g, A * A, 2.0 * A * B, B * B};
    total += quad::graded_left_singular(integrand, 0.0, f.delta, s, kGradingLevels);
  }
  return total;
}

double c_H_constant(HurstParameter H) {
  const double h = H.value();
  if (!(h > 0.5)) throw DomainError("c_H is defined for 1/2 < H < 1");
  return std::tgamma(2.0 - 2.0 * h) * std::tgamma(1.0 - h) /
         (h * (2.0 * h - 1.0) * std::tgamma(1.5 - h) * std::tgamma(h - 0.5));
}

double isometry_constant(HurstParameter H) {
  const double h = H.value();
  if (!(h > 0.5)) throw DomainError("the isometry constant is defined for 1/2 < H < 1");
  return std::pow(2.0, 1.0 - 2.0 * h) * std::tgamma(1.0 - h) /
         (h * (2.0 * h - 1.0) * std::tgamma(h - 0.5) * std::sqrt(std::numbers::pi));
}

FractionalL2Inner fractional_integral_l2_inner(const StepFunction& f, const StepFunction& g,
                                               FracOrder gamma, double rel_tol) {
  require_same_grid(f, g);
  const double gm = gamma.value();
  const auto integrand = [&](double t) {
    return fractional_integral(f, gamma, t) * fractional_integral(g, gamma, t);
  };

  // Each cell boundary carries a bounded (t - a)^g cusp from the right.
  FractionalL2Inner out;
  double body = 0.0;
  for (std::size_t k = 0; k < f.n; ++k) {
    const double a = static_cast<double>(k) * f.delta;
    body += quad::graded_left(integrand, a, a + f.delta, kGradingLevels);
  }
  const double L = f.support_end();
  body += quad::graded_left(integrand, L, 2.0 * L, kGradingLevels);
  double lo = 2.0 * L;
  for (int k = 1; k <= 6; ++k) {
    const double hi = L + L * std::pow(2.0, k);
    body += quad::gauss_legendre(integrand, lo, hi);
    lo = hi;
  }
  const double X = lo;

  // Beyond X: I^g f(t) = (1/Gamma(g)) sum_k c_k m_k t^{g-1-k}, with m_k the
  // k-th moment of f and c_k = (1-g)_k / k!.
  constexpr int kOrders = 24;
  const auto moments = [&](const StepFunction& s) {
    std::vector<double> m(kOrders + 1, 0.0);
    for (std::size_t j = 0; j < s.n; ++j) {
      const double a = static_cast<double>(j) * s.delta / X;
      const double b = static_cast<double>(j + 1) * s.delta / X;
      double pa = a;
      double pb = b;
      for (int k = 0; k <= kOrders; ++k) {
        m[k] += s.u[j] * (pb - pa) / (k + 1);
        pa *= a;
        pb *= b;
      }
    }
    return m;  // moments of f in units of X: m_k / X^{k+1}
  };
  const auto mf = moments(f);
  const auto mg = moments(g);
  std::vector<double> c(kOrders + 1, 1.0);
  for (int k = 1; k <= kOrders; ++k) c[k] = c[k - 1] * (k - gm) / k;

  double tail = 0.0;
  double last_order = 0.0;
  for (int order = 0; order <= kOrders; ++order) {
    double term = 0.0;
    for (int k = 0; k <= order; ++k) {
      const int l = order - k;
      term += c[k] * c[l] * mf[k] * mg[l];
    }
    term /= (order + 1.0 - 2.0 * gm);
    tail += term;
    last_order = term;
  }
  const double prefactor = std::pow(X, 2.0 * gm + 1.0) / std::pow(std::tgamma(gm), 2.0);
  tail *= prefactor;
  out.tail = tail;
  out.tail_remainder = 2.0 * std::fabs(last_order) * prefactor;
  out.value = body + tail;
  if (out.tail_remainder > rel_tol * std::fabs(out.value)) {
    std::ostringstream msg;
    msg << "tail of the fractional-integral inner product not resolved: remainder "
        << out.tail_remainder << " vs value " << out.value;
    throw QuadratureError(msg.str());
  }
  return out;
}

IsometryCheck check_isometry(const StepFunction& f, const StepFunction& g, HurstParameter H) {
  const FracOrder gamma(H.value() - 0.5);
  IsometryCheck out;
  out.lhs = fractional_integral_l2_inner(f, g, gamma).value;
  out.rhs = isometry_constant(H) * h_inner_product(f, g, H);
  out.rel_err = std::fabs(out.lhs - out.rhs) / std::max(std::fabs(out.rhs), 1e-30);
  return out;
}

InequalityCheck check_norm_bound(const StepFunction& f, HurstParameter H) {
  const FracOrder gamma(H.value() - 0.5);
  InequalityCheck out;
  out.lhs = f.l2_norm_sq();
  const double hnorm = std::sqrt(std::max(h_inner_product(f, f, H), 0.0));
  const double dnorm = std::sqrt(marchaud_l2_norm_sq(f, gamma));
  out.rhs = std::sqrt(c_H_constant(H)) * hnorm * dnorm;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-8);
  return out;
}

LowerBoundCheck quadratic_lower_bound_check(const StepFunction& f, HurstParameter H,
                                            std::optional<double> small_h_constant) {
  const double h = H.value();
  if (H.is_brownian()) throw DomainError("quadratic_lower_bound_check needs H != 1/2");
  LowerBoundCheck out;
  out.qform = h_inner_product(f, f, H);
  if (h > 0.5) {
    const double l2 = f.l2_norm_sq();
    const double dn = marchaud_l2_norm_sq(f, FracOrder(h - 0.5));
    out.bound = dn > 0.0 ? l2 * l2 / (c_H_constant(H) * dn) : 0.0;
    out.holds = out.qform >= out.bound * (1.0 - 1e-8);
  } else {
    if (!small_h_constant) {
      throw ConfigError("H < 1/2 lower bound needs a calibrated constant");
    }
    out.bound = *small_h_constant * f.l2_norm_sq();
    out.holds = out.qform >= out.bound;
  }
  return out;
}

double calibrate_lower_bound_constant(std::size_t n, HurstParameter H, std::size_t trials,
                                      std::uint64_t seed) {
  if (trials == 0) throw ConfigError("calibration needs at least one trial");
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto f = StepFunction::on_unit_interval(random_unit_vector(n, rng));
    best = std::min(best, h_inner_product(f, f, H) / f.l2_norm_sq());
  }
  return best;
}

double appendix_I_integral(std::size_t i, std::size_t j1, std::size_t j2, FracOrder gamma) {
  if (j1 < i + 1 || j2 < i + 1) throw DomainError("appendix integral needs j1, j2 >= i + 1");
  return appendix_I_local(j1 - i, j2 - i, gamma.value());
}

AppendixReport verify_appendix_bounds(std::size_t n, FracOrder gamma, std::size_t trials,
                                      std::uint64_t seed) {
  if (n < 2 || n > 64) throw ConfigError("verify_appendix_bounds needs 2 <= n <= 64");
  if (trials == 0) throw ConfigError("verify_appendix_bounds needs at least one trial");
  const double g = gamma.value();

  // I(i, j1, j2) depends on (j1 - i, j2 - i) only.
  std::vector<std::vector<double>> table(n, std::vector<double>(n, 0.0));
  for (std::size_t p = 1; p < n; ++p) {
    for (std::size_t q = p; q < n; ++q) {
      table[p][q] = table[q][p] = appendix_I_local(p, q, g);
    }
  }

  AppendixReport r;
  r.n = n;
  r.gamma = g;
  r.trials = trials;
  r.a.assign(n, 0.0);
  r.b.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j1 = i + 1; j1 < n; ++j1) {
      for (std::size_t j2 = i + 1; j2 < n; ++j2) {
        const double I = table[j1 - i][j2 - i];
        r.a[i] += I;
        r.b[j2] += I;
      }
    }
  }
  r.a_bound = 1.0 / (1.0 - 2.0 * g);
  r.a_within_bound = std::all_of(r.a.begin(), r.a.end(),
                                 [&](double v) { return v <= r.a_bound * (1.0 + 1e-9); });

  std::mt19937_64 rng(seed);
  r.max_A = r.max_B = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto u = random_unit_vector(n, rng);
    double A = 0.0;
    double B = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      A += u[i] * u[i] * r.a[i];
      B += u[i] * u[i] * r.b[i];
    }
    r.max_A = std::max(r.max_A, A);
    r.max_B = std::max(r.max_B, B);
  }
  return r;
}

}  // namespace roughmle
