#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "roughmle/errors.hpp"
#include "roughmle/fgn_covariance.hpp"
#include "roughmle/fractional_operators.hpp"

using namespace roughmle;

namespace {

// 30-digit arbitrary-precision reference values.
constexpr double kInvGamma12 = 1.08912442105833630783059976095;      // 1 / Gamma(1.2)
constexpr double kIndicatorI02At25 = 0.127049263819246123073338925921;  // I^0.2 1_(0,1] (2.5)
constexpr double kCH075 = 3.85709089235220571342853719958;
constexpr double kCH06 = 2.11681402692474457386865635069;
constexpr double kK075 = 1.06384608107048714117318949316;
constexpr double kK06 = 0.954310988531844472795090479729;
constexpr double kCH051 = 1.79348212749267328320277798505;
// Marchaud derivative of u = (1, 2, 0, 3) on cells of width 1/4, gamma = 0.2.
constexpr double kD03 = 2.11453121005387737409445864956;
constexpr double kD07 = -1.41287726989604828249441824332;
constexpr double kD09 = 4.08397030356604806615109961043;
// ||D^0.2 1_(0,1]||^2 = 1 / ((1 - 2 gamma) Gamma(1 - gamma)^2).
constexpr double kIndicatorNorm02 = 1.22962133832426126968229188682;
// Appendix integrals at gamma = 0.2.
constexpr double kI011 = 0.191512350897212570331828904861;
constexpr double kI013 = 0.0191845867087112131933748182547;
constexpr double kI023 = 0.00518983218558492445569810342643;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

StepFunction random_step(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> u(n);
  for (auto& v : u) v = normal(rng);
  return StepFunction::on_unit_interval(u);
}

// (1 / Gamma(g)) int_0^t (t - s)^{g-1} f(s) ds, cell by cell with tanh-sinh.
double fractional_integral_oracle(const StepFunction& f, double g, double t) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double sum = 0.0;
  for (std::size_t j = 0; j < f.n; ++j) {
    const double a = j * f.delta;
    const double b = std::min((j + 1) * f.delta, t);
    if (b <= a) break;
    // x = t - s puts the kernel singularity at x = 0 exactly.
    sum += f.u[j] * ts.integrate([&](double x) { return std::pow(x, g - 1.0); }, t - b, t - a);
  }
  return sum / std::tgamma(g);
}

// -(g / Gamma(1-g)) int_t^inf (s - t)^{-g-1} (f(s) - f(t)) ds, split at the
// cell boundaries and at the end of the support.
double marchaud_oracle(const StepFunction& f, double g, double t) {
  const double ft = f(t);
  const auto i = static_cast<std::size_t>(std::floor(t / f.delta));
  double sum = 0.0;
  for (std::size_t j = i + 1; j < f.n; ++j) {
    const double a = j * f.delta;
    const double b = (j + 1) * f.delta;
    sum += (f.u[j] - ft) * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                               [&](double s) { return std::pow(s - t, -g - 1.0); }, a, b, 10,
                               1e-14);
  }
  boost::math::quadrature::exp_sinh<double> es;
  const double L = f.support_end();
  sum += (0.0 - ft) * es.integrate([&](double x) { return std::pow(L + x - t, -g - 1.0); }, 0.0,
                                   std::numeric_limits<double>::infinity());
  return -g / std::tgamma(1.0 - g) * sum;
}

}  // namespace

TEST_CASE("StepFunction and FracOrder") {
  const auto f = StepFunction::on_unit_interval({1.0, -2.0, 3.0, 0.5});
  CHECK(f.n == 4);
  CHECK(f.delta == 0.25);
  CHECK(f.l2_norm_sq() == doctest::Approx(0.25 * (1 + 4 + 9 + 0.25)));
  CHECK(f(0.1) == 1.0);
  CHECK(f(0.25) == 1.0);
  CHECK(f(0.26) == -2.0);
  CHECK(f(1.0) == 0.5);
  CHECK(f(1.01) == 0.0);
  CHECK(f(0.0) == 0.0);
  CHECK_THROWS_AS(StepFunction({}, 0.1), DomainError);
  CHECK_THROWS_AS(FracOrder(0.0), DomainError);
  CHECK_THROWS_AS(FracOrder(0.5), DomainError);
  CHECK(FracOrder(0.2).value() == 0.2);
}

TEST_CASE("h_inner_product examples") {
  const StepFunction one({1.0}, 1.0);
  CHECK(h_inner_product(one, one, HurstParameter(0.75)) == doctest::Approx(1.0));
  const StepFunction a({1.0, 0.0}, 0.5);
  const StepFunction b({0.0, 1.0}, 0.5);
  CHECK(rel(h_inner_product(a, b, HurstParameter(0.75)), 0.146446609406726237799577818948) <
        1e-14);
  const StepFunction f({1.0, 2.0, -1.0}, 0.2);
  const StepFunction g({0.5, -1.0, 4.0}, 0.2);
  CHECK(h_inner_product(f, g, HurstParameter(0.5)) == doctest::Approx(0.2 * (0.5 - 2.0 - 4.0)));
  const StepFunction other({1.0, 2.0, -1.0}, 0.25);
  CHECK_THROWS_AS(h_inner_product(f, other, HurstParameter(0.5)), DomainError);
}

TEST_CASE("oracle triangle: double integral (H > 1/2) and Sobolev seminorm (H < 1/2)") {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<std::size_t> size(1, 32);
  std::uniform_real_distribution<double> high(0.55, 0.95);
  std::uniform_real_distribution<double> low(0.05, 0.45);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = size(rng);
    const auto f = random_step(rng, n);
    const auto g = random_step(rng, n);
    const HurstParameter H(high(rng));
    const double ref = h_inner_product(f, g, H);
    CHECK(std::fabs(weighted_double_integral(f, g, H) - ref) <= 1e-8 * std::fabs(ref));
  }
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = size(rng);
    const auto f = random_step(rng, n);
    const HurstParameter H(low(rng));
    const double ref = h_inner_product(f, f, H);
    CHECK(std::fabs(sobolev_seminorm(f, H) - ref) <= 1e-8 * ref);
  }
}

TEST_CASE("weighted_double_integral and sobolev_seminorm special cases") {
  const StepFunction cell({1.0}, 0.3);
  CHECK(weighted_double_integral(cell, cell, HurstParameter(0.8)) ==
        doctest::Approx(std::pow(0.3, 1.6)).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_double_integral(cell, cell, HurstParameter(0.5)), DomainError);
  CHECK_THROWS_AS(sobolev_seminorm(cell, HurstParameter(0.5)), DomainError);

  const auto constant = StepFunction::on_unit_interval(std::vector<double>(10, 1.7));
  CHECK(sobolev_seminorm(constant, HurstParameter(0.3)) ==
        doctest::Approx(1.7 * 1.7).epsilon(1e-12));
  const auto zero = StepFunction::on_unit_interval(std::vector<double>(5, 0.0));
  CHECK(sobolev_seminorm(zero, HurstParameter(0.2)) == 0.0);

  std::mt19937_64 rng(41);
  const auto f = random_step(rng, 12);
  const auto g = random_step(rng, 12);
  const auto h = random_step(rng, 12);
  const HurstParameter H(0.7);
  std::vector<double> comb(12);
  for (std::size_t i = 0; i < 12; ++i) comb[i] = 2.0 * g.u[i] - 3.0 * h.u[i];
  const auto gh = StepFunction::on_unit_interval(comb);
  const double lhs = weighted_double_integral(f, gh, H);
  const double rhs = 2.0 * weighted_double_integral(f, g, H) - 3.0 * weighted_double_integral(f, h, H);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(weighted_double_integral(f, g, H) == doctest::Approx(weighted_double_integral(g, f, H)));
}

TEST_CASE("fractional_integral closed form") {
  const auto ind = StepFunction::on_unit_interval({1.0});
  CHECK(rel(fractional_integral(ind, FracOrder(0.2), 1.0), kInvGamma12) < 1e-14);
  CHECK(rel(fractional_integral(ind, FracOrder(0.2), 2.5), kIndicatorI02At25) < 1e-14);
  const auto zero = StepFunction::on_unit_interval({0.0, 0.0});
  CHECK(fractional_integral(zero, FracOrder(0.3), 0.7) == 0.0);
  CHECK(fractional_integral(ind, FracOrder(0.3), 0.0) == 0.0);
  CHECK_THROWS_AS(fractional_integral(ind, FracOrder(0.3), -0.1), DomainError);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  std::uniform_real_distribution<double> order(0.05, 0.45);
  for (int t = 0; t < 50; ++t) {
    const auto f = random_step(rng, 1 + t % 12);
    const double g = order(rng);
    const double x = unif(rng);
    const double ref = fractional_integral_oracle(f, g, x);
    CHECK(std::fabs(fractional_integral(f, FracOrder(g), x) - ref) < 1e-8);
  }
}

TEST_CASE("Marchaud derivative closed form") {
  const auto f = StepFunction::on_unit_interval({1.0, 2.0, 0.0, 3.0});
  const auto D = marchaud_derivative(f, FracOrder(0.2));
  CHECK(rel(D(0.3), kD03) < 1e-12);
  CHECK(rel(D(0.7), kD07) < 1e-12);
  CHECK(rel(D(0.9), kD09) < 1e-12);
  CHECK(D(1.3) == 0.0);
  CHECK_THROWS_AS(D(0.25), DomainError);
  CHECK_THROWS_AS(D(0.0), DomainError);
  CHECK_THROWS_AS(D(1.0), DomainError);
  CHECK_THROWS_AS(D(-0.1), DomainError);

  // Constant coefficients cancel every interior cell; only the jump of the
  // zero extension at the end of the support remains.
  const auto c = StepFunction::on_unit_interval(std::vector<double>(5, 2.0));
  const auto Dc = marchaud_derivative(c, FracOrder(0.3));
  for (const double t : {0.1, 0.33, 0.5, 0.95}) {
    CHECK(Dc(t) == doctest::Approx(2.0 * std::pow(1.0 - t, -0.3) / std::tgamma(0.7)));
  }
  const auto zero = StepFunction::on_unit_interval(std::vector<double>(5, 0.0));
  CHECK(marchaud_derivative(zero, FracOrder(0.3))(0.5) == 0.0);
}

TEST_CASE("Marchaud closed form matches the defining integral") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto f = random_step(rng, 2 + k % 15);
    const auto D = marchaud_derivative(f, FracOrder(0.2));
    for (int p = 0; p < 20; ++p) {
      double t = unif(rng);
      while (t / f.delta == std::round(t / f.delta)) t = unif(rng);
      worst = std::max(worst, std::fabs(D(t) - marchaud_oracle(f, 0.2, t)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("Marchaud derivative is linear in the coefficients") {
  std::mt19937_64 rng(44);
  const auto f = random_step(rng, 9);
  const auto g = random_step(rng, 9);
  std::vector<double> comb(9);
  for (std::size_t i = 0; i < 9; ++i) comb[i] = 1.5 * f.u[i] - 0.5 * g.u[i];
  const auto h = StepFunction::on_unit_interval(comb);
  const FracOrder gm(0.35);
  for (const double t : {0.05, 0.4, 0.77}) {
    const double lhs = marchaud_derivative(h, gm)(t);
    const double rhs = 1.5 * marchaud_derivative(f, gm)(t) - 0.5 * marchaud_derivative(g, gm)(t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("marchaud_l2_norm_sq") {
  const auto ind = StepFunction::on_unit_interval({1.0});
  CHECK(rel(marchaud_l2_norm_sq(ind, FracOrder(0.2)), kIndicatorNorm02) < 1e-9);
  const auto zero = StepFunction::on_unit_interval(std::vector<double>(4, 0.0));
  CHECK(marchaud_l2_norm_sq(zero, FracOrder(0.2)) == 0.0);

  // D f(t) = (1 / Gamma(1-g)) sum_k J_k (k delta - t)_+^{-g} with jumps
  // J_k = u_{k-1} - u_k (u_n = 0), so ||D f||^2 is a double sum of pair
  // integrals int_0^{x_k} s^{-g} (s + x_l - x_k)^{-g} ds, done by tanh-sinh.
  std::mt19937_64 rng(45);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const double g : {0.1, 0.25, 0.45}) {
    const auto f = random_step(rng, 6);
    std::vector<double> jump(f.n + 1, 0.0);
    for (std::size_t k = 1; k <= f.n; ++k) jump[k] = f.u[k - 1] - (k < f.n ? f.u[k] : 0.0);
    double ref = 0.0;
    for (std::size_t k = 1; k <= f.n; ++k) {
      for (std::size_t l = 1; l <= f.n; ++l) {
        const double xk = std::min(k, l) * f.delta;
        const double gap = (std::max(k, l) - std::min(k, l)) * f.delta;
        const double pair =
            gap == 0.0 ? std::pow(xk, 1.0 - 2.0 * g) / (1.0 - 2.0 * g)
                       : ts.integrate([&](double s) { return std::pow(s, -g) * std::pow(s + gap, -g); },
                                      0.0, xk);
        ref += jump[k] * jump[l] * pair;
      }
    }
    ref /= std::pow(std::tgamma(1.0 - g), 2.0);
    CHECK(rel(marchaud_l2_norm_sq(f, FracOrder(g)), ref) < 1e-8);
  }
}

TEST_CASE("marchaud_l2_norm_sq scales by 2^{2 gamma - 1} when delta halves") {
  std::mt19937_64 rng(46);
  for (const double g : {0.1, 0.3}) {
    const auto f = random_step(rng, 8);
    const StepFunction half(f.u, f.delta / 2.0);
    const double ratio =
        marchaud_l2_norm_sq(half, FracOrder(g)) / marchaud_l2_norm_sq(f, FracOrder(g));
    CHECK(ratio == doctest::Approx(std::pow(2.0, 2.0 * g - 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("marchaud_l2_norm_sq <= C delta^{1-2 gamma} sum u^2 with C from n = 16") {
  const double g = 0.2;
  const auto worst_ratio = [&](std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto f = random_step(rng, n);
      double ss = 0.0;
      for (const double v : f.u) ss += v * v;
      worst = std::max(worst, marchaud_l2_norm_sq(f, FracOrder(g)) /
                                  (std::pow(f.delta, 1.0 - 2.0 * g) * ss));
    }
    return worst;
  };
  const double C = worst_ratio(16, 47);
  const double at64 = worst_ratio(64, 48);
  MESSAGE("C(16) = " << C << ", max ratio at n = 64: " << at64);
  CHECK(at64 <= 1.05 * C);
}

TEST_CASE("c_H and the isometry constant") {
  CHECK(rel(c_H_constant(HurstParameter(0.75)), kCH075) < 1e-13);
  CHECK(rel(c_H_constant(HurstParameter(0.6)), kCH06) < 1e-13);
  CHECK(rel(isometry_constant(HurstParameter(0.75)), kK075) < 1e-13);
  CHECK(rel(isometry_constant(HurstParameter(0.6)), kK06) < 1e-13);
  for (int k = 11; k <= 19; ++k) {
    const HurstParameter H(0.05 * k);
    const double c = c_H_constant(H);
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
    CHECK(c >= isometry_constant(H));
  }
  // (2H - 1) Gamma(H - 1/2) -> 2 as H -> 1/2+, so c_H stays finite with limit sqrt(pi).
  CHECK(rel(c_H_constant(HurstParameter(0.51)), kCH051) < 1e-12);
  CHECK(rel(c_H_constant(HurstParameter(0.5 + 1e-9)), std::sqrt(std::numbers::pi)) < 1e-6);
  CHECK(c_H_constant(HurstParameter(0.51)) < c_H_constant(HurstParameter(0.6)));
  CHECK_THROWS_AS(c_H_constant(HurstParameter(0.5)), DomainError);
  CHECK_THROWS_AS(isometry_constant(HurstParameter(0.4)), DomainError);
}

TEST_CASE("isometry between fractional integrals and the H inner product") {
  const HurstParameter H(0.75);
  const auto ind = StepFunction::on_unit_interval({1.0});
  const auto c = check_isometry(ind, ind, H);
  CHECK(c.rhs == doctest::Approx(kK075).epsilon(1e-12));
  CHECK(c.rel_err < 1e-4);

  std::mt19937_64 rng(49);
  for (int t = 0; t < 5; ++t) {
    const auto f = random_step(rng, 8);
    const auto g = random_step(rng, 8);
    const auto r = check_isometry(f, g, H);
    CHECK(r.rel_err < 1e-4);
    const auto twice = check_isometry(f.scaled(2.0), g, H);
    CHECK(twice.lhs == doctest::Approx(2.0 * r.lhs).epsilon(1e-10));
  }
}

TEST_CASE("fractional-integral inner product: tail series and failure mode") {
  const auto ind = StepFunction::on_unit_interval({1.0});
  const auto r = fractional_integral_l2_inner(ind, ind, FracOrder(0.25));
  CHECK(r.tail > 0.0);
  CHECK(r.tail_remainder < 1e-12 * r.value);
  CHECK_THROWS_AS(fractional_integral_l2_inner(ind, ind, FracOrder(0.25), 0.0), QuadratureError);
}

TEST_CASE("norm bound holds on random step functions") {
  std::mt19937_64 rng(50);
  std::uniform_int_distribution<std::size_t> size(1, 32);
  for (const double h : {0.6, 0.75, 0.9}) {
    double tightest = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto f = random_step(rng, size(rng));
      const auto r = check_norm_bound(f, HurstParameter(h));
      CHECK(r.holds);
      tightest = std::max(tightest, r.lhs / r.rhs);
    }
    MESSAGE("H = " << h << ": max lhs / rhs = " << tightest);
  }
  const auto zero = StepFunction::on_unit_interval(std::vector<double>(4, 0.0));
  const auto z = check_norm_bound(zero, HurstParameter(0.7));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.holds);
}

TEST_CASE("quadratic form lower bounds") {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<std::size_t> size(1, 32);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_step(rng, size(rng));
    CHECK(quadratic_lower_bound_check(f, HurstParameter(0.75)).holds);
  }

  const HurstParameter low(0.3);
  const double C = calibrate_lower_bound_constant(16, low, 100, 52);
  CHECK(C > 0.0);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_step(rng, 64);
    CHECK(quadratic_lower_bound_check(f, low, C).holds);
  }
  CHECK_THROWS_AS(quadratic_lower_bound_check(random_step(rng, 4), low), ConfigError);

  std::vector<double> spike(10, 0.0);
  spike[0] = 1.0;
  const auto e1 = StepFunction::on_unit_interval(spike);
  const auto r = quadratic_lower_bound_check(e1, HurstParameter(0.8));
  CHECK(r.qform == doctest::Approx(std::pow(0.1, 1.6)).epsilon(1e-14));
  CHECK(r.qform > 0.0);
}

TEST_CASE("appendix integrals") {
  const FracOrder g(0.2);
  CHECK(rel(appendix_I_integral(0, 1, 1, g), kI011) < 1e-10);
  CHECK(rel(appendix_I_integral(0, 1, 3, g), kI013) < 1e-10);
  CHECK(rel(appendix_I_integral(0, 2, 3, g), kI023) < 1e-10);
  CHECK(rel(appendix_I_integral(5, 6, 8, g), kI013) < 1e-10);
  CHECK_THROWS_AS(appendix_I_integral(3, 3, 5, g), DomainError);

  // Doubled node count on the smooth case.
  const double ref = boost::math::quadrature::gauss<double, 40>::integrate(
      [](double s) {
        const double v = std::pow(3.0 - s, -0.2) - std::pow(2.0 - s, -0.2);
        return v * v;
      },
      0.0, 1.0);
  CHECK(std::fabs(appendix_I_integral(0, 2, 2, g) - ref) < 1e-8 * ref);

  for (const double gm : {0.1, 0.2, 0.4}) {
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t a = i + 1; a < 8; ++a) {
        for (std::size_t b = i + 1; b < 8; ++b) {
          const double x = appendix_I_integral(i, a, b, FracOrder(gm));
          CHECK(x >= 0.0);
          CHECK(std::fabs(x - appendix_I_integral(i, b, a, FracOrder(gm))) <= 1e-10 * x);
        }
      }
    }
  }
}

TEST_CASE("appendix bound report") {
  const auto r = verify_appendix_bounds(8, FracOrder(0.2), 20, 53);
  CHECK(r.max_A > 0.0);
  CHECK(std::isfinite(r.max_A));
  CHECK(r.max_B > 0.0);
  CHECK(r.a_within_bound);
  CHECK(r.a.back() == 0.0);

  // Uniform u: A = mean of a_i.
  double mean_a = 0.0;
  for (const double v : r.a) mean_a += v / 8.0;
  CHECK(mean_a > 0.0);
  CHECK(mean_a <= r.max_A + 1e-12);

  const auto edge = verify_appendix_bounds(16, FracOrder(0.45), 10, 54);
  CHECK(std::isfinite(edge.max_A));
  CHECK(edge.a_within_bound);
  MESSAGE("gamma = 0.45, n = 16: max A " << edge.max_A << ", max B " << edge.max_B
                                          << ", a_i limit " << edge.a_bound);
  CHECK_THROWS_AS(verify_appendix_bounds(65, FracOrder(0.2), 5, 1), ConfigError);
}
