#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "roughmle/types.hpp"

namespace roughmle {

/// f = sum_i u_i 1_{(i delta, (i+1) delta]}, zero outside [0, n delta].
struct StepFunction {
  std::size_t n = 0;
  double delta = 0.0;
  std::vector<double> u;

  StepFunction() = default;
  StepFunction(std::vector<double> coeffs, double delta);
  /// Cells of width 1/n on [0, 1].
  static StepFunction on_unit_interval(std::vector<double> coeffs);

  double support_end() const noexcept { return static_cast<double>(n) * delta; }
  /// delta * sum u_i^2.
  double l2_norm_sq() const noexcept;
  double operator()(double t) const noexcept;
  StepFunction scaled(double c) const;
};

/// Fractional order gamma in (0, 1/2).
class FracOrder {
 public:
  explicit FracOrder(double gamma);
  double value() const noexcept { return gamma_; }

 private:
  double gamma_;
};

/// u^T P v with P the fGN covariance on the functions' grid.
double h_inner_product(const StepFunction& f, const StepFunction& g, HurstParameter H);

/// H(2H-1) int int |s-t|^{2H-2} f(s) g(t) ds dt from the per-rectangle
/// antiderivative. DomainError unless H > 1/2.
double weighted_double_integral(const StepFunction& f, const StepFunction& g, HurstParameter H);

/// 1/2 H(1-2H) int int (f(x)-f(y))^2 |x-y|^{2H-2} dx dy over R^2, summed over
/// pairs of constancy regions. DomainError unless H < 1/2.
double sobolev_seminorm(const StepFunction& f, HurstParameter H);

/// Riemann-Liouville integral (1/Gamma(g)) int_0^t (t-s)^{g-1} f(s) ds, closed
/// form. DomainError for t < 0.
double fractional_integral(const StepFunction& f, FracOrder gamma, double t);

/// Right-sided Marchaud derivative
/// (g / Gamma(1-g)) int_t^inf (f(t) - f(s)) (s-t)^{-1-g} ds of a step function.
class MarchaudDerivative {
 public:
  MarchaudDerivative(StepFunction f, FracOrder gamma);

  /// Value at t >= 0 off the grid points k delta (DomainError there).
  /// Zero beyond the support.
  double operator()(double t) const;

  /// Coefficients (A, B) of D(t) = A (b - t)^{-g} + B + O(b - t) as t -> b
  /// on cell i, with b = (i+1) delta.
  std::pair<double, double> right_expansion(std::size_t cell) const;

  const StepFunction& function() const noexcept { return f_; }
  double gamma() const noexcept { return gamma_; }

 private:
  StepFunction f_;
  double gamma_;
  double inv_gamma_fn_;  // 1 / Gamma(1 - g)
};

MarchaudDerivative marchaud_derivative(const StepFunction& f, FracOrder gamma);

/// ||D f||^2 over R+, graded Gauss-Legendre per cell with a closed-form
/// correction for the (b - t)^{-g} endpoint behaviour.
double marchaud_l2_norm_sq(const StepFunction& f, FracOrder gamma);

/// Gamma(2-2H)Gamma(1-H) / (H(2H-1) Gamma(3/2-H) Gamma(H-1/2)), for 1/2 < H < 1.
double c_H_constant(HurstParameter H);

/// 2^{1-2H} Gamma(1-H) / (H(2H-1) Gamma(H-1/2) sqrt(pi)): the constant K in
/// <I^{H-1/2} f, I^{H-1/2} g>_{L2(R+)} = K <f, g>_H.
double isometry_constant(HurstParameter H);

struct FractionalL2Inner {
  double value = 0.0;
  double tail = 0.0;            // analytic contribution of [t_max, inf)
  double tail_remainder = 0.0;  // bound on what the tail series drops
};

/// <I^g f, I^g g>_{L2(R+)}: graded quadrature on [0, t_max], moment series
/// beyond. QuadratureError if the tail remainder exceeds rel_tol * |value|.
FractionalL2Inner fractional_integral_l2_inner(const StepFunction& f, const StepFunction& g,
                                               FracOrder gamma, double rel_tol = 1e-5);

struct IsometryCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};
IsometryCheck check_isometry(const StepFunction& f, const StepFunction& g, HurstParameter H);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||f||^2_{L2} <= sqrt(c_H) ||f||_H ||D^{H-1/2} f||_{L2}.
InequalityCheck check_norm_bound(const StepFunction& f, HurstParameter H);

struct LowerBoundCheck {
  double qform = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// H > 1/2: u^T P u >= ||f||^4_{L2} / (c_H ||D^{H-1/2} f||^2).
/// H < 1/2: u^T P u >= C delta sum u_i^2 with a calibrated C (required).
LowerBoundCheck quadratic_lower_bound_check(const StepFunction& f, HurstParameter H,
                                            std::optional<double> small_h_constant = {});

/// Minimum of u^T P u / (delta sum u_i^2) over `trials` random u on n unit cells.
double calibrate_lower_bound_constant(std::size_t n, HurstParameter H, std::size_t trials,
                                      std::uint64_t seed);

/// int_i^{i+1} g_{j1}(s) g_{j2}(s) ds with g_j(s) = (j+1-s)^{-g} - (j-s)^{-g}.
double appendix_I_integral(std::size_t i, std::size_t j1, std::size_t j2, FracOrder gamma);

struct AppendixReport {
  std::size_t n = 0;
  double gamma = 0.0;
  std::size_t trials = 0;
  /// a_i = sum_{j1,j2>i} I(i,j1,j2); b_j = sum_{i<j} sum_{j1>i} I(i,j1,j).
  std::vector<double> a;
  std::vector<double> b;
  /// Max over random unit u of sum u_i^2 a_i and sum u_j^2 b_j.
  double max_A = 0.0;
  double max_B = 0.0;
  /// n-free bound a_i <= 1 / (1 - 2g).
  double a_bound = 0.0;
  bool a_within_bound = false;
};

AppendixReport verify_appendix_bounds(std::size_t n, FracOrder gamma, std::size_t trials,
                                      std::uint64_t seed);

}  // namespace roughmle
