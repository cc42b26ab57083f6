#pragma once

#include <functional>

// Internal Gauss-Legendre helpers shared by the fractional operators.
namespace roughmle::quad {

using Integrand = std::function<double(double)>;

/// 20-point Gauss-Legendre on [a, b].
double gauss_legendre(const Integrand& f, double a, double b);

/// Panels [a + w r^{m+1}, a + w r^m], m < levels, plus the innermost piece,
/// each by 20-point Gauss-Legendre. For integrands with a bounded cusp at a.
double graded_left(const Integrand& f, double a, double b, int levels, double ratio = 0.25);

/// Integrand behaving like c2 x^{-2g} + c1 x^{-g} + c0 in x = t - a near a.
struct LeftSingularity {
  double gamma = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
};

/// Graded panels toward a; the innermost piece [a, a + x0] is integrated
/// from the leading expansion in closed form.
double graded_left_singular(const Integrand& f, double a, double b, const LeftSingularity& s,
                            int levels, double ratio = 0.25);

}  // namespace roughmle::quad
