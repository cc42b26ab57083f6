#include "quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

namespace roughmle::quad {

double gauss_legendre(const Integrand& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

double graded_left(const Integrand& f, double a, double b, int levels, double ratio) {
  const double w = b - a;
  double sum = 0.0;
  double outer = 1.0;
  for (int m = 0; m < levels; ++m) {
    const double inner = outer * ratio;
    sum += gauss_legendre(f, a + w * inner, a + w * outer);
    outer = inner;
  }
  return sum + gauss_legendre(f, a, a + w * outer);
}

double graded_left_singular(const Integrand& f, double a, double b, const LeftSingularity& s,
                            int levels, double ratio) {
  const double w = b - a;
  double sum = 0.0;
  double outer = 1.0;
  for (int m = 0; m < levels; ++m) {
    const double inner = outer * ratio;
    sum += gauss_legendre(f, a + w * inner, a + w * outer);
    outer = inner;
  }
  const double x0 = w * outer;
  const double g = s.gamma;
  sum += s.c2 * std::pow(x0, 1.0 - 2.0 * g) / (1.0 - 2.0 * g);
  sum += s.c1 * std::pow(x0, 1.0 - g) / (1.0 - g);
  sum += s.c0 * x0;
  return sum;
}

}  // namespace roughmle::quad
