#pragma once

// Reference computations used only by the tests. They are deliberately
// written without the library's numerics.

#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Lower regularized incomplete gamma by quadrature, a >= 1.
inline double inc_gamma_lower(double a, double x) {
  return simpson([a](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, 0.0, x) / std::tgamma(a);
}

/// Regularized incomplete beta by quadrature, a, b >= 1.
inline double inc_beta(double a, double b, double x) {
  auto f = [a, b](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); };
  return simpson(f, 0.0, x) / simpson(f, 0.0, 1.0);
}

inline double weibull_pdf(double a, double b, double t) {
  return (b / a) * std::pow(t / a, b - 1.0) * std::exp(-std::pow(t / a, b));
}

inline double gamma_pdf(double a, double b, double t) {
  return std::pow(t, a - 1.0) * std::exp(-t / b) / (std::tgamma(a) * std::pow(b, a));
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace oracle
