#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "relgrow/error.hpp"
#include "relgrow/numerics.hpp"

using namespace relgrow;
using namespace relgrow::numerics;

TEST_CASE("gamma anchors and recurrence") {
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(std::abs(gamma_fn(6.0) - 120.0) < 1e-10);
  CHECK(std::abs(gamma_fn(1.0) - 1.0) < 1e-12);
  for (double x : {0.1, 0.7, 1.3, 2.5, 4.2, 9.9, 17.5, 30.25}) {
    CAPTURE(x);
    CHECK(oracle::rel_err(gamma_fn(x + 1.0), x * gamma_fn(x)) < 1e-10);
    CHECK(oracle::rel_err(gamma_fn(x), std::tgamma(x)) < 1e-12);
    CHECK(std::abs(log_gamma(x) - std::lgamma(x)) < 1e-10 * std::max(1.0, std::abs(std::lgamma(x))));
  }
  CHECK(log_gamma(500.0) == doctest::Approx(std::lgamma(500.0)).epsilon(1e-12));
}

TEST_CASE("gamma domain and overflow") {
  CHECK_THROWS_AS(gamma_fn(0.0), Error);
  CHECK_THROWS_AS(gamma_fn(-1.0), Error);
  try {
    gamma_fn(180.0);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Overflow);
  }
  CHECK(std::isfinite(gamma_fn(171.5)));
}

TEST_CASE("regularized incomplete gamma") {
  CHECK(std::abs(reg_inc_gamma_lower(2.0, 1.0) - 0.2642411) < 1e-7);
  CHECK(std::abs(reg_inc_gamma_lower(2.0, 1.0) - (1.0 - 2.0 / std::numbers::e)) < 1e-12);
  for (double a : {1.0, 2.5, 6.141, 29.64})
    for (double x : {0.3, 1.0, 5.0, 28.0, 60.0}) {
      CAPTURE(a);
      CAPTURE(x);
      CHECK(std::abs(reg_inc_gamma_lower(a, x) - oracle::inc_gamma_lower(a, x)) < 1e-8);
    }
  CHECK(reg_inc_gamma_lower(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(reg_inc_gamma_lower(0.0, 1.0), Error);
  CHECK_THROWS_AS(reg_inc_gamma_lower(1.0, -1.0), Error);
}

TEST_CASE("regularized incomplete beta") {
  for (double a : {1.0, 2.0, 4.5})
    for (double b : {1.0, 3.0, 7.5})
      for (double x : {0.1, 0.4, 0.8}) {
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(x);
        CHECK(std::abs(reg_inc_beta(a, b, x) - oracle::inc_beta(a, b, x)) < 1e-8);
      }
  CHECK(reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("distribution quantiles") {
  CHECK(chi2_inverse(1, 0.95) == doctest::Approx(3.841458820694124).epsilon(1e-9));
  CHECK(chi2_inverse(10, 0.9) == doctest::Approx(15.987179172105261).epsilon(1e-9));
  CHECK(chi2_cdf(2, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(t_inverse(1, 0.975) == doctest::Approx(12.706204736174707).epsilon(1e-9));
  CHECK(t_inverse(8, 0.975) == doctest::Approx(2.306004135204166).epsilon(1e-9));
  CHECK(t_cdf(1, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(t_cdf(5, 0.0) == doctest::Approx(0.5));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(chi2_inverse(0, 0.5), Error);
  CHECK_THROWS_AS(normal_quantile(1.0), Error);
}

TEST_CASE("nelder-mead minimizes rosenbrock") {
  auto rosen = [](const Vector& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  Vector start(2);
  start << -1.2, 1.0;
  NelderMeadOptions opt;
  opt.tolerance = 1e-16;
  opt.x_tolerance = 1e-10;
  const auto r = nelder_mead(rosen, start, opt);
  CHECK(r.converged);
  CHECK(std::abs(r.argmin[0] - 1.0) < 1e-5);
  CHECK(std::abs(r.argmin[1] - 1.0) < 1e-5);
}

TEST_CASE("nelder-mead is deterministic with restarts") {
  auto f = [](const Vector& x) { return std::pow(x[0] - 3.0, 2) + std::abs(std::sin(5.0 * x[0])) * 0.1; };
  Vector start(1);
  start << 0.0;
  NelderMeadOptions opt;
  opt.restarts = 4;
  opt.seed = 11;
  const auto a = nelder_mead(f, start, opt);
  const auto b = nelder_mead(f, start, opt);
  CHECK(a.argmin[0] == b.argmin[0]);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("nelder-mead rejects a non-finite start") {
  auto f = [](const Vector&) { return std::nan(""); };
  CHECK_THROWS_AS(nelder_mead(f, Vector(Vector::Zero(2)), NelderMeadOptions{}), Error);
}

TEST_CASE("asymptotic intervals match ordinary least squares") {
  const int n = 10;
  Vector x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = i + 1.0;
    y[i] = 1.5 + 0.7 * x[i] + ((i * 7) % 5 - 2) * 0.3;
  }
  const double xbar = x.mean(), ybar = y.mean();
  const double sxx = (x.array() - xbar).square().sum();
  const double slope = ((x.array() - xbar) * (y.array() - ybar)).sum() / sxx;
  const double icpt = ybar - slope * xbar;
  const double sse = (y.array() - icpt - slope * x.array()).square().sum();
  const double s2 = sse / (n - 2);
  const double t = 2.306004135204166;
  const double se_icpt = std::sqrt(s2 * (1.0 / n + xbar * xbar / sxx));
  const double se_slope = std::sqrt(s2 / sxx);

  auto residuals = [&](const Vector& th) -> Vector { return (y.array() - th[0] - th[1] * x.array()).matrix(); };
  Vector at(2);
  at << icpt, slope;
  const auto ci = asymptotic_ci(residuals, at, n);
  REQUIRE(ci.size() == 2);
  CHECK(ci[0].half_width() == doctest::Approx(t * se_icpt).epsilon(1e-6));
  CHECK(ci[1].half_width() == doctest::Approx(t * se_slope).epsilon(1e-6));
  CHECK(ci[1].contains(slope));
}

TEST_CASE("asymptotic intervals need spare degrees of freedom") {
  auto residuals = [](const Vector& th) -> Vector { return th; };
  CHECK_THROWS_AS(asymptotic_ci(residuals, Vector::Ones(2), 2), Error);
}

TEST_CASE("jacobian and hessian of smooth functions") {
  auto r = [](const Vector& th) -> Vector {
    Vector out(2);
    out << th[0] * th[0], std::exp(th[1]);
    return out;
  };
  Vector at(2);
  at << 1.5, 0.3;
  const Matrix j = jacobian(r, at);
  CHECK(j(0, 0) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(j(1, 1) == doctest::Approx(std::exp(0.3)).epsilon(1e-8));
  CHECK(std::abs(j(0, 1)) < 1e-10);

  auto f = [](const Vector& th) { return th[0] * th[0] * th[1] + 3.0 * th[1] * th[1]; };
  const Matrix h = hessian(f, at);
  CHECK(h(0, 0) == doctest::Approx(2.0 * 0.3).epsilon(1e-5));
  CHECK(h(0, 1) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(h(1, 1) == doctest::Approx(6.0).epsilon(1e-5));
}
