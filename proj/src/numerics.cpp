#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "relgrow/error.hpp"
#include "relgrow/numerics.hpp"

namespace relgrow::numerics {
namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};
constexpr double kGammaMax = 171.6243769563027;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 100000;

double lanczos_sum(double xm1) {
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (xm1 + i);
  return a;
}

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::Domain, std::string(what) + ": probability must lie in (0,1)");
}

// P(a,x) by its power series; valid for x < a + 1.
double gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxTerms; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Q(a,x) = 1 - P(a,x) by the modified Lentz continued fraction; x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxTerms; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// Smallest x in [lo, hi] with cdf(x) >= prob, to absolute width tol.
template <typename Cdf>
double bisect(Cdf&& cdf, double prob, double lo, double hi, double tol) {
  for (int i = 0; i < 400 && hi - lo > tol * std::max(1.0, std::abs(hi)); ++i) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < prob)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw Error(Errc::Domain, "gamma_fn requires x > 0");
  if (x > kGammaMax) throw Error(Errc::Overflow, "gamma_fn overflows for x = " + std::to_string(x));
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  // t^(x-1/2) split in halves so the power cannot overflow before e^-t scales it.
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_sum(xm1);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error(Errc::Domain, "log_gamma requires x > 0");
  if (x < 0.5)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
         std::log(lanczos_sum(xm1));
}

double reg_inc_gamma_lower(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw Error(Errc::Domain, "reg_inc_gamma_lower requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::min(1.0, gamma_series(a, x));
  return std::max(0.0, 1.0 - gamma_continued_fraction(a, x));
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
    throw Error(Errc::Domain, "reg_inc_beta requires a, b > 0 and x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double chi2_cdf(int df, double x) {
  if (df < 1) throw Error(Errc::Domain, "chi2 requires df >= 1");
  if (x <= 0.0) return 0.0;
  return reg_inc_gamma_lower(0.5 * df, 0.5 * x);
}

double chi2_inverse(int df, double prob) {
  if (df < 1) throw Error(Errc::Domain, "chi2_inverse requires df >= 1");
  require_probability(prob, "chi2_inverse");
  double hi = std::max(1.0, double(df));
  while (chi2_cdf(df, hi) < prob) hi *= 2.0;
  return bisect([df](double v) { return chi2_cdf(df, v); }, prob, 0.0, hi, 1e-14);
}

double t_cdf(int df, double t) {
  if (df < 1) throw Error(Errc::Domain, "t distribution requires df >= 1");
  const double nu = df;
  const double tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, nu / (nu + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double t_inverse(int df, double prob) {
  if (df < 1) throw Error(Errc::Domain, "t_inverse requires df >= 1");
  require_probability(prob, "t_inverse");
  if (prob == 0.5) return 0.0;
  if (prob < 0.5) return -t_inverse(df, 1.0 - prob);
  double hi = 1.0;
  while (t_cdf(df, hi) < prob) hi *= 2.0;
  return bisect([df](double v) { return t_cdf(df, v); }, prob, 0.0, hi, 1e-14);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double prob) {
  require_probability(prob, "normal_quantile");
  if (prob == 0.5) return 0.0;
  if (prob < 0.5) return -normal_quantile(1.0 - prob);
  double hi = 1.0;
  while (normal_cdf(hi) < prob) hi *= 2.0;
  return bisect(normal_cdf, prob, 0.0, hi, 1e-14);
}

}  // namespace relgrow::numerics
