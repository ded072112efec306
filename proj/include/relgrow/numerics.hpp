#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace relgrow::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Gamma function via the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2. Throws Errc::Domain for x <= 0 and
/// Errc::Overflow once the result exceeds the double range (x > ~171.6).
double gamma_fn(double x);

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
/// continued fraction otherwise.
double reg_inc_gamma_lower(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

double chi2_cdf(int df, double x);
/// Inverse χ² CDF by bisection on reg_inc_gamma_lower(df/2, x/2).
double chi2_inverse(int df, double prob);

double t_cdf(int df, double t);
double t_inverse(int df, double prob);

double normal_cdf(double z);
double normal_quantile(double prob);

// ---------------------------------------------------------------------------
// Minimization
// ---------------------------------------------------------------------------

using Objective = std::function<double(const Vector&)>;

struct MinimizeResult {
  Vector argmin;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double tolerance = 1e-10;    // max - min objective over the simplex
  double x_tolerance = 1e-8;   // simplex extent relative to 1 + |best|
  int max_iter = 20000;
  double initial_step = 0.1;   // per-coordinate, scaled by max(1, |x_i|)
  int restarts = 0;            // extra runs from jittered starts; best kept
  std::uint64_t seed = 0;
  double jitter = 0.25;
};

/// Derivative-free simplex minimization. Deterministic for identical inputs.
/// Non-finite objective values are treated as +inf. When the iteration budget
/// runs out the best vertex is returned with converged = false.
MinimizeResult nelder_mead(const Objective& objective, const Vector& start,
                           const NelderMeadOptions& options);
MinimizeResult nelder_mead(const Objective& objective, const Vector& start, double tolerance,
                           int max_iter);

// ---------------------------------------------------------------------------
// Curve-fit uncertainty
// ---------------------------------------------------------------------------

struct ConfidenceInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  bool bounded = true;  // false when the information matrix was singular

  double half_width() const { return 0.5 * (upper - lower); }
  bool contains(double value) const { return lower <= value && value <= upper; }
};

using ResidualFn = std::function<Vector(const Vector&)>;

/// Central-difference Jacobian of the residual vector, step max(1e-6, 1e-6|θ_j|).
Matrix jacobian(const ResidualFn& residuals, const Vector& at);

/// Central-difference Hessian of a scalar function, step 1e-4 * max(|θ_j|, 1e-3).
Matrix hessian(const Objective& f, const Vector& at);

/// Student-t intervals from the asymptotic covariance σ̂²(JᵀJ)⁻¹ of a
/// least-squares fit, σ̂² = SSE / (n_obs - p). A rank-deficient Jacobian yields
/// unbounded intervals (bounded = false, ±inf limits).
std::vector<ConfidenceInterval> asymptotic_ci(const ResidualFn& residuals, const Vector& argmin,
                                              int n_obs, double level = 0.95);

/// Normal-theory intervals estimate ± z·sqrt(diag(cov)).
std::vector<ConfidenceInterval> wald_ci(const Vector& estimate, const Matrix& covariance,
                                        double level = 0.95);

}  // namespace relgrow::numerics
