#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "relgrow/numerics.hpp"
#include "relgrow/series.hpp"

namespace relgrow::dist {

/// Weibull(a = scale, b = shape), Gamma(a = shape, b = scale), and their
/// one-parameter special cases: Rayleigh is Weibull with b = 2, S-shaped is
/// Gamma with a = 2.
enum class Family { Weibull, Gamma, Rayleigh, SShaped };

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view name);
/// Number of free shape parameters (C not included).
int free_params(Family family) noexcept;

struct Model {
  Family family = Family::Weibull;
  double a = 1.0;
  double b = 1.0;

  Model() = default;
  /// Throws Errc::Domain for non-positive parameters or a constrained family
  /// whose fixed parameter is not exactly 2.
  Model(Family family, double a, double b);

  static Model weibull(double a, double b) { return {Family::Weibull, a, b}; }
  static Model gamma(double a, double b) { return {Family::Gamma, a, b}; }
  static Model rayleigh(double a) { return {Family::Rayleigh, a, 2.0}; }
  static Model s_shaped(double b) { return {Family::SShaped, 2.0, b}; }
};

double pdf(const Model& model, double t);
double cdf(const Model& model, double t);

/// Time of the density peak; nullopt when the density is monotone
/// decreasing (Weibull b <= 1, Gamma a <= 1).
std::optional<double> tmax(const Model& model);

/// cdf at tmax. Throws Errc::UndefinedTmax when tmax is undefined.
double fraction_by_tmax(const Model& model);

struct Fit {
  Model model;
  numerics::ConfidenceInterval c;
  std::vector<numerics::ConfidenceInterval> param_cis;  // free params, in (a, b) order
  int tmax_observed = 0;
  std::optional<double> tmax_estimated;
  std::optional<double> fraction_by_tmax;
  double rmse = 0.0;
  double adj_r_square = 0.0;  // NaN when undefined (too few bins, constant data)
  double mre = 0.0;
  double sse = 0.0;
  int n_bins = 0;
  double total = 0.0;
  bool integrated_mass = false;
  int iterations = 0;

  /// Free parameters including C.
  int n_params() const noexcept { return 1 + free_params(model.family); }
};

struct FitOptions {
  /// Fit C·(F(i) - F(i-1)) instead of C·f(i).
  bool integrated_mass = false;
  /// Extra jittered optimizer restarts.
  int restarts = 2;
  std::uint64_t seed = 0;
  double level = 0.95;
};

/// Least-squares fit of C·f(t; a, b) to per-bin counts at t = 1..K.
/// Throws Errc::TooFewBins, Errc::AllZeroCounts, Errc::FitDiverged.
Fit fit(const GroupedCounts& counts, Family family, const FitOptions& options = {});

/// Model value for bin t: C·f(t), or C·(F(t) - F(t-1)) for integrated fits.
double expected_count(const Fit& fit, int t);
std::vector<double> expected_counts(const Fit& fit, int n_bins);

/// Ĉ(t) = C · cdf(t).
double predicted_cumulative(const Fit& fit, double t);

enum class Noise { None, Poisson };

GroupedCounts generate_counts(const Model& model, double c, int n_bins, Noise noise,
                              std::uint64_t seed);

}  // namespace relgrow::dist
