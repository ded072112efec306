#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "relgrow/numerics.hpp"
#include "relgrow/series.hpp"

namespace relgrow::srgm {

/// Growth-model families, all of the form μ(t) = scale · g(rate, t).
///  - NhppExponential: N(1 - e^{-bt}), the exponential NHPP form
///  - MusaBasic:       β0(1 - e^{-β1 t}), execution-time exponential model
///  - MusaOkumoto:     β0 ln(1 + β1 t), logarithmic Poisson model
///  - PowerLaw:        λ t^β, Crow-AMSAA power law
enum class Kind { NhppExponential, MusaBasic, MusaOkumoto, PowerLaw };

std::string_view to_string(Kind kind) noexcept;
/// Human-readable formula label used in reports.
std::string_view formula(Kind kind) noexcept;
Kind parse_kind(std::string_view name);

struct Model {
  Kind kind = Kind::NhppExponential;
  double scale = 1.0;
  double rate = 1.0;

  Model() = default;
  /// Throws Errc::Domain unless both parameters are finite and positive.
  Model(Kind kind, double scale, double rate);
};

double mean_value(const Model& model, double t);
double intensity(const Model& model, double t);

/// Σ ln λ(tᵢ) - μ(T).
double log_likelihood(const Model& model, std::span<const double> times, double observation_end);

struct Fit {
  Model model;
  double log_likelihood = 0.0;
  std::array<numerics::ConfidenceInterval, 2> param_cis;  // scale, rate
  int n_events = 0;
  double observation_end = 1.0;
};

struct MleOptions {
  double level = 0.95;
  /// The profiled scale exceeding this multiple of the event count marks an
  /// unbounded likelihood.
  double divergence_factor = 1e6;
};

/// Maximum-likelihood fit on event times in (0, observation_end]. The scale is
/// profiled out in closed form (scale = n / g(rate, T)); the rate is searched
/// in log space. Intervals come from the observed information matrix.
/// Throws Errc::TooFewEvents (< 3 events) and Errc::NoFiniteMle.
Fit fit_mle(std::span<const double> times, double observation_end, Kind kind,
            const MleOptions& options = {});
Fit fit_mle(const NormalizedTimes& times, Kind kind, const MleOptions& options = {});

/// Event times of the NHPP on [0, horizon], seeded and reproducible. Uses
/// thinning against the largest intensity on the interval, or inversion of μ
/// when the intensity is unbounded (power law with rate < 1).
std::vector<double> generate_events(const Model& model, double horizon, std::uint64_t seed);

}  // namespace relgrow::srgm
