#include "relgrow/srgm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "relgrow/error.hpp"

namespace relgrow::srgm {
namespace {

using numerics::Vector;

// μ(t) / scale.
double shape(Kind kind, double rate, double t) {
  switch (kind) {
    case Kind::NhppExponential:
    case Kind::MusaBasic:
      return -std::expm1(-rate * t);
    case Kind::MusaOkumoto:
      return std::log1p(rate * t);
    case Kind::PowerLaw:
      return std::pow(t, rate);
  }
  return 0.0;
}

// ln(λ(t) / scale).
double log_shape_rate(Kind kind, double rate, double t) {
  switch (kind) {
    case Kind::NhppExponential:
    case Kind::MusaBasic:
      return std::log(rate) - rate * t;
    case Kind::MusaOkumoto:
      return std::log(rate) - std::log1p(rate * t);
    case Kind::PowerLaw:
      return std::log(rate) + (rate - 1.0) * std::log(t);
  }
  return 0.0;
}

double inverse_mean_value(const Model& m, double mu) {
  switch (m.kind) {
    case Kind::NhppExponential:
    case Kind::MusaBasic:
      return -std::log1p(-mu / m.scale) / m.rate;
    case Kind::MusaOkumoto:
      return std::expm1(mu / m.scale) / m.rate;
    case Kind::PowerLaw:
      return std::pow(mu / m.scale, 1.0 / m.rate);
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::NhppExponential: return "nhpp";
    case Kind::MusaBasic: return "musa-basic";
    case Kind::MusaOkumoto: return "musa-okumoto";
    case Kind::PowerLaw: return "power-law";
  }
  return "nhpp";
}

std::string_view formula(Kind kind) noexcept {
  switch (kind) {
    case Kind::NhppExponential: return "NHPP exponential mu(t)=N(1-exp(-b t))";
    case Kind::MusaBasic: return "Musa basic mu(t)=b0(1-exp(-b1 t))";
    case Kind::MusaOkumoto: return "Musa-Okumoto mu(t)=b0 ln(1+b1 t)";
    case Kind::PowerLaw: return "Crow-AMSAA power law mu(t)=lambda t^beta";
  }
  return "";
}

Kind parse_kind(std::string_view name) {
  if (name == "nhpp" || name == "exp" || name == "nhpp-exponential") return Kind::NhppExponential;
  if (name == "musa-basic") return Kind::MusaBasic;
  if (name == "musa-okumoto") return Kind::MusaOkumoto;
  if (name == "power-law" || name == "crow-amsaa") return Kind::PowerLaw;
  throw Error(Errc::InvalidArgument, "unknown SRGM kind '" + std::string(name) + "'");
}

Model::Model(Kind kind_, double scale_, double rate_) : kind(kind_), scale(scale_), rate(rate_) {
  if (!(std::isfinite(scale) && scale > 0.0 && std::isfinite(rate) && rate > 0.0))
    throw Error(Errc::Domain, "SRGM parameters must be positive");
}

double mean_value(const Model& model, double t) {
  if (t <= 0.0) return 0.0;
  return model.scale * shape(model.kind, model.rate, t);
}

double intensity(const Model& model, double t) {
  if (t < 0.0) t = 0.0;
  if (t == 0.0 && model.kind == Kind::PowerLaw) {
    if (model.rate < 1.0) return std::numeric_limits<double>::infinity();
    return model.rate == 1.0 ? model.scale : 0.0;
  }
  return model.scale * std::exp(log_shape_rate(model.kind, model.rate, t));
}

double log_likelihood(const Model& model, std::span<const double> times, double observation_end) {
  double ll = -mean_value(model, observation_end);
  const double log_scale = std::log(model.scale);
  for (double t : times) ll += log_scale + log_shape_rate(model.kind, model.rate, t);
  return ll;
}

Fit fit_mle(std::span<const double> times, double observation_end, Kind kind,
            const MleOptions& options) {
  const auto n = int(times.size());
  if (n < 3) throw Error(Errc::TooFewEvents, "MLE needs at least 3 events, got " + std::to_string(n));
  if (!(observation_end > 0.0)) throw Error(Errc::Domain, "observation end must be positive");
  for (double t : times)
    if (!(t > 0.0 && t <= observation_end))
      throw Error(Errc::Domain, "event times must lie in (0, observation_end]");

  const double nd = n;
  auto profiled_scale = [&](double rate) { return nd / shape(kind, rate, observation_end); };
  auto negative_profile = [&](const Vector& x) {
    const double rate = std::exp(x[0]);
    const double scale = profiled_scale(rate);
    if (!(scale > 0.0) || !std::isfinite(scale)) return std::numeric_limits<double>::infinity();
    double ll = nd * std::log(scale) - nd;
    for (double t : times) ll += log_shape_rate(kind, rate, t);
    return -ll;
  };

  // Coarse scan in log-rate, then refine from the best grid point.
  double best_x = 0.0, best_v = std::numeric_limits<double>::infinity();
  for (double x = -20.0; x <= 12.0; x += 0.5) {
    const double v = negative_profile(Vector::Constant(1, x));
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  if (!std::isfinite(best_v)) throw Error(Errc::NoFiniteMle, "likelihood is not finite for any rate");

  numerics::NelderMeadOptions nm;
  nm.tolerance = 1e-12 * std::max(1.0, std::abs(best_v));
  nm.x_tolerance = 1e-10;
  nm.initial_step = 0.25;
  auto opt = numerics::nelder_mead(negative_profile, Vector::Constant(1, best_x), nm);

  const double rate = std::exp(opt.argmin[0]);
  const double scale = profiled_scale(rate);
  if (!std::isfinite(scale) || scale > options.divergence_factor * nd)
    throw Error(Errc::NoFiniteMle,
                std::string(to_string(kind)) +
                    ": likelihood grows without bound in the scale parameter (failure intensity is not decreasing)");
  if (!opt.converged) throw Error(Errc::NoFiniteMle, "likelihood maximization did not converge");

  Fit fit;
  fit.model = Model(kind, scale, rate);
  fit.log_likelihood = log_likelihood(fit.model, times, observation_end);
  fit.n_events = n;
  fit.observation_end = observation_end;

  Vector theta(2);
  theta << scale, rate;
  auto negll = [&](const Vector& p) {
    if (p[0] <= 0.0 || p[1] <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -log_likelihood(Model(kind, p[0], p[1]), times, observation_end);
  };
  const numerics::Matrix info = numerics::hessian(negll, theta);
  numerics::Matrix cov = numerics::Matrix::Constant(2, 2, std::numeric_limits<double>::quiet_NaN());
  Eigen::FullPivLU<numerics::Matrix> lu(info);
  if (info.allFinite() && lu.isInvertible()) cov = lu.inverse();
  auto cis = numerics::wald_ci(theta, cov, options.level);
  fit.param_cis = {cis[0], cis[1]};
  return fit;
}

Fit fit_mle(const NormalizedTimes& times, Kind kind, const MleOptions& options) {
  const double end = times.times.empty() ? 1.0 : times.times.back();
  return fit_mle(times.times, end, kind, options);
}

std::vector<double> generate_events(const Model& model, double horizon, std::uint64_t seed) {
  std::vector<double> out;
  if (!(horizon > 0.0)) return out;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // All supported intensities are monotone, so the maximum sits at an end point.
  const double lam_max = std::max(intensity(model, 0.0), intensity(model, horizon));
  if (std::isfinite(lam_max)) {
    double t = 0.0;
    for (;;) {
      t += unit_exp(rng) / lam_max;
      if (t > horizon) break;
      if (unit(rng) * lam_max <= intensity(model, t)) out.push_back(t);
    }
  } else {
    const double total = mean_value(model, horizon);
    double s = 0.0;
    for (;;) {
      s += unit_exp(rng);
      if (s > total) break;
      out.push_back(std::min(horizon, inverse_mean_value(model, s)));
    }
  }
  return out;
}

}  // namespace relgrow::srgm
