#include "relgrow/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "relgrow/error.hpp"
#include "relgrow/gof.hpp"

namespace relgrow::dist {
namespace {

using numerics::Vector;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool valid_params(double a, double b) {
  return std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0;
}

double log_pdf_unchecked(Family family, double a, double b, double t) {
  switch (family) {
    case Family::Weibull:
    case Family::Rayleigh: {
      const double z = t / a;
      return std::log(b / a) + (b - 1.0) * std::log(z) - std::pow(z, b);
    }
    case Family::Gamma:
    case Family::SShaped:
      return (a - 1.0) * std::log(t) - t / b - a * std::log(b) - numerics::log_gamma(a);
  }
  return -kInf;
}

double cdf_unchecked(Family family, double a, double b, double t) {
  if (t <= 0.0) return 0.0;
  switch (family) {
    case Family::Weibull:
    case Family::Rayleigh:
      return -std::expm1(-std::pow(t / a, b));
    case Family::Gamma:
    case Family::SShaped:
      return numerics::reg_inc_gamma_lower(a, t / b);
  }
  return 0.0;
}

// Per-bin basis f_i at t = 1..K for the given shape, or NaN-filled when the
// parameters are outside the valid region.
Vector basis(Family family, double a, double b, int n_bins, bool integrated) {
  Vector f(n_bins);
  if (!valid_params(a, b)) return Vector::Constant(n_bins, kNaN);
  double prev = 0.0;
  for (int i = 0; i < n_bins; ++i) {
    const double t = i + 1.0;
    if (integrated) {
      const double cur = cdf_unchecked(family, a, b, t);
      f[i] = cur - prev;
      prev = cur;
    } else {
      f[i] = std::exp(log_pdf_unchecked(family, a, b, t));
    }
  }
  return f;
}

// Shape parameters from the optimizer's log-space vector.
std::pair<double, double> unpack(Family family, const Vector& x) {
  switch (family) {
    case Family::Weibull:
    case Family::Gamma:
      return {std::exp(x[0]), std::exp(x[1])};
    case Family::Rayleigh:
      return {std::exp(x[0]), 2.0};
    case Family::SShaped:
      return {2.0, std::exp(x[0])};
  }
  return {1.0, 1.0};
}

Vector pack(Family family, double a, double b) {
  switch (family) {
    case Family::Weibull:
    case Family::Gamma:
      return (Vector(2) << std::log(a), std::log(b)).finished();
    case Family::Rayleigh:
      return Vector::Constant(1, std::log(a));
    case Family::SShaped:
      return Vector::Constant(1, std::log(b));
  }
  return {};
}

struct Moments {
  double mean;
  double var;
};

Moments index_moments(const Vector& y) {
  const double total = y.sum();
  double m = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) m += (i + 1.0) * y[i] / total;
  double v = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) v += (i + 1.0 - m) * (i + 1.0 - m) * y[i] / total;
  return {m, std::max(v, 1e-3)};
}

// Weibull shape with squared coefficient of variation cv2, by bisection.
std::optional<double> weibull_shape_from_cv2(double cv2) {
  auto cv2_of = [](double b) {
    const double g1 = numerics::gamma_fn(1.0 + 1.0 / b);
    return numerics::gamma_fn(1.0 + 2.0 / b) / (g1 * g1) - 1.0;
  };
  double lo = 0.1, hi = 100.0;
  if (cv2 > cv2_of(lo) || cv2 < cv2_of(hi)) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cv2_of(mid) > cv2) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Vector moment_start(Family family, const Moments& mo) {
  switch (family) {
    case Family::Gamma:
      return pack(family, mo.mean * mo.mean / mo.var, mo.var / mo.mean);
    case Family::Weibull: {
      if (auto b = weibull_shape_from_cv2(mo.var / (mo.mean * mo.mean)))
        return pack(family, mo.mean / numerics::gamma_fn(1.0 + 1.0 / *b), *b);
      return pack(family, mo.mean, 1.5);
    }
    case Family::Rayleigh:
      return pack(family, mo.mean / numerics::gamma_fn(1.5), 2.0);
    case Family::SShaped:
      return pack(family, 2.0, mo.mean / 2.0);
  }
  return {};
}

struct ProfileFit {
  Vector x;
  double sse_normalized = kInf;
  bool converged = false;
  int iterations = 0;
};

class Profile {
 public:
  Profile(const Vector& y_normalized, Family family, bool integrated)
      : y_(y_normalized), family_(family), integrated_(integrated) {}

  // Optimal scale for the given shape (linear least squares in C).
  double scale_for(const Vector& f) const {
    const double ff = f.squaredNorm();
    if (!(ff > 0.0) || !std::isfinite(ff)) return kNaN;
    return std::max(0.0, y_.dot(f) / ff);
  }

  double operator()(const Vector& x) const {
    auto [a, b] = unpack(family_, x);
    const Vector f = basis(family_, a, b, int(y_.size()), integrated_);
    const double c = scale_for(f);
    if (!std::isfinite(c)) return kInf;
    return (y_ - c * f).squaredNorm();
  }

  ProfileFit minimize(const Vector& start, const FitOptions& options) const {
    numerics::NelderMeadOptions nm;
    nm.tolerance = 1e-16;
    nm.x_tolerance = 1e-10;
    nm.initial_step = 0.2;
    nm.restarts = options.restarts;
    nm.seed = options.seed;
    auto res = numerics::nelder_mead(std::cref(*this), start, nm);
    return {res.argmin, res.objective_value, res.converged, res.iterations};
  }

 private:
  Vector y_;
  Family family_;
  bool integrated_;
};

bool usable_start(const Vector& x) { return x.size() > 0 && x.allFinite(); }

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::Weibull: return "weibull";
    case Family::Gamma: return "gamma";
    case Family::Rayleigh: return "rayleigh";
    case Family::SShaped: return "sshaped";
  }
  return "weibull";
}

Family parse_family(std::string_view name) {
  if (name == "weibull") return Family::Weibull;
  if (name == "gamma") return Family::Gamma;
  if (name == "rayleigh") return Family::Rayleigh;
  if (name == "sshaped" || name == "s-shaped") return Family::SShaped;
  throw Error(Errc::InvalidArgument, "unknown distribution family '" + std::string(name) + "'");
}

int free_params(Family family) noexcept {
  return (family == Family::Weibull || family == Family::Gamma) ? 2 : 1;
}

Model::Model(Family family_, double a_, double b_) : family(family_), a(a_), b(b_) {
  if (!valid_params(a, b)) throw Error(Errc::Domain, "distribution parameters must be positive");
  if (family == Family::Rayleigh && b != 2.0)
    throw Error(Errc::Domain, "Rayleigh fixes the Weibull shape b = 2");
  if (family == Family::SShaped && a != 2.0)
    throw Error(Errc::Domain, "S-shaped fixes the Gamma shape a = 2");
}

double pdf(const Model& model, double t) {
  if (!(t > 0.0)) throw Error(Errc::Domain, "pdf requires t > 0");
  return std::exp(log_pdf_unchecked(model.family, model.a, model.b, t));
}

double cdf(const Model& model, double t) {
  if (!(t >= 0.0)) throw Error(Errc::Domain, "cdf requires t >= 0");
  return cdf_unchecked(model.family, model.a, model.b, t);
}

std::optional<double> tmax(const Model& model) {
  switch (model.family) {
    case Family::Weibull:
    case Family::Rayleigh:
      if (model.b <= 1.0) return std::nullopt;
      return model.a * std::pow((model.b - 1.0) / model.b, 1.0 / model.b);
    case Family::Gamma:
    case Family::SShaped:
      if (model.a <= 1.0) return std::nullopt;
      return model.b * (model.a - 1.0);
  }
  return std::nullopt;
}

double fraction_by_tmax(const Model& model) {
  auto peak = tmax(model);
  if (!peak) throw Error(Errc::UndefinedTmax, "density has no interior maximum");
  return cdf(model, *peak);
}

Fit fit(const GroupedCounts& counts, Family family, const FitOptions& options) {
  const int n_bins = int(counts.size());
  const int n_params = 1 + free_params(family);
  if (n_bins < n_params + 1)
    throw Error(Errc::TooFewBins, std::string(to_string(family)) + " needs at least " +
                                      std::to_string(n_params + 1) + " bins, got " +
                                      std::to_string(n_bins));
  Vector y(n_bins);
  for (int i = 0; i < n_bins; ++i) {
    const double v = counts.counts[std::size_t(i)];
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::NegativeCount, "bin counts must be non-negative");
    y[i] = v;
  }
  const double total = y.sum();
  if (!(total > 0.0)) throw Error(Errc::AllZeroCounts, "all bins are zero");

  // Fitting on counts / total makes the shape estimates invariant to scaling.
  const Vector yn = y / total;
  const Profile profile(yn, family, options.integrated_mass);
  const Moments mo = index_moments(y);

  std::vector<Vector> starts{moment_start(family, mo)};
  // Seeding the general family at its constrained optimum keeps the nested
  // fit from ever doing worse than the special case.
  if (family == Family::Weibull || family == Family::Gamma) {
    const Family special = family == Family::Weibull ? Family::Rayleigh : Family::SShaped;
    const Profile sp(yn, special, options.integrated_mass);
    const Vector s0 = moment_start(special, mo);
    if (usable_start(s0) && std::isfinite(sp(s0))) {
      auto [a, b] = unpack(special, sp.minimize(s0, options).x);
      starts.push_back(pack(family, a, b));
    }
  }

  ProfileFit best;
  int iterations = 0;
  for (const auto& s : starts) {
    if (!usable_start(s) || !std::isfinite(profile(s))) continue;
    ProfileFit run = profile.minimize(s, options);
    iterations += run.iterations;
    if (run.sse_normalized < best.sse_normalized) best = run;
  }
  if (!std::isfinite(best.sse_normalized) || !best.converged)
    throw Error(Errc::FitDiverged, std::string(to_string(family)) + ": optimizer did not converge");

  auto [a, b] = unpack(family, best.x);
  if (!(a > 1e-8 && a < 1e8 && b > 1e-8 && b < 1e8))
    throw Error(Errc::FitDiverged, std::string(to_string(family)) + ": parameters ran off to a boundary");

  Fit out;
  out.model = Model(family, a, b);
  out.integrated_mass = options.integrated_mass;
  out.n_bins = n_bins;
  out.total = total;
  out.iterations = iterations;
  const Vector f = basis(family, a, b, n_bins, options.integrated_mass);
  const double c = profile.scale_for(f) * total;

  // Natural parameter vector (C, free shape params...) for the interval step.
  Vector theta(n_params);
  theta[0] = c;
  if (family == Family::Weibull || family == Family::Gamma) {
    theta[1] = a;
    theta[2] = b;
  } else {
    theta[1] = family == Family::Rayleigh ? a : b;
  }
  auto residuals = [&](const Vector& th) -> Vector {
    double ta = a, tb = b;
    if (family == Family::Weibull || family == Family::Gamma) {
      ta = th[1];
      tb = th[2];
    } else if (family == Family::Rayleigh) {
      ta = th[1];
    } else {
      tb = th[1];
    }
    return y - th[0] * basis(family, ta, tb, n_bins, options.integrated_mass);
  };
  auto cis = numerics::asymptotic_ci(residuals, theta, n_bins, options.level);
  out.c = cis[0];
  out.param_cis.assign(cis.begin() + 1, cis.end());

  const Vector predicted = c * f;
  out.sse = (y - predicted).squaredNorm();
  std::vector<double> yv(y.data(), y.data() + n_bins), pv(predicted.data(), predicted.data() + n_bins);
  out.rmse = gof::rmse(yv, pv);
  try {
    out.adj_r_square = gof::adj_r_square(yv, pv, n_params);
  } catch (const Error&) {
    out.adj_r_square = kNaN;
  }
  out.mre = gof::mre(total, c);
  out.tmax_observed = int(std::max_element(yv.begin(), yv.end()) - yv.begin()) + 1;
  out.tmax_estimated = tmax(out.model);
  if (out.tmax_estimated) out.fraction_by_tmax = cdf(out.model, *out.tmax_estimated);
  return out;
}

double expected_count(const Fit& fit, int t) {
  if (t < 1) throw Error(Errc::Domain, "bin index must be >= 1");
  if (fit.integrated_mass) return fit.c.estimate * (cdf(fit.model, t) - cdf(fit.model, t - 1.0));
  return fit.c.estimate * pdf(fit.model, t);
}

std::vector<double> expected_counts(const Fit& fit, int n_bins) {
  std::vector<double> out;
  out.reserve(std::size_t(std::max(n_bins, 0)));
  for (int t = 1; t <= n_bins; ++t) out.push_back(expected_count(fit, t));
  return out;
}

double predicted_cumulative(const Fit& fit, double t) {
  if (std::isinf(t) && t > 0) return fit.c.estimate;
  return fit.c.estimate * cdf(fit.model, std::max(0.0, t));
}

GroupedCounts generate_counts(const Model& model, double c, int n_bins, Noise noise,
                              std::uint64_t seed) {
  if (n_bins < 1) throw Error(Errc::InvalidArgument, "n_bins must be >= 1");
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(Errc::Domain, "C must be non-negative");
  std::mt19937_64 rng(seed);
  GroupedCounts out;
  out.counts.reserve(std::size_t(n_bins));
  for (int i = 1; i <= n_bins; ++i) {
    const double mean = c * pdf(model, i);
    if (noise == Noise::None || !(mean > 0.0)) {
      out.counts.push_back(noise == Noise::None ? mean : 0.0);
    } else {
      std::poisson_distribution<long> draw(mean);
      out.counts.push_back(double(draw(rng)));
    }
  }
  return out;
}

}  // namespace relgrow::dist
