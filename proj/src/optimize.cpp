#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "relgrow/error.hpp"
#include "relgrow/numerics.hpp"

namespace relgrow::numerics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Vector& x) {
  double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

// One simplex run from `start`; consumes at most `budget` iterations.
MinimizeResult simplex_run(const Objective& f, const Vector& start, const NelderMeadOptions& opt,
                           int budget) {
  const Eigen::Index n = start.size();
  std::vector<Vector> pts(std::size_t(n + 1), start);
  std::vector<double> vals(std::size_t(n + 1));
  for (Eigen::Index i = 0; i < n; ++i)
    pts[std::size_t(i + 1)][i] += opt.initial_step * std::max(1.0, std::abs(start[i]));
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = safe_eval(f, pts[i]);

  std::vector<std::size_t> order(pts.size());
  MinimizeResult res;
  int iter = 0;
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return vals[x] < vals[y]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double extent = 0.0;
    for (const auto& p : pts) extent = std::max(extent, (p - pts[best]).cwiseAbs().maxCoeff());
    const double scale = 1.0 + pts[best].cwiseAbs().maxCoeff();
    if (vals[worst] - vals[best] <= opt.tolerance && extent <= opt.x_tolerance * scale &&
        std::isfinite(vals[best])) {
      res.converged = true;
      break;
    }
    if (iter >= budget) break;
    ++iter;

    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
    centroid /= double(n);

    const Vector reflected = centroid + (centroid - pts[worst]);
    const double fr = safe_eval(f, reflected);
    if (fr < vals[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = safe_eval(f, expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                      : Vector(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = safe_eval(f, contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = safe_eval(f, pts[i]);
    }
  }
  const auto best = std::size_t(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.argmin = pts[best];
  res.objective_value = vals[best];
  res.iterations = iter;
  return res;
}

// Repeats simplex runs from the incumbent until a fresh simplex no longer
// improves it; a collapsed simplex can otherwise stall off the optimum.
MinimizeResult polished_run(const Objective& f, const Vector& start, const NelderMeadOptions& opt,
                            int budget) {
  MinimizeResult res = simplex_run(f, start, opt, budget);
  for (int round = 0; round < 4 && res.converged; ++round) {
    const int left = budget - res.iterations;
    if (left <= 0) break;
    MinimizeResult again = simplex_run(f, res.argmin, opt, left);
    again.iterations += res.iterations;
    const bool improved = again.objective_value < res.objective_value - opt.tolerance;
    if (again.objective_value <= res.objective_value) {
      res.argmin = again.argmin;
      res.objective_value = again.objective_value;
    }
    res.iterations = again.iterations;
    res.converged = again.converged;
    if (!improved) break;
  }
  return res;
}

}  // namespace

MinimizeResult nelder_mead(const Objective& objective, const Vector& start,
                           const NelderMeadOptions& options) {
  if (start.size() == 0) throw Error(Errc::InvalidArgument, "nelder_mead needs at least one parameter");
  if (!std::isfinite(objective(start)))
    throw Error(Errc::Domain, "objective is not finite at the starting point");

  MinimizeResult best = polished_run(objective, start, options, options.max_iter);
  if (options.restarts > 0) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < options.restarts; ++k) {
      Vector jittered = start;
      for (Eigen::Index i = 0; i < start.size(); ++i)
        jittered[i] += options.jitter * std::max(1.0, std::abs(start[i])) * gauss(rng);
      if (!std::isfinite(objective(jittered))) continue;
      MinimizeResult run = polished_run(objective, jittered, options, options.max_iter);
      const bool better = run.objective_value < best.objective_value ||
                          (run.converged && !best.converged && run.objective_value <= best.objective_value);
      const int spent = best.iterations + run.iterations;
      if (better) best = run;
      best.iterations = spent;
    }
  }
  return best;
}

MinimizeResult nelder_mead(const Objective& objective, const Vector& start, double tolerance,
                           int max_iter) {
  NelderMeadOptions opt;
  opt.tolerance = tolerance;
  opt.max_iter = max_iter;
  return nelder_mead(objective, start, opt);
}

Matrix jacobian(const ResidualFn& residuals, const Vector& at) {
  const Vector r0 = residuals(at);
  Matrix jac(r0.size(), at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(at[j]));
    Vector up = at, down = at;
    up[j] += h;
    down[j] -= h;
    jac.col(j) = (residuals(up) - residuals(down)) / (2.0 * h);
  }
  return jac;
}

Matrix hessian(const Objective& f, const Vector& at) {
  const Eigen::Index n = at.size();
  Vector h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = 1e-4 * std::max(std::abs(at[i]), 1e-3);
  Matrix hess(n, n);
  const double f0 = f(at);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector up = at, down = at;
    up[i] += h[i];
    down[i] -= h[i];
    hess(i, i) = (f(up) - 2.0 * f0 + f(down)) / (h[i] * h[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Vector pp = at, pm = at, mp = at, mm = at;
      pp[i] += h[i]; pp[j] += h[j];
      pm[i] += h[i]; pm[j] -= h[j];
      mp[i] -= h[i]; mp[j] += h[j];
      mm[i] -= h[i]; mm[j] -= h[j];
      hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

std::vector<ConfidenceInterval> asymptotic_ci(const ResidualFn& residuals, const Vector& argmin,
                                              int n_obs, double level) {
  const auto p = int(argmin.size());
  if (n_obs <= p)
    throw Error(Errc::InsufficientDof, "asymptotic_ci needs more observations than parameters");
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::Domain, "confidence level must lie in (0,1)");

  const Vector r = residuals(argmin);
  const double sigma2 = r.squaredNorm() / double(n_obs - p);
  const Matrix jac = jacobian(residuals, argmin);
  const double tq = t_inverse(n_obs - p, 0.5 + 0.5 * level);

  Eigen::ColPivHouseholderQR<Matrix> qr(jac);
  qr.setThreshold(1e-12);
  bool singular = !jac.allFinite() || qr.rank() < p;
  Matrix cov;
  if (!singular) {
    cov = sigma2 * (jac.transpose() * jac).inverse();
    singular = !cov.allFinite() || (cov.diagonal().array() < 0.0).any();
  }

  std::vector<ConfidenceInterval> out;
  out.reserve(std::size_t(p));
  for (int i = 0; i < p; ++i) {
    ConfidenceInterval ci{argmin[i], argmin[i], argmin[i], level, true};
    if (singular) {
      ci.lower = -kInf;
      ci.upper = kInf;
      ci.bounded = false;
    } else {
      const double half = tq * std::sqrt(cov(i, i));
      ci.lower = argmin[i] - half;
      ci.upper = argmin[i] + half;
    }
    out.push_back(ci);
  }
  return out;
}

std::vector<ConfidenceInterval> wald_ci(const Vector& estimate, const Matrix& covariance,
                                        double level) {
  const double z = normal_quantile(0.5 + 0.5 * level);
  const bool usable = covariance.allFinite() && (covariance.diagonal().array() >= 0.0).all();
  std::vector<ConfidenceInterval> out;
  for (Eigen::Index i = 0; i < estimate.size(); ++i) {
    ConfidenceInterval ci{estimate[i], estimate[i], estimate[i], level, usable};
    if (usable) {
      const double half = z * std::sqrt(covariance(i, i));
      ci.lower -= half;
      ci.upper += half;
    } else {
      ci.lower = -kInf;
      ci.upper = kInf;
    }
    out.push_back(ci);
  }
  return out;
}

}  // namespace relgrow::numerics
