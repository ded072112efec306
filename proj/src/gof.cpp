#include "relgrow/gof.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "relgrow/error.hpp"
#include "relgrow/ingest.hpp"

namespace relgrow::gof {
namespace {

struct CvmRow {
  int m;
  double a10, a05, a01;
};

// Critical values of the Cramér–von Mises statistic for a fitted growth model
// (MIL-HDBK-189 / growth-analysis reference layout).
constexpr CvmRow kCvmDefaults[] = {
    {2, 0.162, 0.175, 0.186},   {3, 0.154, 0.184, 0.231},   {4, 0.155, 0.191, 0.279},
    {5, 0.160, 0.199, 0.295},   {6, 0.162, 0.204, 0.307},   {7, 0.165, 0.208, 0.316},
    {8, 0.165, 0.210, 0.319},   {9, 0.167, 0.212, 0.323},   {10, 0.167, 0.212, 0.324},
    {11, 0.169, 0.214, 0.327},  {12, 0.169, 0.214, 0.328},  {13, 0.169, 0.214, 0.329},
    {14, 0.169, 0.214, 0.330},  {15, 0.169, 0.215, 0.330},  {16, 0.171, 0.216, 0.332},
    {17, 0.171, 0.217, 0.333},  {18, 0.171, 0.217, 0.333},  {19, 0.171, 0.217, 0.333},
    {20, 0.172, 0.217, 0.333},  {30, 0.172, 0.218, 0.333},  {60, 0.173, 0.220, 0.336},
    {100, 0.173, 0.220, 0.337},
};

constexpr double kAlphaMatch = 1e-9;

void check_lengths(std::span<const double> a, std::span<const double> p) {
  if (a.size() != p.size())
    throw Error(Errc::LengthMismatch, "actual has " + std::to_string(a.size()) + " values, predicted " +
                                          std::to_string(p.size()));
  if (a.empty()) throw Error(Errc::Empty, "no observations");
}

}  // namespace

std::string_view to_string(Test test) noexcept {
  return test == Test::Cvm ? "cvm" : "chi-square";
}

Verdict make_verdict(Test test, double statistic, double critical, double alpha, int df_or_m) {
  return Verdict{test, statistic, critical, alpha, df_or_m, statistic < critical};
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted);
  double sse = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) sse += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  return std::sqrt(sse / double(actual.size()));
}

double mre(double actual_total, double predicted_total) {
  if (!(actual_total > 0.0)) throw Error(Errc::ZeroActual, "actual total must be positive");
  return std::abs(actual_total - predicted_total) / actual_total;
}

double r_square(std::span<const double> actual, std::span<const double> predicted) {
  check_lengths(actual, predicted);
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / double(actual.size());
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    sse += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    sst += (actual[i] - mean) * (actual[i] - mean);
  }
  if (!(sst > 0.0)) throw Error(Errc::DegenerateVariance, "actual values are constant");
  return 1.0 - sse / sst;
}

double adj_r_square(std::span<const double> actual, std::span<const double> predicted, int n_params) {
  check_lengths(actual, predicted);
  const auto n = double(actual.size());
  if (n_params < 0 || !(n > n_params + 1.0))
    throw Error(Errc::InsufficientDof, "adjusted R-square needs N > n_params + 1");
  const double r2 = r_square(actual, predicted);
  return 1.0 - (1.0 - r2) * (n - 1.0) / (n - n_params - 1.0);
}

Metrics metrics(std::span<const double> actual, std::span<const double> predicted, int n_params) {
  Metrics m;
  m.rmse = rmse(actual, predicted);
  m.r_square = r_square(actual, predicted);
  m.adj_r_square = adj_r_square(actual, predicted, n_params);
  m.mre = mre(std::accumulate(actual.begin(), actual.end(), 0.0),
              std::accumulate(predicted.begin(), predicted.end(), 0.0));
  return m;
}

const CvmCriticalTable& CvmCriticalTable::builtin() {
  static const CvmCriticalTable table = [] {
    CvmCriticalTable t;
    for (const auto& row : kCvmDefaults) {
      t.set(row.m, 0.10, row.a10);
      t.set(row.m, 0.05, row.a05);
      t.set(row.m, 0.01, row.a01);
    }
    return t;
  }();
  return table;
}

void CvmCriticalTable::set(int m, double alpha, double critical) {
  if (m < 1 || !(alpha > 0.0 && alpha < 1.0) || !(critical > 0.0))
    throw Error(Errc::Schema, "invalid critical-value row");
  for (auto& [key, rows] : by_alpha_) {
    if (std::abs(key - alpha) < kAlphaMatch) {
      rows[m] = critical;
      return;
    }
  }
  by_alpha_[alpha][m] = critical;
}

CvmCriticalTable CvmCriticalTable::from_csv(std::string_view text) {
  CvmCriticalTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (header) {
      if (line.substr(0, 16) != "m,alpha,critical")
        throw Error(Errc::Schema, "critical-value table needs header m,alpha,critical");
      header = false;
      continue;
    }
    int m = 0;
    double alpha = 0.0, critical = 0.0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf%c", &m, &alpha, &critical, &tail) != 3)
      throw Error(Errc::Schema, "critical-value table line " + std::to_string(line_no) + " is malformed");
    t.set(m, alpha, critical);
  }
  if (t.empty()) throw Error(Errc::Schema, "critical-value table has no rows");
  return t;
}

CvmCriticalTable CvmCriticalTable::load(const std::filesystem::path& path) {
  return from_csv(ingest::read_file(path));
}

double CvmCriticalTable::critical(int m, double alpha) const {
  const std::map<int, double>* rows = nullptr;
  for (const auto& [key, r] : by_alpha_)
    if (std::abs(key - alpha) < kAlphaMatch) rows = &r;
  if (!rows || rows->empty())
    throw Error(Errc::MissingCriticalValue, "no critical values for alpha " + std::to_string(alpha));
  if (m < rows->begin()->first)
    throw Error(Errc::MissingCriticalValue, "no critical value for M = " + std::to_string(m));
  auto hi = rows->lower_bound(m);
  if (hi == rows->end()) return rows->rbegin()->second;
  if (hi->first == m) return hi->second;
  auto lo = std::prev(hi);
  const double w = double(m - lo->first) / double(hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

std::string CvmCriticalTable::to_csv() const {
  std::string out = "m,alpha,critical\n";
  char buf[64];
  for (const auto& [alpha, rows] : by_alpha_)
    for (const auto& [m, c] : rows) {
      std::snprintf(buf, sizeof buf, "%d,%g,%g\n", m, alpha, c);
      out += buf;
    }
  return out;
}

double cvm_statistic(std::span<const double> u_sorted) {
  const auto m = double(u_sorted.size());
  if (u_sorted.empty()) throw Error(Errc::Empty, "no values for the CVM statistic");
  double s = 1.0 / (12.0 * m);
  for (std::size_t i = 0; i < u_sorted.size(); ++i) {
    const double d = u_sorted[i] - (2.0 * double(i + 1) - 1.0) / (2.0 * m);
    s += d * d;
  }
  return s;
}

Verdict cvm_test(std::span<const double> times, const srgm::Fit& fitted, double alpha,
                 const CvmCriticalTable& table) {
  const auto m = int(times.size());
  if (m < 3) throw Error(Errc::TooFewEvents, "CVM test needs at least 3 events");
  const double total = srgm::mean_value(fitted.model, fitted.observation_end);
  std::vector<double> u;
  u.reserve(times.size());
  for (double t : times) u.push_back(srgm::mean_value(fitted.model, t) / total);
  std::sort(u.begin(), u.end());
  return make_verdict(Test::Cvm, cvm_statistic(u), table.critical(m, alpha), alpha, m);
}

Verdict cvm_test(const NormalizedTimes& times, const srgm::Fit& fitted, double alpha,
                 const CvmCriticalTable& table) {
  return cvm_test(times.times, fitted, alpha, table);
}

Cells pool_cells(std::span<const double> observed, std::span<const double> expected,
                 double min_expected) {
  check_lengths(observed, expected);
  Cells out;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t k = observed.size(); k-- > 0;) {
    acc_o += observed[k];
    acc_e += expected[k];
    if (acc_e >= min_expected) {
      out.observed.push_back(acc_o);
      out.expected.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (out.expected.empty()) {
      out.observed.push_back(acc_o);
      out.expected.push_back(acc_e);
    } else {
      out.observed.back() += acc_o;
      out.expected.back() += acc_e;
    }
  }
  std::reverse(out.observed.begin(), out.observed.end());
  std::reverse(out.expected.begin(), out.expected.end());
  return out;
}

Verdict chi_square_test(std::span<const double> observed, std::span<const double> expected,
                        int fitted_params, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::Domain, "alpha must lie in (0,1)");
  const Cells cells = pool_cells(observed, expected);
  const int df = int(cells.expected.size()) - 1 - fitted_params;
  if (df < 1)
    throw Error(Errc::InsufficientCells, std::to_string(cells.expected.size()) +
                                             " cells leave no degrees of freedom for " +
                                             std::to_string(fitted_params) + " fitted parameters");
  double stat = 0.0;
  for (std::size_t i = 0; i < cells.expected.size(); ++i) {
    const double d = cells.observed[i] - cells.expected[i];
    stat += d * d / cells.expected[i];
  }
  return make_verdict(Test::ChiSquare, stat, numerics::chi2_inverse(df, 1.0 - alpha), alpha, df);
}

Verdict chi_square_test(const GroupedCounts& counts, const dist::Fit& fitted, double alpha) {
  const auto expected = dist::expected_counts(fitted, int(counts.size()));
  return chi_square_test(counts.counts, expected, fitted.n_params(), alpha);
}

Verdict chi_square_test(const GroupedCounts& counts, const srgm::Fit& fitted, double alpha) {
  const auto k = counts.size();
  std::vector<double> expected;
  expected.reserve(k);
  const double width = fitted.observation_end / double(k);
  for (std::size_t i = 0; i < k; ++i)
    expected.push_back(srgm::mean_value(fitted.model, width * double(i + 1)) -
                       srgm::mean_value(fitted.model, width * double(i)));
  return chi_square_test(counts.counts, expected, 2, alpha);
}

}  // namespace relgrow::gof
