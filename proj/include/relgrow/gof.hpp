#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relgrow/dist.hpp"
#include "relgrow/series.hpp"
#include "relgrow/srgm.hpp"

namespace relgrow::gof {

inline constexpr double kDefaultAlpha = 0.1;

enum class Test { Cvm, ChiSquare };

std::string_view to_string(Test test) noexcept;

struct Verdict {
  Test test = Test::ChiSquare;
  double statistic = 0.0;
  double critical = 0.0;
  double alpha = kDefaultAlpha;
  int df_or_m = 0;
  bool passed = false;
};

/// passed is exactly statistic < critical.
Verdict make_verdict(Test test, double statistic, double critical, double alpha, int df_or_m);

struct Metrics {
  double rmse = 0.0;
  double r_square = 0.0;
  double adj_r_square = 0.0;
  double mre = 0.0;
};

double rmse(std::span<const double> actual, std::span<const double> predicted);
double mre(double actual_total, double predicted_total);
double r_square(std::span<const double> actual, std::span<const double> predicted);
double adj_r_square(std::span<const double> actual, std::span<const double> predicted, int n_params);
Metrics metrics(std::span<const double> actual, std::span<const double> predicted, int n_params);

/// Cramér–von Mises critical values keyed by (M, alpha). Values between
/// tabulated M rows are interpolated linearly; M beyond the last row uses the
/// last (large-M) row.
class CvmCriticalTable {
 public:
  static const CvmCriticalTable& builtin();
  /// CSV with header `m,alpha,critical`.
  static CvmCriticalTable from_csv(std::string_view text);
  static CvmCriticalTable load(const std::filesystem::path& path);

  double critical(int m, double alpha) const;
  std::string to_csv() const;
  bool empty() const noexcept { return by_alpha_.empty(); }

  void set(int m, double alpha, double critical);

 private:
  std::map<double, std::map<int, double>> by_alpha_;
};

/// 1/(12M) + Σ (uᵢ - (2i-1)/(2M))² over ascending uᵢ.
double cvm_statistic(std::span<const double> u_sorted);

/// Transforms event times to uᵢ = μ̂(tᵢ)/μ̂(T) and tests them against the
/// uniform order statistics.
Verdict cvm_test(std::span<const double> times, const srgm::Fit& fitted, double alpha = kDefaultAlpha,
                 const CvmCriticalTable& table = CvmCriticalTable::builtin());
Verdict cvm_test(const NormalizedTimes& times, const srgm::Fit& fitted, double alpha = kDefaultAlpha,
                 const CvmCriticalTable& table = CvmCriticalTable::builtin());

struct Cells {
  std::vector<double> observed;
  std::vector<double> expected;
};

/// Merges adjacent bins right-to-left until every expected count reaches
/// min_expected; a short remainder at the left edge joins its neighbour.
Cells pool_cells(std::span<const double> observed, std::span<const double> expected,
                 double min_expected = 1.0);

/// Pearson statistic over pooled cells, df = cells - 1 - fitted_params.
Verdict chi_square_test(std::span<const double> observed, std::span<const double> expected,
                        int fitted_params, double alpha = kDefaultAlpha);
Verdict chi_square_test(const GroupedCounts& counts, const dist::Fit& fitted,
                        double alpha = kDefaultAlpha);
/// Bins are taken as an equal partition of (0, observation_end].
Verdict chi_square_test(const GroupedCounts& counts, const srgm::Fit& fitted,
                        double alpha = kDefaultAlpha);

}  // namespace relgrow::gof
