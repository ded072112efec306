#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relgrow/event.hpp"

namespace relgrow {

enum class TimeUnit { Day, Week, Month };

std::string_view to_string(TimeUnit unit) noexcept;
TimeUnit parse_time_unit(std::string_view name);

/// Time-ordered crashes of one application and one major version.
class FailureSeries {
 public:
  FailureSeries(std::string app_id, std::optional<int> major_version,
                std::vector<FailureEvent> events);

  const std::string& app_id() const noexcept { return app_id_; }
  std::optional<int> major_version() const noexcept { return major_version_; }
  const std::vector<FailureEvent>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  /// Instant of the first event. Requires a non-empty series.
  const Timestamp& origin() const;

 private:
  std::string app_id_;
  std::optional<int> major_version_;
  std::vector<FailureEvent> events_;
};

/// Failure counts per equal-width period, bin i covering period i (1-based).
/// Counts are stored as reals so that noiseless synthetic expectations can be
/// carried; observed data only ever holds whole numbers.
struct GroupedCounts {
  TimeUnit unit = TimeUnit::Week;
  std::vector<double> counts;
  std::vector<std::string> labels;  // empty, or one label per bin

  std::size_t size() const noexcept { return counts.size(); }
  double total() const noexcept;
  /// 1-based bin index of the i-th count.
  static int index_of(std::size_t i) noexcept { return static_cast<int>(i) + 1; }
};

struct NormalizedTimes {
  std::vector<double> times;  // ascending, in [0.001, 1]
  double scale = 0.0;         // largest elapsed time, seconds
};

std::vector<FailureSeries> split_by_major_version(std::span<const FailureEvent> events);

GroupedCounts group(const FailureSeries& series, TimeUnit unit);

NormalizedTimes normalize_times(const FailureSeries& series);
/// Same normalization applied to raw elapsed values (any unit).
NormalizedTimes normalize_elapsed(std::span<const double> elapsed);

std::vector<std::pair<int, double>> cumulative(const GroupedCounts& counts);

}  // namespace relgrow
