#include "relgrow/series.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <map>
#include <numeric>

#include "relgrow/error.hpp"

namespace relgrow {
namespace {

using namespace std::chrono;

constexpr double kZeroSubstitute = 0.001;

// Calendar period key (UTC) of an instant; consecutive periods differ by one.
long period_key(const Timestamp& ts, TimeUnit unit) {
  sys_days d = floor<days>(ts.instant);
  switch (unit) {
    case TimeUnit::Day:
      return d.time_since_epoch().count();
    case TimeUnit::Week: {
      // 1970-01-01 was a Thursday; shift so weeks start on Monday.
      long n = d.time_since_epoch().count() + 3;
      return n >= 0 ? n / 7 : -((-n + 6) / 7);
    }
    case TimeUnit::Month: {
      year_month_day ymd{d};
      return long(int(ymd.year())) * 12 + long(unsigned(ymd.month())) - 1;
    }
  }
  return 0;
}

std::string period_label(long key, TimeUnit unit) {
  year_month_day ymd;
  switch (unit) {
    case TimeUnit::Day:
      ymd = year_month_day{sys_days{days{key}}};
      break;
    case TimeUnit::Week:
      ymd = year_month_day{sys_days{days{key * 7 - 3}}};
      break;
    case TimeUnit::Month:
      ymd = year_month_day{year{int(key / 12)}, month{unsigned(key % 12) + 1}, day{1}};
      break;
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

}  // namespace

std::optional<int> major_of(const std::optional<std::string>& version) {
  if (!version || version->empty()) return std::nullopt;
  int value = 0;
  std::size_t i = 0;
  for (; i < version->size() && std::isdigit(static_cast<unsigned char>((*version)[i])); ++i) {
    value = value * 10 + ((*version)[i] - '0');
    if (value > 1'000'000) return std::nullopt;
  }
  if (i == 0) return std::nullopt;
  return value;
}

std::string_view to_string(TimeUnit unit) noexcept {
  switch (unit) {
    case TimeUnit::Day: return "day";
    case TimeUnit::Week: return "week";
    case TimeUnit::Month: return "month";
  }
  return "week";
}

TimeUnit parse_time_unit(std::string_view name) {
  if (name == "day") return TimeUnit::Day;
  if (name == "week") return TimeUnit::Week;
  if (name == "month") return TimeUnit::Month;
  throw Error(Errc::InvalidArgument, "unknown time unit '" + std::string(name) + "'");
}

FailureSeries::FailureSeries(std::string app_id, std::optional<int> major_version,
                             std::vector<FailureEvent> events)
    : app_id_(std::move(app_id)), major_version_(major_version), events_(std::move(events)) {
  for (const auto& e : events_) {
    if (e.app_id != app_id_)
      throw Error(Errc::InvalidArgument, "event app '" + e.app_id + "' in series of " + app_id_);
    if (major_of(e.version) != major_version_)
      throw Error(Errc::InvalidArgument, "event version does not belong to series major version");
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const auto& x, const auto& y) { return x.timestamp.instant < y.timestamp.instant; });
}

const Timestamp& FailureSeries::origin() const {
  if (events_.empty()) throw Error(Errc::EmptySeries, "series of " + app_id_ + " has no events");
  return events_.front().timestamp;
}

double GroupedCounts::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

std::vector<FailureSeries> split_by_major_version(std::span<const FailureEvent> events) {
  // nullopt sorts before any number, so unknown-version series come first per app.
  std::map<std::pair<std::string, std::optional<int>>, std::vector<FailureEvent>> buckets;
  for (const auto& e : events) buckets[{e.app_id, major_of(e.version)}].push_back(e);

  std::vector<FailureSeries> out;
  out.reserve(buckets.size());
  for (auto& [key, list] : buckets) out.emplace_back(key.first, key.second, std::move(list));
  return out;
}

GroupedCounts group(const FailureSeries& series, TimeUnit unit) {
  const long first = period_key(series.origin(), unit);
  GroupedCounts out;
  out.unit = unit;
  for (const auto& e : series.events()) {
    auto bin = static_cast<std::size_t>(period_key(e.timestamp, unit) - first);
    if (bin >= out.counts.size()) out.counts.resize(bin + 1, 0.0);
    out.counts[bin] += 1.0;
  }
  out.labels.reserve(out.counts.size());
  for (std::size_t i = 0; i < out.counts.size(); ++i)
    out.labels.push_back(period_label(first + long(i), unit));
  return out;
}

NormalizedTimes normalize_elapsed(std::span<const double> elapsed) {
  if (elapsed.empty()) throw Error(Errc::EmptySeries, "no times to normalize");
  if (!std::is_sorted(elapsed.begin(), elapsed.end()))
    throw Error(Errc::InvalidArgument, "elapsed times must be non-decreasing");
  if (elapsed.front() < 0.0) throw Error(Errc::InvalidArgument, "negative elapsed time");
  const double scale = elapsed.back();
  if (!(scale > 0.0)) throw Error(Errc::DegenerateSeries, "all events are simultaneous");

  NormalizedTimes out;
  out.scale = scale;
  out.times.reserve(elapsed.size());
  for (double v : elapsed) out.times.push_back(std::max(v / scale, kZeroSubstitute));
  out.times.back() = 1.0;
  return out;
}

NormalizedTimes normalize_times(const FailureSeries& series) {
  const auto origin = series.origin().instant;
  std::vector<double> elapsed;
  elapsed.reserve(series.size());
  for (const auto& e : series.events())
    elapsed.push_back(duration<double>(e.timestamp.instant - origin).count());
  return normalize_elapsed(elapsed);
}

std::vector<std::pair<int, double>> cumulative(const GroupedCounts& counts) {
  std::vector<std::pair<int, double>> out;
  out.reserve(counts.size());
  double running = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    running += counts.counts[i];
    out.emplace_back(GroupedCounts::index_of(i), running);
  }
  return out;
}

}  // namespace relgrow
