#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace relgrow {

using Millis = std::chrono::sys_time<std::chrono::milliseconds>;

/// An absolute instant (UTC, millisecond precision) together with the UTC
/// offset it was recorded in. Two timestamps are equal only when both the
/// instant and the offset match; ordering is by instant first.
struct Timestamp {
  Millis instant{};
  std::chrono::minutes offset{0};

  /// Crash-report layout: `YYYY-MM-DD HH:MM:SS.mmm +HHMM`.
  static Timestamp parse_crash_format(std::string_view text);
  /// ISO-8601 with explicit offset: `YYYY-MM-DDTHH:MM:SS.mmm+HH:MM` (or `Z`).
  static Timestamp parse_iso8601(std::string_view text);

  std::string to_crash_format() const;
  std::string to_iso8601() const;

  /// Wall-clock time in the recorded offset.
  std::chrono::local_time<std::chrono::milliseconds> local() const;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
  friend std::strong_ordering operator<=>(const Timestamp& x, const Timestamp& y) {
    if (auto c = x.instant <=> y.instant; c != 0) return c;
    return x.offset <=> y.offset;
  }
};

}  // namespace relgrow
