#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relgrow/event.hpp"
#include "relgrow/series.hpp"

namespace relgrow::ingest {

/// Header lines recognized in an Apple-style crash report. Matching is exact
/// on the key token before the colon.
inline constexpr std::string_view kRecognizedKeys[] = {
    "Identifier", "Version", "Date/Time", "Crashed Thread", "Hardware Model", "OS Version",
};

struct RawCrashReport {
  std::string source_path;
  std::map<std::string, std::string> fields_found;  // first occurrence of each key
  int line_count = 0;
};

RawCrashReport scan_crash_report(std::string_view text, std::string source_path = {});

FailureEvent to_event(const RawCrashReport& report);

FailureEvent parse_crash_log(std::string_view text);

/// Splits an extracted key/value listing (one `Identifier:` line per record)
/// into events.
std::vector<FailureEvent> parse_extract_records(std::string_view text);

/// Renders one event in the extracted key/value layout; parse_crash_log of the
/// result yields the same event.
std::string to_extract_record(const FailureEvent& event);

struct FileError {
  std::filesystem::path path;
  std::string message;
};

struct DirectoryScan {
  std::vector<FailureEvent> events;  // ascending by instant
  std::vector<FileError> errors;     // ascending by path
};

DirectoryScan parse_crash_log_dir(const std::filesystem::path& dir);

struct CountsCsvOptions {
  TimeUnit unit = TimeUnit::Week;
  bool allow_fractional = false;
};

GroupedCounts parse_counts_csv(std::string_view text, const CountsCsvOptions& options = {});
GroupedCounts read_counts_csv(const std::filesystem::path& path,
                              const CountsCsvOptions& options = {});
std::string to_counts_csv(const GroupedCounts& counts);

/// Event CSV with header `app_id,version,timestamp[,crashed_thread][,severity]`.
/// Empty version/thread cells mean unknown; timestamps use either the crash
/// report or the ISO-8601 layout.
std::vector<FailureEvent> read_events_csv(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const FailureEvent& event);
FailureEvent event_from_json(const nlohmann::json& j);
std::string events_to_json(std::span<const FailureEvent> events);
std::vector<FailureEvent> events_from_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace relgrow::ingest
