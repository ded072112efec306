#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "relgrow/error.hpp"
#include "relgrow/ingest.hpp"

using namespace relgrow;
namespace fs = std::filesystem;

namespace {

const char* kCrashLog = R"(Incident Identifier: 2D961565-D688-4CB4-A5EF-4F1BFF4620F9
CrashReporter Key: 4c67cf6e529b1b2ecc2c57df10d48b53f0bdbb50
Hardware Model: iPhone4,1
Process: Skype (3127)
Path: /var/mobile/Applications/E3AF5F07-1C5A-4172-A40E-ACCA269519CB/Skype.app/Skype
Identifier: Skype
Version: ??? (???)
Code Type: ARM (Native)
Parent Process: launchd [1]

Date/Time: 2011-11-03 14:27:10.635 -0400
OS Version: iPhone OS 5.0 (9A334)
Report Version: 104

Exception Type: EXC_BAD_ACCESS (SIGSEGV)
Exception Codes: KERN_PROTECTION_FAILURE at 0x2fd00fe8
Crashed Thread: 0

Thread 0 name: Dispatch queue: com.apple.main-thread
Thread 0 Crashed:
0 libsystem_c.dylib 0x380ca308 0x380be000 + 49928
)";

int code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  }
  return -1;
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("relgrow_ingest_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("timestamps parse and print in both layouts") {
  const auto t = Timestamp::parse_crash_format("2011-11-03 14:27:10.635 -0400");
  CHECK(t.offset == std::chrono::minutes(-240));
  CHECK(t.to_crash_format() == "2011-11-03 14:27:10.635 -0400");
  CHECK(t.to_iso8601() == "2011-11-03T14:27:10.635-04:00");
  CHECK(Timestamp::parse_iso8601(t.to_iso8601()) == t);
  const auto utc = Timestamp::parse_iso8601("2011-11-03T18:27:10.635Z");
  CHECK(utc.instant == t.instant);
  CHECK_FALSE(utc == t);
  CHECK(code_of([] { Timestamp::parse_crash_format("2011-11-03 14:27:10 -0400"); }) == int(Errc::BadTimestamp));
  CHECK(code_of([] { Timestamp::parse_crash_format("2011-13-03 14:27:10.635 -0400"); }) == int(Errc::BadTimestamp));
  CHECK(code_of([] { Timestamp::parse_iso8601("yesterday"); }) == int(Errc::BadTimestamp));
}

TEST_CASE("crash report header fields") {
  const auto raw = ingest::scan_crash_report(kCrashLog, "x.crash");
  CHECK(raw.fields_found.at("Identifier") == "Skype");
  CHECK(raw.fields_found.at("Hardware Model") == "iPhone4,1");
  CHECK(raw.fields_found.count("Process") == 0);
  const auto e = ingest::to_event(raw);
  CHECK(e.app_id == "Skype");
  CHECK_FALSE(e.version.has_value());
  CHECK(e.crashed_thread == 0);
  CHECK(e.timestamp.to_crash_format() == "2011-11-03 14:27:10.635 -0400");
}

TEST_CASE("version token and major number") {
  std::string text = kCrashLog;
  text.replace(text.find("Version: ?"), 18, "Version: 2.7.0.181 (181)");
  const auto e = ingest::parse_crash_log(text);
  CHECK(e.version == "2.7.0.181");
  CHECK(major_of(e.version) == 2);
  CHECK(major_of(std::nullopt) == std::nullopt);
}

TEST_CASE("missing fields are reported") {
  CHECK(code_of([] { ingest::parse_crash_log("Identifier: Skype\n"); }) == int(Errc::MissingField));
  CHECK(code_of([] { ingest::parse_crash_log("Date/Time: 2011-11-03 14:27:10.635 -0400\n"); }) ==
        int(Errc::MissingField));
  CHECK(code_of([] { ingest::parse_crash_log("Identifier: Skype\nDate/Time: soon\n"); }) ==
        int(Errc::BadTimestamp));
}

TEST_CASE("extracted record listing round trip") {
  const char* listing =
      "Identifier: Skype\nDate/Time: 2012-02-25 01:58:19.603 +0300\nCrashed Thread: 0\n"
      "Identifier: Skype\nDate/Time: 2012-02-26 00:15:58.353 +0300\nCrashed Thread: 0\n"
      "Identifier: Skype\nDate/Time: 2012-02-26 00:16:50.428 +0300\n";
  const auto events = ingest::parse_extract_records(listing);
  REQUIRE(events.size() == 3);
  CHECK_FALSE(events[2].crashed_thread.has_value());
  for (const auto& e : events) CHECK(ingest::parse_crash_log(ingest::to_extract_record(e)) == e);
}

TEST_CASE("events json round trip") {
  auto e1 = ingest::parse_crash_log(kCrashLog);
  FailureEvent e2{"Vtok", "2.1", Timestamp::parse_iso8601("2012-02-06T09:00:00.000+03:00"), std::nullopt, 2};
  std::vector<FailureEvent> events{e1, e2};
  const auto text = ingest::events_to_json(events);
  CHECK(ingest::events_from_json(text) == events);
  CHECK(text.find("\"timestamp\": \"2011-11-03T14:27:10.635-04:00\"") != std::string::npos);
  CHECK(code_of([] { ingest::events_from_json("{\"not\": \"an array\"}"); }) == int(Errc::Schema));
}

TEST_CASE("counts csv") {
  const auto c = ingest::parse_counts_csv("bin_index,count\n1,3\n2,5\n4,1\n");
  CHECK(c.counts == std::vector<double>{3, 5, 0, 1});
  CHECK(ingest::to_counts_csv(c) == "bin_index,count\n1,3\n2,5\n3,0\n4,1\n");
  const auto labelled = ingest::parse_counts_csv("bin_index,count,label\n1,2,2012-02-06\n");
  CHECK(labelled.labels == std::vector<std::string>{"2012-02-06"});
  CHECK(code_of([] { ingest::parse_counts_csv("bin_index,count\n1,-2\n"); }) == int(Errc::NegativeCount));
  CHECK(code_of([] { ingest::parse_counts_csv("bin,count\n1,2\n"); }) == int(Errc::Schema));
  CHECK(code_of([] { ingest::parse_counts_csv("bin_index,count\n1,x\n"); }) == int(Errc::Schema));
  CHECK(code_of([] { ingest::parse_counts_csv("bin_index,count\n1,2.5\n"); }) == int(Errc::Schema));
  CHECK(code_of([] { ingest::parse_counts_csv("bin_index,count\n1,2\n1,3\n"); }) == int(Errc::Schema));
  CHECK(ingest::parse_counts_csv("bin_index,count\n1,2.5\n", {TimeUnit::Week, true}).counts[0] == 2.5);
}

TEST_CASE("directory scan keeps going past bad files") {
  const auto scan = ingest::parse_crash_log_dir(fs::path(RELGROW_FIXTURES) / "crashlogs");
  CHECK(scan.events.size() == 92);
  CHECK(scan.errors.size() == 2);
  CHECK(std::is_sorted(scan.events.begin(), scan.events.end(),
                       [](const auto& x, const auto& y) { return x.timestamp.instant < y.timestamp.instant; }));
}

TEST_CASE("directory scan edge cases") {
  const auto empty = scratch_dir("empty");
  CHECK(ingest::parse_crash_log_dir(empty).events.empty());
  CHECK(code_of([&] { ingest::parse_crash_log_dir(empty / "missing"); }) == int(Errc::Io));
}

TEST_CASE("events csv") {
  const auto dir = scratch_dir("csv");
  std::ofstream(dir / "e.csv") << "app_id,version,timestamp,crashed_thread\n"
                                  "Vtok,2.1,2012-02-06 09:00:00.000 +0300,0\n"
                                  "Vtok,,2012-02-07T09:00:00.000+03:00,\n";
  const auto events = ingest::read_events_csv(dir / "e.csv");
  REQUIRE(events.size() == 2);
  CHECK(events[0].version == "2.1");
  CHECK_FALSE(events[1].version.has_value());
  CHECK_FALSE(events[1].crashed_thread.has_value());
}

TEST_CASE("atomic write replaces content") {
  const auto dir = scratch_dir("write");
  ingest::write_file_atomic(dir / "a.txt", "one");
  ingest::write_file_atomic(dir / "a.txt", "two");
  CHECK(ingest::read_file(dir / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
}
