#include <doctest.h>

#include "relgrow/error.hpp"
#include "relgrow/series.hpp"

using namespace relgrow;

namespace {

FailureEvent at(const char* iso, std::optional<std::string> version = "2.1", std::string app = "Vtok") {
  return {std::move(app), std::move(version), Timestamp::parse_iso8601(iso), 0, 1};
}

}  // namespace

TEST_CASE("split by app and major version") {
  std::vector<FailureEvent> events{at("2012-02-07T00:00:00Z", "2.1"), at("2012-02-06T00:00:00Z", "1.9"),
                                   at("2012-02-05T00:00:00Z", std::nullopt),
                                   at("2012-02-04T00:00:00Z", "2.0", "Skype"),
                                   at("2012-02-03T00:00:00Z", "2.3")};
  const auto series = split_by_major_version(events);
  REQUIRE(series.size() == 4);
  for (const auto& s : series) {
    if (s.app_id() == "Vtok" && s.major_version() == 2) {
      CHECK(s.size() == 2);
      CHECK(s.origin() == Timestamp::parse_iso8601("2012-02-03T00:00:00Z"));
    }
  }
}

TEST_CASE("series rejects foreign events") {
  CHECK_THROWS_AS(FailureSeries("Vtok", 1, {at("2012-02-07T00:00:00Z", "2.1")}), Error);
  FailureSeries empty("Vtok", 2, {});
  CHECK_THROWS_AS(empty.origin(), Error);
}

TEST_CASE("weekly bins start on monday") {
  // 2012-02-06 is a Monday.
  FailureSeries s("Vtok", 2,
                  {at("2012-02-08T10:00:00Z"), at("2012-02-12T23:59:59Z"), at("2012-02-13T00:00:00Z"),
                   at("2012-02-28T00:00:00Z")});
  const auto g = group(s, TimeUnit::Week);
  CHECK(g.counts == std::vector<double>{2, 1, 0, 1});
  CHECK(g.labels.front() == "2012-02-06");
  CHECK(g.total() == 4);
}

TEST_CASE("daily and monthly bins") {
  FailureSeries s("Vtok", 2, {at("2012-01-31T23:00:00Z"), at("2012-02-01T01:00:00Z"), at("2012-04-02T00:00:00Z")});
  CHECK(group(s, TimeUnit::Month).counts == std::vector<double>{1, 1, 0, 1});
  const auto days = group(s, TimeUnit::Day);
  CHECK(days.counts.size() == 63);
  CHECK(days.counts[0] == 1);
  CHECK(days.counts[1] == 1);
}

TEST_CASE("bins use utc, not the recorded offset") {
  FailureSeries s("Vtok", 2, {at("2012-02-06T01:00:00+03:00"), at("2012-02-06T12:00:00+03:00")});
  // The first crash falls on Sunday 22:00 UTC, the previous week.
  CHECK(group(s, TimeUnit::Week).counts == std::vector<double>{1, 1});
}

TEST_CASE("normalized times") {
  FailureSeries s("Vtok", 2, {at("2012-02-06T00:00:00Z"), at("2012-02-06T06:00:00Z"), at("2012-02-07T00:00:00Z")});
  const auto n = normalize_times(s);
  CHECK(n.scale == doctest::Approx(86400.0));
  CHECK(n.times == std::vector<double>{0.001, 0.25, 1.0});
  const std::vector<double> tiny{0.0, 0.0005, 2.0};
  CHECK(normalize_elapsed(tiny).times == std::vector<double>{0.001, 0.001, 1.0});
  const std::vector<double> flat{0.0, 0.0};
  CHECK_THROWS_AS(normalize_elapsed(flat), Error);
  CHECK_THROWS_AS(normalize_elapsed(std::vector<double>{}), Error);
}

TEST_CASE("cumulative counts") {
  GroupedCounts g;
  g.counts = {1, 0, 3};
  const auto c = cumulative(g);
  REQUIRE(c.size() == 3);
  CHECK(c[2] == std::pair<int, double>{3, 4.0});
}

TEST_CASE("time unit names") {
  CHECK(parse_time_unit("month") == TimeUnit::Month);
  CHECK(to_string(TimeUnit::Week) == "week");
  CHECK_THROWS_AS(parse_time_unit("fortnight"), Error);
}
