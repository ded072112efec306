#include <doctest.h>

#include <sstream>

#include "relgrow/dist.hpp"
#include "relgrow/error.hpp"
#include "relgrow/report.hpp"

using namespace relgrow;

namespace {

report::AnalysisReport sample_report() {
  report::AnalysisReport r;
  r.app_id = "Vtok";
  r.major_version = 2;
  r.unit = TimeUnit::Week;
  r.counts.counts = {3, 7, 11, 12, 11, 9, 8, 6, 5, 3, 2, 2, 1};
  r.n_events = 80;
  r.toolkit_version = "test";
  r.input_fingerprint = report::fingerprint("x");
  for (auto fam : {dist::Family::Weibull, dist::Family::Gamma, dist::Family::Rayleigh}) {
    report::DistEntry e;
    e.family = fam;
    e.fit = dist::fit(r.counts, fam);
    r.dist_fits.push_back(e);
  }
  report::DistEntry failed;
  failed.family = dist::Family::SShaped;
  failed.error = report::FitError{"FitDiverged", "optimizer did not converge"};
  r.dist_fits.push_back(failed);
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("fnv-1a reference vectors") {
  CHECK(report::fingerprint("") == "fnv1a64:cbf29ce484222325");
  CHECK(report::fingerprint("a") == "fnv1a64:af63dc4c8601ec8c");
  CHECK(report::fingerprint("foobar") == "fnv1a64:85944171f73967e8");
}

TEST_CASE("half-up rounding") {
  CHECK(report::round_half_up(2.345, 2) == doctest::Approx(2.35));
  CHECK(report::round_half_up(0.125, 2) == doctest::Approx(0.13));
  CHECK(report::round_half_up(1.23449, 4) == doctest::Approx(1.2345));
  CHECK(report::round_half_up(-1.5, 0) == doctest::Approx(-1.0));
}

TEST_CASE("every requested fit appears") {
  const auto r = sample_report();
  const auto j = report::to_json(r);
  CHECK(j["schema"] == 1);
  REQUIRE(j["distribution_fits"].size() == 4);
  CHECK(j["distribution_fits"][3]["status"] == "error");
  CHECK(j["distribution_fits"][3]["error"]["code"] == "FitDiverged");
  CHECK(j["distribution_fits"][2]["parameters"]["b"]["fixed"] == true);
  CHECK(r.any_fit_succeeded());
}

TEST_CASE("ranking by criterion") {
  auto r = sample_report();
  const auto order = report::rank_families(r, "rmse");
  REQUIRE(order.size() == 3);
  double prev = 0;
  for (const auto& name : order)
    for (const auto& e : r.dist_fits)
      if (e.fit && dist::to_string(e.family) == name) {
        CHECK(e.fit->rmse >= prev);
        prev = e.fit->rmse;
      }
  CHECK_THROWS_AS(report::rank_families(r, "aic"), Error);
}

TEST_CASE("table has the eight result columns") {
  const auto doc = nlohmann::json::parse(report::to_json(sample_report()).dump());
  const auto text = report::render(doc, report::Format::Table);
  for (const char* col : {"a (95% CI)", "b (95% CI)", "T_max obs / est", "Y(T_max)/C (%)", "RMSE", "Ad-R-Square",
                          "C (95% CI)", "MRE (%)"})
    CHECK(text.find(col) != std::string::npos);
  CHECK(text.find("sshaped   FIT FAILED: FitDiverged: optimizer did not converge") != std::string::npos);
  CHECK(text.find("2 (fixed)") != std::string::npos);
}

TEST_CASE("csv carries the table values") {
  const auto r = sample_report();
  const auto doc = nlohmann::json::parse(report::to_json(r).dump());
  const auto csv = lines(report::render(doc, report::Format::Csv));
  const auto table = report::render(doc, report::Format::Table);
  REQUIRE(csv.size() == 5);
  const auto head = fields(csv[0]);
  const auto weibull = fields(csv[1]);
  REQUIRE(head.size() == weibull.size());
  const auto& f = *r.dist_fits[0].fit;
  auto col = [&](const std::string& name) {
    return weibull[std::find(head.begin(), head.end(), name) - head.begin()];
  };
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", report::round_half_up(f.rmse, 4));
  CHECK(col("rmse") == buf);
  std::snprintf(buf, sizeof buf, "%.2f", report::round_half_up(f.c.estimate, 2));
  CHECK(col("c") == buf);
  std::snprintf(buf, sizeof buf, "%.2f", report::round_half_up(f.mre * 100, 2));
  CHECK(col("mre_pct") == buf);
  // Every CSV number also appears in the table.
  for (std::size_t i = 1; i + 1 < weibull.size(); ++i)
    if (!weibull[i].empty()) CHECK(table.find(weibull[i]) != std::string::npos);
  CHECK(csv[4].find("FIT FAILED") != std::string::npos);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(report::render(nlohmann::json::array(), report::Format::Table), Error);
  CHECK_THROWS_AS(report::render(nlohmann::json{{"schema", 2}}, report::Format::Table), Error);
  CHECK_THROWS_AS(report::render(nlohmann::json{{"schema", 1}}, report::Format::Csv), Error);
}
