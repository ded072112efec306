#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relgrow/dist.hpp"
#include "relgrow/gof.hpp"
#include "relgrow/series.hpp"
#include "relgrow/srgm.hpp"

namespace relgrow::report {

inline constexpr int kSchemaVersion = 1;

struct FitError {
  std::string code;
  std::string message;
};

struct DistEntry {
  dist::Family family = dist::Family::Weibull;
  std::optional<dist::Fit> fit;
  std::optional<FitError> error;
  std::optional<gof::Verdict> chi_square;
  std::optional<FitError> gof_error;
};

struct SrgmEntry {
  srgm::Kind kind = srgm::Kind::NhppExponential;
  std::optional<srgm::Fit> fit;
  std::optional<FitError> error;
  std::optional<gof::Verdict> cvm;
  std::optional<FitError> gof_error;
};

/// Everything one `fit` run produced. Every requested model appears exactly
/// once, holding either a fit or the error that stopped it.
struct AnalysisReport {
  std::string app_id;
  std::optional<int> major_version;
  std::optional<TimeUnit> unit;
  int n_events = 0;
  GroupedCounts counts;
  double alpha = gof::kDefaultAlpha;
  std::vector<DistEntry> dist_fits;
  std::vector<SrgmEntry> srgm_fits;
  std::string toolkit_version;
  std::string input_fingerprint;
  std::optional<std::string> generated_at;
  std::optional<std::string> rank_by;  // rmse | adj-r-square | mre

  bool any_fit_succeeded() const;
};

/// FNV-1a 64-bit content hash, rendered "fnv1a64:<16 hex digits>".
std::string fingerprint(std::string_view content);

/// Family names ordered best-first by the chosen criterion (successful fits only).
std::vector<std::string> rank_families(const AnalysisReport& report, std::string_view criterion);

nlohmann::ordered_json to_json(const AnalysisReport& report);

/// Half-up rounding to `digits` decimals.
double round_half_up(double value, int digits);

enum class Format { Table, Csv, Json };
Format parse_format(std::string_view name);

/// Renders a report JSON document. All numbers come from the document; the
/// renderer only rounds (parameters, T_max and C: 2 decimals; percentages:
/// 2 decimals; RMSE and Ad-R-Square: 4 decimals). Throws Errc::Schema on a
/// malformed document.
std::string render(const nlohmann::json& report, Format format);

}  // namespace relgrow::report
