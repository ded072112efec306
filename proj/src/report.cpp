#include "relgrow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "relgrow/error.hpp"

namespace relgrow::report {
namespace {

using ojson = nlohmann::ordered_json;

ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson interval(const numerics::ConfidenceInterval& ci) {
  ojson j;
  j["estimate"] = number(ci.estimate);
  j["lower"] = number(ci.lower);
  j["upper"] = number(ci.upper);
  j["level"] = ci.level;
  j["bounded"] = ci.bounded;
  return j;
}

ojson fixed_value(double v) {
  ojson j;
  j["estimate"] = v;
  j["fixed"] = true;
  return j;
}

ojson verdict(const gof::Verdict& v) {
  ojson j;
  j["test"] = std::string(gof::to_string(v.test));
  j["statistic"] = number(v.statistic);
  j["critical"] = number(v.critical);
  j["alpha"] = v.alpha;
  j[v.test == gof::Test::Cvm ? "m" : "df"] = v.df_or_m;
  j["passed"] = v.passed;
  return j;
}

ojson error_json(const FitError& e) {
  ojson j;
  j["code"] = e.code;
  j["message"] = e.message;
  return j;
}

ojson dist_entry(const DistEntry& e) {
  ojson j;
  j["family"] = std::string(dist::to_string(e.family));
  if (!e.fit) {
    j["status"] = "error";
    j["error"] = error_json(e.error.value_or(FitError{"Unknown", "no result"}));
    return j;
  }
  const auto& f = *e.fit;
  j["status"] = "ok";
  j["integrated_mass"] = f.integrated_mass;
  ojson params;
  switch (f.model.family) {
    case dist::Family::Weibull:
    case dist::Family::Gamma:
      params["a"] = interval(f.param_cis[0]);
      params["b"] = interval(f.param_cis[1]);
      break;
    case dist::Family::Rayleigh:
      params["a"] = interval(f.param_cis[0]);
      params["b"] = fixed_value(2.0);
      break;
    case dist::Family::SShaped:
      params["a"] = fixed_value(2.0);
      params["b"] = interval(f.param_cis[0]);
      break;
  }
  j["parameters"] = params;
  j["c"] = interval(f.c);
  j["tmax_observed"] = f.tmax_observed;
  j["tmax_estimated"] = f.tmax_estimated ? number(*f.tmax_estimated) : ojson(nullptr);
  j["fraction_by_tmax"] = f.fraction_by_tmax ? number(*f.fraction_by_tmax) : ojson(nullptr);
  j["rmse"] = number(f.rmse);
  j["adj_r_square"] = number(f.adj_r_square);
  j["mre"] = number(f.mre);
  j["sse"] = number(f.sse);
  j["n_bins"] = f.n_bins;
  if (e.chi_square) j["chi_square"] = verdict(*e.chi_square);
  else if (e.gof_error) j["chi_square"] = ojson{{"error", error_json(*e.gof_error)}};
  return j;
}

ojson srgm_entry(const SrgmEntry& e) {
  ojson j;
  j["kind"] = std::string(srgm::to_string(e.kind));
  j["formula"] = std::string(srgm::formula(e.kind));
  if (!e.fit) {
    j["status"] = "error";
    j["error"] = error_json(e.error.value_or(FitError{"Unknown", "no result"}));
    return j;
  }
  const auto& f = *e.fit;
  j["status"] = "ok";
  ojson params;
  params["scale"] = interval(f.param_cis[0]);
  params["rate"] = interval(f.param_cis[1]);
  j["parameters"] = params;
  j["log_likelihood"] = number(f.log_likelihood);
  j["n_events"] = f.n_events;
  j["observation_end"] = f.observation_end;
  if (e.cvm) j["cvm"] = verdict(*e.cvm);
  else if (e.gof_error) j["cvm"] = ojson{{"error", error_json(*e.gof_error)}};
  return j;
}

// ---- rendering -------------------------------------------------------------

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, round_half_up(v, digits));
  return buf;
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::Schema, std::string("report is missing '") + key + "'");
  return j.at(key);
}

// Number, or nullopt for JSON null.
std::optional<double> opt_number(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw Error(Errc::Schema, std::string("'") + key + "' is not a number");
  return v.get<double>();
}

std::string show(std::optional<double> v, int digits) { return v ? fixed(*v, digits) : std::string("-"); }

struct Cell {
  std::string text;  // for the table view
  std::optional<double> value, lower, upper;
  bool fixed_param = false;
};

Cell interval_cell(const nlohmann::json& ci, int digits) {
  Cell c;
  c.value = opt_number(ci, "estimate");
  if (ci.contains("fixed") && ci["fixed"].get<bool>()) {
    c.fixed_param = true;
    c.text = show(c.value, 0) + " (fixed)";
    return c;
  }
  c.lower = opt_number(ci, "lower");
  c.upper = opt_number(ci, "upper");
  c.text = show(c.value, digits) + " (" + show(c.lower, digits) + ", " + show(c.upper, digits) + ")";
  return c;
}

struct DistRow {
  std::string model;
  std::optional<std::string> failure;
  Cell a, b, c;
  int tmax_observed = 0;
  std::optional<double> tmax_estimated, fraction_pct, rmse, adj_r2, mre_pct;
};

struct SrgmRow {
  std::string model;
  std::optional<std::string> failure;
  Cell scale, rate;
  std::optional<double> log_likelihood, cvm_statistic, cvm_critical;
  std::optional<bool> cvm_passed;
};

std::optional<double> percent(std::optional<double> v) {
  if (!v) return v;
  return *v * 100.0;
}

std::vector<DistRow> dist_rows(const nlohmann::json& report) {
  std::vector<DistRow> rows;
  for (const auto& e : require(report, "distribution_fits")) {
    DistRow r;
    r.model = require(e, "family").get<std::string>();
    if (require(e, "status").get<std::string>() != "ok") {
      const auto& err = require(e, "error");
      r.failure = require(err, "code").get<std::string>() + ": " + require(err, "message").get<std::string>();
      rows.push_back(std::move(r));
      continue;
    }
    const auto& p = require(e, "parameters");
    r.a = interval_cell(require(p, "a"), 2);
    r.b = interval_cell(require(p, "b"), 2);
    r.c = interval_cell(require(e, "c"), 2);
    r.tmax_observed = require(e, "tmax_observed").get<int>();
    r.tmax_estimated = opt_number(e, "tmax_estimated");
    r.fraction_pct = percent(opt_number(e, "fraction_by_tmax"));
    r.rmse = opt_number(e, "rmse");
    r.adj_r2 = opt_number(e, "adj_r_square");
    r.mre_pct = percent(opt_number(e, "mre"));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SrgmRow> srgm_rows(const nlohmann::json& report) {
  std::vector<SrgmRow> rows;
  if (!report.contains("srgm_fits")) return rows;
  for (const auto& e : report["srgm_fits"]) {
    SrgmRow r;
    r.model = require(e, "kind").get<std::string>();
    if (require(e, "status").get<std::string>() != "ok") {
      const auto& err = require(e, "error");
      r.failure = require(err, "code").get<std::string>() + ": " + require(err, "message").get<std::string>();
      rows.push_back(std::move(r));
      continue;
    }
    const auto& p = require(e, "parameters");
    r.scale = interval_cell(require(p, "scale"), 2);
    r.rate = interval_cell(require(p, "rate"), 4);
    r.log_likelihood = opt_number(e, "log_likelihood");
    if (e.contains("cvm") && e["cvm"].contains("statistic")) {
      r.cvm_statistic = opt_number(e["cvm"], "statistic");
      r.cvm_critical = opt_number(e["cvm"], "critical");
      r.cvm_passed = require(e["cvm"], "passed").get<bool>();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string pad_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (k == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out += std::string(total > 2 ? total - 2 : total, '-') + "\n";
    }
  }
  return out;
}

std::string csv_num(std::optional<double> v, int digits) { return v ? fixed(*v, digits) : std::string(); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

ojson json_num(std::optional<double> v, int digits) {
  return v ? ojson(round_half_up(*v, digits)) : ojson(nullptr);
}

ojson json_cell(const Cell& c, int digits) {
  ojson j;
  j["estimate"] = json_num(c.value, digits);
  if (c.fixed_param) {
    j["fixed"] = true;
  } else {
    j["lower"] = json_num(c.lower, digits);
    j["upper"] = json_num(c.upper, digits);
  }
  return j;
}

}  // namespace

bool AnalysisReport::any_fit_succeeded() const {
  return std::any_of(dist_fits.begin(), dist_fits.end(), [](const auto& e) { return e.fit.has_value(); }) ||
         std::any_of(srgm_fits.begin(), srgm_fits.end(), [](const auto& e) { return e.fit.has_value(); });
}

std::string fingerprint(std::string_view content) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : content) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> rank_families(const AnalysisReport& report, std::string_view criterion) {
  std::vector<const dist::Fit*> fits;
  for (const auto& e : report.dist_fits)
    if (e.fit) fits.push_back(&*e.fit);
  auto key = [&](const dist::Fit* f) {
    if (criterion == "rmse") return f->rmse;
    if (criterion == "mre") return f->mre;
    if (criterion == "adj-r-square") return std::isnan(f->adj_r_square) ? INFINITY : -f->adj_r_square;
    throw Error(Errc::InvalidArgument, "unknown ranking criterion '" + std::string(criterion) + "'");
  };
  std::stable_sort(fits.begin(), fits.end(), [&](auto x, auto y) { return key(x) < key(y); });
  std::vector<std::string> out;
  for (const auto* f : fits) out.emplace_back(dist::to_string(f->model.family));
  return out;
}

ojson to_json(const AnalysisReport& r) {
  ojson j;
  j["schema"] = kSchemaVersion;
  j["toolkit_version"] = r.toolkit_version;
  if (r.generated_at) j["generated_at"] = *r.generated_at;
  j["input_fingerprint"] = r.input_fingerprint;
  j["app_id"] = r.app_id;
  j["major_version"] = r.major_version ? ojson(*r.major_version) : ojson(nullptr);
  j["unit"] = r.unit ? ojson(std::string(to_string(*r.unit))) : ojson(nullptr);
  j["n_events"] = r.n_events;
  j["alpha"] = r.alpha;
  j["bins"] = r.counts.counts;
  if (!r.counts.labels.empty()) j["bin_labels"] = r.counts.labels;
  j["total"] = r.counts.total();
  ojson dists = ojson::array();
  for (const auto& e : r.dist_fits) dists.push_back(dist_entry(e));
  j["distribution_fits"] = dists;
  ojson srgms = ojson::array();
  for (const auto& e : r.srgm_fits) srgms.push_back(srgm_entry(e));
  j["srgm_fits"] = srgms;
  if (r.rank_by) {
    j["ranking"]["by"] = *r.rank_by;
    j["ranking"]["order"] = rank_families(r, *r.rank_by);
  }
  return j;
}

double round_half_up(double value, int digits) {
  if (!std::isfinite(value)) return value;
  const double scale = std::pow(10.0, digits);
  const double scaled = value * scale;
  // Nudge by a few ulps so that decimal ties stored just below .5 still round up.
  return std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::abs(scaled))) / scale;
}

Format parse_format(std::string_view name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw Error(Errc::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

std::string render(const nlohmann::json& report, Format format) {
  if (!report.is_object()) throw Error(Errc::Schema, "report must be a JSON object");
  if (require(report, "schema").get<int>() != kSchemaVersion)
    throw Error(Errc::Schema, "unsupported report schema");
  const auto drows = dist_rows(report);
  const auto srows = srgm_rows(report);

  if (format == Format::Csv) {
    std::string out =
        "model,a,a_lower,a_upper,b,b_lower,b_upper,tmax_observed,tmax_estimated,"
        "fraction_by_tmax_pct,rmse,adj_r_square,c,c_lower,c_upper,mre_pct,status\n";
    for (const auto& r : drows) {
      if (r.failure) {
        out += r.model + ",,,,,,,,,,,,,,,," + csv_quote("FIT FAILED: " + *r.failure) + "\n";
        continue;
      }
      out += r.model + "," + csv_num(r.a.value, 2) + "," + csv_num(r.a.lower, 2) + "," +
             csv_num(r.a.upper, 2) + "," + csv_num(r.b.value, 2) + "," + csv_num(r.b.lower, 2) + "," +
             csv_num(r.b.upper, 2) + "," + std::to_string(r.tmax_observed) + "," +
             csv_num(r.tmax_estimated, 2) + "," + csv_num(r.fraction_pct, 2) + "," + csv_num(r.rmse, 4) +
             "," + csv_num(r.adj_r2, 4) + "," + csv_num(r.c.value, 2) + "," + csv_num(r.c.lower, 2) + "," +
             csv_num(r.c.upper, 2) + "," + csv_num(r.mre_pct, 2) + ",ok\n";
    }
    return out;
  }

  if (format == Format::Json) {
    ojson j;
    j["schema"] = kSchemaVersion;
    ojson rows = ojson::array();
    for (const auto& r : drows) {
      ojson row;
      row["model"] = r.model;
      if (r.failure) {
        row["status"] = "FIT FAILED: " + *r.failure;
      } else {
        row["a"] = json_cell(r.a, 2);
        row["b"] = json_cell(r.b, 2);
        row["tmax_observed"] = r.tmax_observed;
        row["tmax_estimated"] = json_num(r.tmax_estimated, 2);
        row["fraction_by_tmax_pct"] = json_num(r.fraction_pct, 2);
        row["rmse"] = json_num(r.rmse, 4);
        row["adj_r_square"] = json_num(r.adj_r2, 4);
        row["c"] = json_cell(r.c, 2);
        row["mre_pct"] = json_num(r.mre_pct, 2);
        row["status"] = "ok";
      }
      rows.push_back(row);
    }
    j["distributions"] = rows;
    ojson srgm = ojson::array();
    for (const auto& r : srows) {
      ojson row;
      row["model"] = r.model;
      if (r.failure) {
        row["status"] = "FIT FAILED: " + *r.failure;
      } else {
        row["scale"] = json_cell(r.scale, 2);
        row["rate"] = json_cell(r.rate, 4);
        row["log_likelihood"] = json_num(r.log_likelihood, 4);
        row["cvm_statistic"] = json_num(r.cvm_statistic, 4);
        row["cvm_critical"] = json_num(r.cvm_critical, 4);
        row["cvm_passed"] = r.cvm_passed ? ojson(*r.cvm_passed) : ojson(nullptr);
        row["status"] = "ok";
      }
      srgm.push_back(row);
    }
    j["srgm"] = srgm;
    return j.dump(2) + "\n";
  }

  std::string out;
  const auto& app = require(report, "app_id");
  const auto& major = require(report, "major_version");
  out += "Application: " + (app.is_string() ? app.get<std::string>() : std::string("-"));
  out += "  major version: " + (major.is_number() ? std::to_string(major.get<int>()) : std::string("unknown"));
  const auto& unit = require(report, "unit");
  if (unit.is_string()) out += "  grouped per " + unit.get<std::string>();
  out += "  events: " + std::to_string(require(report, "n_events").get<int>()) + "\n\n";

  if (!drows.empty()) {
    std::vector<std::vector<std::string>> t{{"Model", "a (95% CI)", "b (95% CI)", "T_max obs / est",
                                             "Y(T_max)/C (%)", "RMSE", "Ad-R-Square", "C (95% CI)",
                                             "MRE (%)"}};
    for (const auto& r : drows) {
      if (r.failure) {
        t.push_back({r.model, "FIT FAILED: " + *r.failure});
        continue;
      }
      t.push_back({r.model, r.a.text, r.b.text,
                   std::to_string(r.tmax_observed) + " / " + show(r.tmax_estimated, 2),
                   show(r.fraction_pct, 2), show(r.rmse, 4), show(r.adj_r2, 4), r.c.text,
                   show(r.mre_pct, 2)});
    }
    out += pad_table(t);
  }
  if (!srows.empty()) {
    if (!drows.empty()) out += "\n";
    std::vector<std::vector<std::string>> t{
        {"SRGM", "scale (95% CI)", "rate (95% CI)", "log-likelihood", "CVM stat / crit", "CVM"}};
    for (const auto& r : srows) {
      if (r.failure) {
        t.push_back({r.model, "FIT FAILED: " + *r.failure});
        continue;
      }
      std::string verdict = r.cvm_passed ? (*r.cvm_passed ? "pass" : "fail") : "-";
      t.push_back({r.model, r.scale.text, r.rate.text, show(r.log_likelihood, 4),
                   show(r.cvm_statistic, 4) + " / " + show(r.cvm_critical, 4), verdict});
    }
    out += pad_table(t);
  }
  return out;
}

}  // namespace relgrow::report
