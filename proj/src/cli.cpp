#include "relgrow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relgrow/dist.hpp"
#include "relgrow/error.hpp"
#include "relgrow/gof.hpp"
#include "relgrow/ingest.hpp"
#include "relgrow/report.hpp"
#include "relgrow/series.hpp"
#include "relgrow/srgm.hpp"

#ifndef RELGROW_VERSION
#define RELGROW_VERSION "0.0.0"
#endif

namespace relgrow::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Argument values that parsed but make no sense together.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  double alpha = gof::kDefaultAlpha;
  std::uint64_t seed = 0;
  bool no_timestamp = false;
};

struct IngestArgs {
  std::string logs, csv, out;
};

struct FitArgs {
  std::string events, counts, times;
  std::string app, major, unit = "week";
  std::vector<std::string> families, srgm;
  std::string out, plot_data, rank, cvm_table;
  int restarts = 2;
  bool integrated = false;
};

struct NhppArgs {
  std::string model = "nhpp", out;
  double scale = 0.0, rate = 0.0, horizon = 1.0;
};

struct CountsArgs {
  std::string family, noise = "none", out;
  std::optional<double> a, b;
  double c = 0.0;
  int bins = 0;
};

struct ReportArgs {
  std::string in, format = "table";
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else ingest::write_file_atomic(path, content);
}

std::string now_iso8601() {
  const auto now = std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
  return Timestamp{now, std::chrono::minutes{0}}.to_iso8601();
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---- ingest ----------------------------------------------------------------

int cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
  if (args.logs.empty() && args.csv.empty()) throw UsageError("ingest needs --logs and/or --csv");
  std::vector<FailureEvent> events;
  std::size_t failures = 0;
  if (!args.logs.empty()) {
    auto scan = ingest::parse_crash_log_dir(args.logs);
    for (const auto& e : scan.errors) err << "skipped " << e.path.string() << ": " << e.message << "\n";
    failures = scan.errors.size();
    events = std::move(scan.events);
  }
  if (!args.csv.empty()) {
    auto extra = ingest::read_events_csv(args.csv);
    events.insert(events.end(), extra.begin(), extra.end());
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& x, const auto& y) { return x.timestamp.instant < y.timestamp.instant; });
  err << events.size() << " events read, " << failures << " files skipped\n";
  if (events.empty()) {
    err << "no events found\n";
    return kInputError;
  }
  emit(args.out, ingest::events_to_json(events), out);
  return kOk;
}

// ---- fit -------------------------------------------------------------------

struct SimulatedTimes {
  std::vector<double> times;
  double horizon = 1.0;
};

SimulatedTimes parse_times(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Schema, std::string("times file is not JSON: ") + e.what());
  }
  SimulatedTimes s;
  try {
    if (j.is_array()) {
      s.times = j.get<std::vector<double>>();
      s.horizon = s.times.empty() ? 1.0 : s.times.back();
    } else {
      s.times = j.at("times").get<std::vector<double>>();
      s.horizon = j.at("horizon").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Schema, std::string("malformed times file: ") + e.what());
  }
  if (!std::is_sorted(s.times.begin(), s.times.end()))
    throw Error(Errc::Schema, "times must be ascending");
  for (double t : s.times)
    if (!(t > 0.0) || t > s.horizon) throw Error(Errc::Schema, "times must lie in (0, horizon]");
  return s;
}

std::optional<int> parse_major(const std::string& text) {
  if (text == "unknown") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--major must be a non-negative integer or 'unknown'");
}

FailureSeries select_series(const std::vector<FailureEvent>& events, const FitArgs& args) {
  auto all = split_by_major_version(events);
  std::vector<FailureSeries> chosen;
  for (auto& s : all) {
    if (!args.app.empty() && s.app_id() != args.app) continue;
    if (!args.major.empty() && s.major_version() != parse_major(args.major)) continue;
    chosen.push_back(std::move(s));
  }
  if (chosen.empty()) throw Error(Errc::EmptySeries, "no events match the requested app and major version");
  if (chosen.size() > 1) {
    std::string what;
    for (const auto& s : chosen)
      what += " " + s.app_id() + "/" + (s.major_version() ? std::to_string(*s.major_version()) : "unknown");
    throw UsageError("several series match; narrow with --app/--major:" + what);
  }
  return std::move(chosen.front());
}

report::FitError fit_error(const Error& e) { return {std::string(to_string(e.code())), e.what()}; }

std::string plot_csv(const report::AnalysisReport& r) {
  std::string out = "t,observed";
  std::vector<std::vector<double>> curves;
  for (const auto& e : r.dist_fits) {
    if (!e.fit) continue;
    out += ",";
    out += dist::to_string(e.family);
    curves.push_back(dist::expected_counts(*e.fit, int(r.counts.size())));
  }
  out += "\n";
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    out += std::to_string(GroupedCounts::index_of(i)) + "," + format_number(r.counts.counts[i]);
    for (const auto& c : curves) out += "," + format_number(c[i]);
    out += "\n";
  }
  return out;
}

int cmd_fit(const FitArgs& args, const Globals& g, std::ostream& out, std::ostream& err) {
  const int sources = int(!args.events.empty()) + int(!args.counts.empty()) + int(!args.times.empty());
  if (sources != 1) throw UsageError("fit needs exactly one of --events, --counts, --times");
  if (!(g.alpha > 0.0 && g.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (args.restarts < 0) throw UsageError("--restarts must be >= 0");

  const TimeUnit unit = parse_time_unit(args.unit);
  std::vector<dist::Family> families;
  std::vector<srgm::Kind> kinds;
  const auto family_names = split_list(args.families);
  const auto kind_names = split_list(args.srgm);
  for (const auto& n : family_names) families.push_back(dist::parse_family(n));
  for (const auto& n : kind_names) kinds.push_back(srgm::parse_kind(n));
  if (!args.rank.empty() && args.rank != "rmse" && args.rank != "adj-r-square" && args.rank != "mre")
    throw UsageError("--rank must be rmse, adj-r-square or mre");

  // Distribution fits need bins; SRGM fits need exact times.
  if (!args.counts.empty() && !kinds.empty()) throw UsageError("--srgm needs event times, not grouped counts");
  if (!args.times.empty() && !families.empty()) throw UsageError("--families needs grouped data, not bare times");
  if (args.families.empty() && args.times.empty())
    families = {dist::Family::Weibull, dist::Family::Gamma, dist::Family::Rayleigh, dist::Family::SShaped};
  if (args.srgm.empty() && args.counts.empty())
    kinds = {srgm::Kind::NhppExponential, srgm::Kind::MusaBasic, srgm::Kind::MusaOkumoto};

  std::optional<gof::CvmCriticalTable> custom_table;
  if (!args.cvm_table.empty()) custom_table = gof::CvmCriticalTable::load(args.cvm_table);
  const auto& table = custom_table ? *custom_table : gof::CvmCriticalTable::builtin();

  report::AnalysisReport r;
  r.alpha = g.alpha;
  r.toolkit_version = RELGROW_VERSION;
  if (!g.no_timestamp) r.generated_at = now_iso8601();
  if (!args.rank.empty()) r.rank_by = args.rank;

  std::vector<double> srgm_times;
  double srgm_end = 1.0;

  if (!args.events.empty()) {
    const std::string text = ingest::read_file(args.events);
    r.input_fingerprint = report::fingerprint(text);
    const auto series = select_series(ingest::events_from_json(text), args);
    r.app_id = series.app_id();
    r.major_version = series.major_version();
    r.unit = unit;
    r.n_events = int(series.size());
    r.counts = group(series, unit);
    if (!kinds.empty()) {
      try {
        srgm_times = normalize_times(series).times;
      } catch (const Error& e) {
        // A single instant cannot be normalized; every SRGM fit records it.
        for (auto k : kinds) r.srgm_fits.push_back({k, std::nullopt, fit_error(e), std::nullopt, std::nullopt});
        kinds.clear();
      }
    }
  } else if (!args.counts.empty()) {
    const std::string text = ingest::read_file(args.counts);
    r.input_fingerprint = report::fingerprint(text);
    r.counts = ingest::parse_counts_csv(text, {unit, true});
    r.app_id = args.app;
    if (!args.major.empty()) r.major_version = parse_major(args.major);
    r.unit = unit;
    r.n_events = int(std::lround(r.counts.total()));
  } else {
    const std::string text = ingest::read_file(args.times);
    r.input_fingerprint = report::fingerprint(text);
    auto sim = parse_times(text);
    r.app_id = args.app;
    if (!args.major.empty()) r.major_version = parse_major(args.major);
    r.n_events = int(sim.times.size());
    srgm_times = std::move(sim.times);
    srgm_end = sim.horizon;
  }

  dist::FitOptions fit_options;
  fit_options.integrated_mass = args.integrated;
  fit_options.restarts = args.restarts;
  fit_options.seed = g.seed;
  for (auto family : families) {
    report::DistEntry e;
    e.family = family;
    try {
      e.fit = dist::fit(r.counts, family, fit_options);
    } catch (const Error& ex) {
      e.error = fit_error(ex);
    }
    if (e.fit) {
      try {
        e.chi_square = gof::chi_square_test(r.counts, *e.fit, g.alpha);
      } catch (const Error& ex) {
        e.gof_error = fit_error(ex);
      }
    }
    r.dist_fits.push_back(std::move(e));
  }

  for (auto kind : kinds) {
    report::SrgmEntry e;
    e.kind = kind;
    try {
      e.fit = srgm::fit_mle(srgm_times, srgm_end, kind);
    } catch (const Error& ex) {
      e.error = fit_error(ex);
    }
    if (e.fit) {
      try {
        e.cvm = gof::cvm_test(srgm_times, *e.fit, g.alpha, table);
      } catch (const Error& ex) {
        e.gof_error = fit_error(ex);
      }
    }
    r.srgm_fits.push_back(std::move(e));
  }

  const auto doc = report::to_json(r);
  const std::string json_text = doc.dump(2) + "\n";
  if (args.out.empty()) {
    out << json_text;
  } else {
    ingest::write_file_atomic(args.out, json_text);
    out << report::render(nlohmann::json::parse(json_text), report::Format::Table);
  }
  if (!args.plot_data.empty()) ingest::write_file_atomic(args.plot_data, plot_csv(r));

  if (!r.any_fit_succeeded()) {
    err << "no requested fit converged\n";
    return kNoFitConverged;
  }
  return kOk;
}

// ---- simulate --------------------------------------------------------------

int cmd_simulate_nhpp(const NhppArgs& args, const Globals& g, std::ostream& out) {
  srgm::Model model;
  try {
    model = srgm::Model(srgm::parse_kind(args.model), args.scale, args.rate);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!(args.horizon > 0.0)) throw UsageError("--horizon must be positive");
  const auto times = srgm::generate_events(model, args.horizon, g.seed);
  ojson j;
  j["model"] = std::string(srgm::to_string(model.kind));
  j["scale"] = model.scale;
  j["rate"] = model.rate;
  j["horizon"] = args.horizon;
  j["seed"] = g.seed;
  j["times"] = times;
  emit(args.out, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_simulate_counts(const CountsArgs& args, const Globals& g, std::ostream& out) {
  if (args.bins < 1) throw UsageError("--bins must be >= 1");
  dist::Model model;
  dist::Noise noise;
  try {
    const auto family = dist::parse_family(args.family);
    double a = args.a.value_or(family == dist::Family::SShaped ? 2.0 : 0.0);
    double b = args.b.value_or(family == dist::Family::Rayleigh ? 2.0 : 0.0);
    model = dist::Model(family, a, b);
    if (args.noise == "none") noise = dist::Noise::None;
    else if (args.noise == "poisson") noise = dist::Noise::Poisson;
    else throw UsageError("--noise must be none or poisson");
    if (!(args.c >= 0.0)) throw UsageError("--c must be non-negative");
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto counts = dist::generate_counts(model, args.c, args.bins, noise, g.seed);
  emit(args.out, ingest::to_counts_csv(counts), out);
  return kOk;
}

// ---- report ----------------------------------------------------------------

int cmd_report(const ReportArgs& args, std::ostream& out) {
  report::Format format;
  try {
    format = report::parse_format(args.format);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const std::string text = ingest::read_file(args.in);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Schema, std::string("report is not JSON: ") + e.what());
  }
  std::string rendered;
  try {
    rendered = report::render(doc, format);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Schema, std::string("malformed report: ") + e.what());
  }
  out << rendered;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reliability growth analysis of crash logs", "relgrow"};
  app.set_version_flag("--version", RELGROW_VERSION);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--alpha", g.alpha, "Significance level for goodness-of-fit tests")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for simulation and optimizer restarts")->capture_default_str();
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the generation time from reports");

  IngestArgs ia;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse crash logs into an event list");
  ingest_cmd->fallthrough();
  ingest_cmd->add_option("--logs", ia.logs, "Directory of crash reports");
  ingest_cmd->add_option("--csv", ia.csv, "Additional events as CSV");
  ingest_cmd->add_option("--out", ia.out, "Output events JSON (default stdout)");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit distribution and reliability growth models");
  fit_cmd->fallthrough();
  fit_cmd->add_option("--events", fa.events, "Events JSON from ingest");
  fit_cmd->add_option("--counts", fa.counts, "Grouped counts CSV (bin_index,count[,label])");
  fit_cmd->add_option("--times", fa.times, "Event times JSON from simulate nhpp");
  fit_cmd->add_option("--app", fa.app, "Application identifier");
  fit_cmd->add_option("--major", fa.major, "Major version number or 'unknown'");
  fit_cmd->add_option("--unit", fa.unit, "Grouping period: day, week or month")->capture_default_str();
  fit_cmd->add_option("--families", fa.families, "Comma-separated: weibull,gamma,rayleigh,sshaped");
  fit_cmd->add_option("--srgm", fa.srgm, "Comma-separated: nhpp,musa-basic,musa-okumoto,power-law");
  fit_cmd->add_option("--out", fa.out, "Report JSON (default stdout)");
  fit_cmd->add_option("--plot-data", fa.plot_data, "Observed and fitted per-bin curves as CSV");
  fit_cmd->add_option("--rank", fa.rank, "Rank families by rmse, adj-r-square or mre");
  fit_cmd->add_option("--restarts", fa.restarts, "Extra jittered optimizer restarts")->capture_default_str();
  fit_cmd->add_flag("--integrated", fa.integrated, "Fit per-bin probability mass instead of density");
  fit_cmd->add_option("--cvm-table", fa.cvm_table, "CSV of Cramer-von Mises critical values (m,alpha,critical)");

  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic data");
  sim_cmd->fallthrough();
  sim_cmd->require_subcommand(1);
  NhppArgs na;
  auto* nhpp_cmd = sim_cmd->add_subcommand("nhpp", "Event times of a reliability growth model");
  nhpp_cmd->fallthrough();
  nhpp_cmd->add_option("--model", na.model, "nhpp, musa-basic, musa-okumoto or power-law")->capture_default_str();
  nhpp_cmd->add_option("--scale", na.scale, "Scale parameter")->required();
  nhpp_cmd->add_option("--rate", na.rate, "Rate parameter")->required();
  nhpp_cmd->add_option("--horizon", na.horizon, "Observation end")->capture_default_str();
  nhpp_cmd->add_option("--out", na.out, "Output JSON (default stdout)");
  CountsArgs ca;
  auto* counts_cmd = sim_cmd->add_subcommand("counts", "Per-bin failure counts of a distribution model");
  counts_cmd->fallthrough();
  counts_cmd->add_option("--family", ca.family, "weibull, gamma, rayleigh or sshaped")->required();
  counts_cmd->add_option("--a", ca.a, "First parameter");
  counts_cmd->add_option("--b", ca.b, "Second parameter");
  counts_cmd->add_option("--c", ca.c, "Total expected failures")->required();
  counts_cmd->add_option("--bins", ca.bins, "Number of bins")->required();
  counts_cmd->add_option("--noise", ca.noise, "none or poisson")->capture_default_str();
  counts_cmd->add_option("--out", ca.out, "Output CSV (default stdout)");

  ReportArgs ra;
  auto* report_cmd = app.add_subcommand("report", "Render a report file");
  report_cmd->fallthrough();
  report_cmd->add_option("--in", ra.in, "Report JSON from fit")->required();
  report_cmd->add_option("--format", ra.format, "table, csv or json")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << RELGROW_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(ia, out, err);
    if (fit_cmd->parsed()) return cmd_fit(fa, g, out, err);
    if (nhpp_cmd->parsed()) return cmd_simulate_nhpp(na, g, out);
    if (counts_cmd->parsed()) return cmd_simulate_counts(ca, g, out);
    if (report_cmd->parsed()) return cmd_report(ra, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::InvalidArgument ? kUsage : kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace relgrow::cli
