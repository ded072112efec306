#include "relgrow/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "relgrow/error.hpp"

namespace relgrow::ingest {
namespace {

constexpr std::string_view kUnknownVersion = "???";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_recognized(std::string_view key) {
  return std::find(std::begin(kRecognizedKeys), std::end(kRecognizedKeys), key) !=
         std::end(kRecognizedKeys);
}

// Splits "Key:   value" into (key, value). Returns false when the line has no
// colon or the key is not recognized.
bool split_header(std::string_view line, std::string_view& key, std::string_view& value) {
  auto colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  key = line.substr(0, colon);
  if (!is_recognized(key)) return false;
  value = trim(line.substr(colon + 1));
  return true;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::optional<std::string> parse_version(std::string_view raw) {
  // "1.2.3 (456)" -> "1.2.3"; "??? (???)" -> unknown
  auto token = raw.substr(0, raw.find_first_of(" \t("));
  if (token.empty() || token == kUnknownVersion) return std::nullopt;
  return std::string(token);
}

std::optional<int> parse_thread(std::string_view raw) {
  int value = 0;
  if (raw.empty()) return std::nullopt;
  for (char c : raw) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
    if (value > 1'000'000) return std::nullopt;
  }
  return value;
}

Timestamp parse_any_timestamp(std::string_view raw) {
  if (raw.find('T') != std::string_view::npos) return Timestamp::parse_iso8601(raw);
  return Timestamp::parse_crash_format(raw);
}

std::vector<std::string> split_csv_row(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::string(trim(cell)));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::string(trim(cell)));
  return cells;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_count(double v) {
  char buf[32];
  if (v == std::floor(v) && std::abs(v) < 1e15)
    std::snprintf(buf, sizeof buf, "%.0f", v);
  else
    std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

long parse_positive_index(const std::string& cell, int row) {
  if (cell.empty() || !std::all_of(cell.begin(), cell.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw Error(Errc::Schema, "row " + std::to_string(row) + ": bin_index '" + cell +
                                  "' is not a positive integer");
  long v = std::stol(cell);
  if (v < 1) throw Error(Errc::Schema, "row " + std::to_string(row) + ": bin_index must be >= 1");
  if (v > 1'000'000) throw Error(Errc::Schema, "row " + std::to_string(row) + ": bin_index too large");
  return v;
}

double parse_count(const std::string& cell, int row, bool allow_fractional) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (cell.empty() || used != cell.size() || !std::isfinite(v))
    throw Error(Errc::Schema, "row " + std::to_string(row) + ": count '" + cell + "' is not a number");
  if (v < 0.0) throw Error(Errc::NegativeCount, "row " + std::to_string(row) + ": count " + cell);
  if (!allow_fractional && v != std::floor(v))
    throw Error(Errc::Schema, "row " + std::to_string(row) + ": count '" + cell + "' is not an integer");
  return v;
}

}  // namespace

RawCrashReport scan_crash_report(std::string_view text, std::string source_path) {
  RawCrashReport report;
  report.source_path = std::move(source_path);
  for_each_line(text, [&](std::string_view line) {
    ++report.line_count;
    std::string_view key, value;
    if (split_header(line, key, value)) report.fields_found.try_emplace(std::string(key), value);
  });
  return report;
}

FailureEvent to_event(const RawCrashReport& report) {
  const auto& f = report.fields_found;
  auto id = f.find("Identifier");
  if (id == f.end() || id->second.empty())
    throw Error(Errc::MissingField, "Identifier" + (report.source_path.empty() ? "" : " in " + report.source_path));
  auto dt = f.find("Date/Time");
  if (dt == f.end())
    throw Error(Errc::MissingField, "DateTime" + (report.source_path.empty() ? "" : " in " + report.source_path));

  FailureEvent e;
  e.app_id = id->second;
  e.timestamp = Timestamp::parse_crash_format(dt->second);
  if (auto v = f.find("Version"); v != f.end()) e.version = parse_version(v->second);
  if (auto t = f.find("Crashed Thread"); t != f.end()) e.crashed_thread = parse_thread(t->second);
  return e;
}

FailureEvent parse_crash_log(std::string_view text) { return to_event(scan_crash_report(text)); }

std::vector<FailureEvent> parse_extract_records(std::string_view text) {
  std::vector<FailureEvent> out;
  std::string block;
  auto flush = [&] {
    if (!block.empty()) out.push_back(parse_crash_log(block));
    block.clear();
  };
  for_each_line(text, [&](std::string_view line) {
    std::string_view key, value;
    if (split_header(line, key, value) && key == "Identifier") flush();
    block.append(line).push_back('\n');
  });
  flush();
  return out;
}

std::string to_extract_record(const FailureEvent& event) {
  std::string out = "Identifier: " + event.app_id + "\n";
  out += "Version: " + (event.version ? *event.version : std::string("??\? (??\?)")) + "\n";
  out += "Date/Time: " + event.timestamp.to_crash_format() + "\n";
  if (event.crashed_thread) out += "Crashed Thread: " + std::to_string(*event.crashed_thread) + "\n";
  return out;
}

DirectoryScan parse_crash_log_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot read directory " + dir.string() + ": " + ec.message());

  std::vector<fs::path> files;
  for (const auto& entry : it)
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  DirectoryScan scan;
  for (const auto& path : files) {
    try {
      scan.events.push_back(to_event(scan_crash_report(read_file(path), path.string())));
    } catch (const std::exception& ex) {
      scan.errors.push_back({path, ex.what()});
    }
  }
  std::stable_sort(scan.events.begin(), scan.events.end(), [](const auto& x, const auto& y) {
    return x.timestamp.instant < y.timestamp.instant;
  });
  return scan;
}

GroupedCounts parse_counts_csv(std::string_view text, const CountsCsvOptions& options) {
  std::vector<std::vector<std::string>> rows;
  for_each_line(text, [&](std::string_view line) {
    if (!trim(line).empty()) rows.push_back(split_csv_row(line));
  });
  if (rows.empty()) throw Error(Errc::Schema, "missing header row");

  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : int(it - header.begin());
  };
  const int idx_col = column("bin_index");
  const int cnt_col = column("count");
  const int lbl_col = column("label");
  if (idx_col < 0) throw Error(Errc::Schema, "missing column 'bin_index'");
  if (cnt_col < 0) throw Error(Errc::Schema, "missing column 'count'");

  std::map<long, std::pair<double, std::string>> bins;
  bool any_label = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const int line_no = int(r) + 1;
    if (int(row.size()) <= std::max(idx_col, cnt_col))
      throw Error(Errc::Schema, "row " + std::to_string(line_no) + ": too few columns");
    long index = parse_positive_index(row[idx_col], line_no);
    double count = parse_count(row[cnt_col], line_no, options.allow_fractional);
    std::string label = (lbl_col >= 0 && lbl_col < int(row.size())) ? row[lbl_col] : std::string();
    any_label = any_label || !label.empty();
    if (!bins.emplace(index, std::pair{count, std::move(label)}).second)
      throw Error(Errc::Schema, "duplicate bin_index " + std::to_string(index));
  }

  GroupedCounts out;
  out.unit = options.unit;
  const long last = bins.empty() ? 0 : bins.rbegin()->first;
  out.counts.assign(std::size_t(last), 0.0);
  if (any_label) out.labels.assign(std::size_t(last), std::string());
  for (auto& [index, value] : bins) {
    out.counts[std::size_t(index - 1)] = value.first;
    if (any_label) out.labels[std::size_t(index - 1)] = value.second;
  }
  return out;
}

GroupedCounts read_counts_csv(const std::filesystem::path& path, const CountsCsvOptions& options) {
  return parse_counts_csv(read_file(path), options);
}

std::string to_counts_csv(const GroupedCounts& counts) {
  const bool labelled = !counts.labels.empty();
  std::string out = labelled ? "bin_index,count,label\n" : "bin_index,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out += std::to_string(GroupedCounts::index_of(i)) + "," + format_count(counts.counts[i]);
    if (labelled) out += "," + csv_escape(counts.labels[i]);
    out += "\n";
  }
  return out;
}

std::vector<FailureEvent> read_events_csv(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  for_each_line(read_file(path), [&](std::string_view line) {
    if (!trim(line).empty()) rows.push_back(split_csv_row(line));
  });
  if (rows.empty()) throw Error(Errc::Schema, path.string() + ": missing header row");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : int(it - header.begin());
  };
  const int app = column("app_id"), ver = column("version"), ts = column("timestamp");
  const int thr = column("crashed_thread"), sev = column("severity");
  if (app < 0 || ver < 0 || ts < 0)
    throw Error(Errc::Schema, path.string() + ": header needs app_id,version,timestamp");

  std::vector<FailureEvent> events;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](int c) -> std::string { return c >= 0 && c < int(row.size()) ? row[c] : std::string(); };
    FailureEvent e;
    e.app_id = cell(app);
    if (e.app_id.empty())
      throw Error(Errc::MissingField, "Identifier on row " + std::to_string(r + 1));
    e.version = parse_version(cell(ver));
    e.timestamp = parse_any_timestamp(cell(ts));
    e.crashed_thread = parse_thread(cell(thr));
    if (auto s = cell(sev); !s.empty()) {
      auto level = parse_thread(s);
      if (!level || *level < 1)
        throw Error(Errc::Schema, "row " + std::to_string(r + 1) + ": severity must be >= 1");
      e.severity = *level;
    }
    events.push_back(std::move(e));
  }
  std::stable_sort(events.begin(), events.end(), [](const auto& x, const auto& y) {
    return x.timestamp.instant < y.timestamp.instant;
  });
  return events;
}

nlohmann::ordered_json to_json(const FailureEvent& event) {
  nlohmann::ordered_json j;
  j["app_id"] = event.app_id;
  j["version"] = event.version ? nlohmann::ordered_json(*event.version) : nlohmann::ordered_json(nullptr);
  j["timestamp"] = event.timestamp.to_iso8601();
  j["crashed_thread"] =
      event.crashed_thread ? nlohmann::ordered_json(*event.crashed_thread) : nlohmann::ordered_json(nullptr);
  j["severity"] = event.severity;
  return j;
}

FailureEvent event_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::Schema, "event must be a JSON object");
  FailureEvent e;
  if (!j.contains("app_id") || !j["app_id"].is_string() || j["app_id"].get<std::string>().empty())
    throw Error(Errc::MissingField, "Identifier");
  e.app_id = j["app_id"].get<std::string>();
  if (!j.contains("timestamp") || !j["timestamp"].is_string()) throw Error(Errc::MissingField, "DateTime");
  e.timestamp = parse_any_timestamp(j["timestamp"].get<std::string>());
  if (j.contains("version") && j["version"].is_string()) e.version = j["version"].get<std::string>();
  if (j.contains("crashed_thread") && j["crashed_thread"].is_number_integer())
    e.crashed_thread = j["crashed_thread"].get<int>();
  if (j.contains("severity")) {
    if (!j["severity"].is_number_integer() || j["severity"].get<int>() < 1)
      throw Error(Errc::Schema, "severity must be an integer >= 1");
    e.severity = j["severity"].get<int>();
  }
  return e;
}

std::string events_to_json(std::span<const FailureEvent> events) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : events) arr.push_back(to_json(e));
  return arr.dump(2) + "\n";
}

std::vector<FailureEvent> events_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::Schema, std::string("events file is not valid JSON: ") + ex.what());
  }
  if (!doc.is_array()) throw Error(Errc::Schema, "events file must hold a JSON array");
  std::vector<FailureEvent> events;
  events.reserve(doc.size());
  for (const auto& j : doc) events.push_back(event_from_json(j));
  return events;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace relgrow::ingest
