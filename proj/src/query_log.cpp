#include "drugbus/query_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "drugbus/text.hpp"

namespace drugbus {

namespace {

std::string format_degrees(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::optional<double> parse_degrees(std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw QueryLogError(QueryLogErrc::ParseError, "line " + std::to_string(line) + ": " + why);
}

}  // namespace

std::string_view to_string(QueryLogErrc code) {
  switch (code) {
    case QueryLogErrc::FileUnreadable: return "FileUnreadable";
    case QueryLogErrc::FileUnwritable: return "FileUnwritable";
    case QueryLogErrc::ParseError: return "ParseError";
    case QueryLogErrc::BadBucket: return "BadBucket";
  }
  return "Unknown";
}

std::string format_log_record(const QueryLogRecord& r) {
  std::string out = format_rfc3339(r.timestamp) + '|' + r.drug_name + '|';
  if (r.search_point) {
    out += format_degrees(r.search_point->latitude) + '|' + format_degrees(r.search_point->longitude);
  } else {
    out += '|';
  }
  return out + '|' + text::join(r.hit_vendors, ";");
}

std::vector<QueryLogRecord> parse_query_log(std::string_view content) {
  auto lines = text::split(content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kQueryLogHeader) {
    bad_row(1, "expected header '" + std::string(kQueryLogHeader) + "'");
  }
  std::vector<QueryLogRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = i + 1;
    const auto f = text::split(lines[i], '|');
    if (f.size() != 5) bad_row(line, "expected 5 fields");
    QueryLogRecord r;
    const auto ts = parse_rfc3339(f[0]);
    if (!ts) bad_row(line, "bad timestamp");
    r.timestamp = *ts;
    r.drug_name = f[1];
    if (f[2].empty() != f[3].empty()) bad_row(line, "lat and lon must both be present or absent");
    if (!f[2].empty()) {
      const auto lat = parse_degrees(f[2]);
      const auto lon = parse_degrees(f[3]);
      if (!lat || !lon) bad_row(line, "bad coordinates");
      r.search_point = GeoPoint{*lat, *lon};
    }
    if (!f[4].empty()) r.hit_vendors = text::split(f[4], ';');
    out.push_back(std::move(r));
  }
  return out;
}

QueryLog::QueryLog(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_)) {
    std::ofstream out(*path_, std::ios::binary);
    out << kQueryLogHeader << '\n';
    if (!out) {
      throw QueryLogError(QueryLogErrc::FileUnwritable,
                          "cannot create query log '" + path_->string() + "'");
    }
    return;
  }
  std::ifstream in(*path_, std::ios::binary);
  if (!in) {
    throw QueryLogError(QueryLogErrc::FileUnreadable,
                        "cannot read query log '" + path_->string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  records_ = parse_query_log(buf.str());
}

void QueryLog::append(QueryLogRecord record) {
  std::lock_guard lock(mutex_);
  if (path_) {
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    out << format_log_record(record) << '\n';
    out.flush();
    if (!out) {
      throw QueryLogError(QueryLogErrc::FileUnwritable,
                          "cannot append to query log '" + path_->string() + "'");
    }
  }
  records_.push_back(std::move(record));
}

std::vector<QueryLogRecord> QueryLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<ReportEntry> consumption_report(const std::vector<QueryLogRecord>& log,
                                            const ReportBucket& bucket) {
  std::vector<ReportEntry> out;
  if (std::holds_alternative<ByDrug>(bucket)) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : log) ++counts[text::to_lower(r.drug_name)];
    for (auto& [key, count] : counts) out.push_back({key, count});
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    return out;
  }

  const double cell = std::get<ByRegion>(bucket).cell_degrees;
  if (!(cell > 0.0) || !std::isfinite(cell)) {
    throw QueryLogError(QueryLogErrc::BadBucket, "region cell size must be a positive number");
  }
  std::map<std::pair<long long, long long>, std::size_t> counts;
  for (const auto& r : log) {
    if (!r.search_point) continue;
    const auto lat = static_cast<long long>(std::floor(r.search_point->latitude / cell));
    const auto lon = static_cast<long long>(std::floor(r.search_point->longitude / cell));
    ++counts[{lat, lon}];
  }
  std::vector<std::pair<std::pair<long long, long long>, std::size_t>> rows(counts.begin(),
                                                                            counts.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [cellkey, count] : rows) {
    out.push_back({std::to_string(cellkey.first) + "," + std::to_string(cellkey.second), count});
  }
  return out;
}

}  // namespace drugbus
