#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drugbus/error.hpp"
#include "drugbus/geo.hpp"
#include "drugbus/timestamp.hpp"

namespace drugbus {

enum class QueryLogErrc { FileUnreadable, FileUnwritable, ParseError, BadBucket };

std::string_view to_string(QueryLogErrc code);

using QueryLogError = Error<QueryLogErrc>;

struct QueryLogRecord {
  Timestamp timestamp;
  std::string drug_name;  // lowercased
  std::optional<GeoPoint> search_point;
  std::vector<std::string> hit_vendors;

  friend bool operator==(const QueryLogRecord&, const QueryLogRecord&) = default;
};

inline constexpr std::string_view kQueryLogHeader = "timestamp|drug_name|lat|lon|hit_vendors";

std::string format_log_record(const QueryLogRecord& record);

/// Parses a whole log file, header included.
std::vector<QueryLogRecord> parse_query_log(std::string_view content);

/// Append-only analytics log. Appends are serialized; each record is written
/// to the backing file (if any) as one line.
class QueryLog {
 public:
  QueryLog() = default;

  /// Loads existing records, or creates the file with its header.
  explicit QueryLog(std::filesystem::path path);

  QueryLog(const QueryLog&) = delete;
  QueryLog& operator=(const QueryLog&) = delete;

  void append(QueryLogRecord record);

  std::vector<QueryLogRecord> records() const;

  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<QueryLogRecord> records_;
};

struct ByDrug {};

struct ByRegion {
  double cell_degrees = 1.0;
};

using ReportBucket = std::variant<ByDrug, ByRegion>;

struct ReportEntry {
  std::string key;  // lowercased drug name, or "<lat cell>,<lon cell>"
  std::size_t count = 0;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

/// Query counts per drug or per lat/lon grid cell (floor(deg / cell)),
/// ordered by descending count, then key. Region cells sort numerically.
/// Throws BadBucket when the cell size is not a positive finite number.
std::vector<ReportEntry> consumption_report(const std::vector<QueryLogRecord>& log,
                                            const ReportBucket& bucket);

}  // namespace drugbus
