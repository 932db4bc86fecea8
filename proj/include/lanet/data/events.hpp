#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lanet::data {

using Date = std::chrono::sys_days;

enum class DateFormat {
  iso,  // YYYY-MM-DD
  dmy,  // DD-MM-YYYY
};

DateFormat parse_date_format(std::string_view name);
Date parse_date(std::string_view text, DateFormat format);
std::string format_date(Date date);
int days_between(Date earlier, Date later);

/// One timestamped event: a label set with one amount per label.
struct EventRecord {
  std::string sequence_id;
  Date date;
  std::vector<std::string> labels;
  std::vector<double> amounts;

  bool operator==(const EventRecord&) const = default;
};

/// All events of one ID in ascending date order.
struct Sequence {
  std::string id;
  std::vector<EventRecord> events;
};

/// Orders label or ID strings numerically when both are integers, else
/// lexicographically (integers first).
bool natural_less(const std::string& a, const std::string& b);

/// Groups by ID (IDs in natural order) and sorts each group by date.
/// Throws ValidationError when an ID has two events on the same date.
std::vector<Sequence> group_by_id(std::vector<EventRecord> events);

/// Canonical CSV: header `id,date,labels,amounts`, label and amount lists
/// semicolon-separated inside quoted cells. Returned rows are grouped by ID
/// and date-sorted within each ID.
std::vector<EventRecord> parse_csv(std::istream& in, DateFormat format = DateFormat::iso);
std::vector<EventRecord> parse_csv_file(const std::filesystem::path& path,
                                        DateFormat format = DateFormat::iso);

void write_csv(std::ostream& out, const std::vector<EventRecord>& events);
void write_csv_file(const std::filesystem::path& path, const std::vector<EventRecord>& events);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace lanet::data
