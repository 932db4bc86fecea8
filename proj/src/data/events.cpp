#include "lanet/data/events.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "lanet/error.hpp"

namespace lanet::data {

namespace {

int parse_int_field(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("bad date component '" + std::string(s) + "'");
  }
  return v;
}

bool is_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

// Splits one CSV record into fields, honoring double-quoted cells.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::string> split_list(const std::string& cell) {
  std::vector<std::string> out;
  if (cell.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = cell.find(';', start);
    std::string item = cell.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_amount(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line_no, "bad amount '" + s + "'");
  }
  return v;
}

std::string quote_list(const std::vector<std::string>& items) {
  std::string out = "\"";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    for (char c : items[i]) {
      if (c == '"') out += '"';
      out += c;
    }
  }
  out += '"';
  return out;
}

std::string quote_cell(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

DateFormat parse_date_format(std::string_view name) {
  if (name == "iso" || name == "YYYY-MM-DD") return DateFormat::iso;
  if (name == "dmy" || name == "DD-MM-YYYY") return DateFormat::dmy;
  throw ConfigError("unknown date format '" + std::string(name) + "' (expected iso or dmy)");
}

Date parse_date(std::string_view text, DateFormat format) {
  if (text.size() != 10 || text[format == DateFormat::iso ? 4 : 2] != '-' ||
      text[format == DateFormat::iso ? 7 : 5] != '-') {
    throw ValidationError("unparseable date '" + std::string(text) + "'");
  }
  int y, m, d;
  if (format == DateFormat::iso) {
    y = parse_int_field(text.substr(0, 4));
    m = parse_int_field(text.substr(5, 2));
    d = parse_int_field(text.substr(8, 2));
  } else {
    d = parse_int_field(text.substr(0, 2));
    m = parse_int_field(text.substr(3, 2));
    y = parse_int_field(text.substr(6, 4));
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ValidationError("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int days_between(Date earlier, Date later) {
  return static_cast<int>((later - earlier).count());
}

bool natural_less(const std::string& a, const std::string& b) {
  const bool ia = is_integer(a), ib = is_integer(b);
  if (ia && ib) {
    if (a.size() <= 18 && b.size() <= 18) {
      long long x = std::stoll(a), y = std::stoll(b);
      if (x != y) return x < y;
    }
    return a < b;
  }
  if (ia != ib) return ia;
  return a < b;
}

std::vector<Sequence> group_by_id(std::vector<EventRecord> events) {
  std::map<std::string, std::vector<EventRecord>, decltype(&natural_less)> groups(&natural_less);
  for (auto& e : events) groups[e.sequence_id].push_back(std::move(e));
  std::vector<Sequence> out;
  out.reserve(groups.size());
  for (auto& [id, evs] : groups) {
    std::stable_sort(evs.begin(), evs.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < evs.size(); ++i) {
      if (evs[i].date == evs[i - 1].date) {
        throw ValidationError("ID '" + id + "' has two events on " + format_date(evs[i].date));
      }
    }
    out.push_back({id, std::move(evs)});
  }
  return out;
}

std::vector<EventRecord> parse_csv(std::istream& in, DateFormat format) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<EventRecord> events;
  std::set<std::pair<std::string, Date>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!header_seen) {
      auto header = split_record(line, line_no);
      if (header != std::vector<std::string>{"id", "date", "labels", "amounts"}) {
        throw ParseError(line_no, "expected header 'id,date,labels,amounts'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_record(line, line_no);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    EventRecord e;
    e.sequence_id = fields[0];
    if (e.sequence_id.empty()) throw ParseError(line_no, "empty id");
    try {
      e.date = parse_date(fields[1], format);
    } catch (const ValidationError& err) {
      throw ParseError(line_no, err.what());
    }
    e.labels = split_list(fields[2]);
    auto amount_cells = split_list(fields[3]);
    if (e.labels.empty()) throw ParseError(line_no, "event has no labels");
    if (e.labels.size() != amount_cells.size()) {
      throw ParseError(line_no, std::to_string(e.labels.size()) + " labels but " +
                                    std::to_string(amount_cells.size()) + " amounts");
    }
    std::set<std::string> unique;
    for (const auto& l : e.labels) {
      if (l.empty()) throw ParseError(line_no, "empty label");
      if (!unique.insert(l).second) throw ParseError(line_no, "duplicate label '" + l + "'");
    }
    for (const auto& a : amount_cells) e.amounts.push_back(parse_amount(a, line_no));
    if (!seen.emplace(e.sequence_id, e.date).second) {
      throw ParseError(line_no, "second event for ID '" + e.sequence_id + "' on " +
                                    format_date(e.date));
    }
    events.push_back(std::move(e));
  }
  if (!header_seen) throw ParseError(1, "missing header row");

  std::vector<EventRecord> flat;
  flat.reserve(events.size());
  for (auto& seq : group_by_id(std::move(events)))
    for (auto& e : seq.events) flat.push_back(std::move(e));
  return flat;
}

std::vector<EventRecord> parse_csv_file(const std::filesystem::path& path, DateFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in, format);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<EventRecord>& events) {
  out << "id,date,labels,amounts\n";
  for (const auto& e : events) {
    std::vector<std::string> amounts;
    for (double a : e.amounts) amounts.push_back(format_double(a));
    out << quote_cell(e.sequence_id) << ',' << format_date(e.date) << ',' << quote_list(e.labels)
        << ',' << quote_list(amounts) << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const std::vector<EventRecord>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, events);
}

}  // namespace lanet::data
