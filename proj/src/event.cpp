#include "jcce/event.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace jcce {

void ViewingEvent::validate(size_t position) const {
  const std::string where = "event " + std::to_string(position);
  if (viewer_ids.empty()) throw DataError(where + ": empty viewer list");
  if (duration_minutes < 1)
    throw DataError(where + ": duration must be >= 1 minute, got " +
                    std::to_string(duration_minutes));
  if (genre.empty() || top_genre.empty())
    throw DataError(where + ": missing genre or top_genre");
}

std::string format_timestamp(int64_t epoch_seconds) {
  time_t t = static_cast<time_t>(epoch_seconds);
  struct tm tm_utc;
  gmtime_r(&t, &tm_utc);
  char buf[64];
  snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
           tm_utc.tm_year + 1900, tm_utc.tm_mon + 1, tm_utc.tm_mday,
           tm_utc.tm_hour, tm_utc.tm_min, tm_utc.tm_sec);
  return buf;
}

int64_t parse_timestamp(const std::string& iso) {
  struct tm tm_utc = {};
  int y, mo, d, h, mi, s;
  if (sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &s) != 6)
    throw DataError("bad timestamp: " + iso);
  tm_utc.tm_year = y - 1900;
  tm_utc.tm_mon = mo - 1;
  tm_utc.tm_mday = d;
  tm_utc.tm_hour = h;
  tm_utc.tm_min = mi;
  tm_utc.tm_sec = s;
  return static_cast<int64_t>(timegm(&tm_utc));
}

std::vector<std::string> event_columns(const Schema& schema) {
  std::vector<std::string> cols = {"timestamp", "household_id", "viewer_ids",
                                   "duration_min"};
  for (const auto& a : schema.attributes) {
    if (a.side != AttrSide::context) continue;
    if (a.name == "household_id" || a.name == "viewer_ids") continue;
    cols.push_back(a.name);
  }
  cols.push_back("genre");
  cols.push_back("top_genre");
  return cols;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> csv_split(const std::string& line, size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(cur);
  return fields;
}

static std::vector<std::string> split_pipe(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '|') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

static std::string join_pipe(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += '|';
    out += v[i];
  }
  return out;
}

std::vector<ViewingEvent> load_events(const std::string& path,
                                      const Schema& schema) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open event log: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("event log is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto expected = event_columns(schema);
  const auto header = csv_split(line, 1);
  if (header.size() != expected.size())
    throw DataError("event log header has " + std::to_string(header.size()) +
                    " columns, expected " + std::to_string(expected.size()));
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] != expected[i])
      throw DataError("unknown column '" + header[i] + "' at position " +
                      std::to_string(i + 1) + ", expected '" + expected[i] +
                      "'");

  std::vector<ViewingEvent> events;
  size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = csv_split(line, line_no);
    if (fields.size() != expected.size())
      throw DataError("line " + std::to_string(line_no) + ": has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(expected.size()));
    ViewingEvent ev;
    try {
      ev.timestamp = parse_timestamp(fields[0]);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    ev.household_id = fields[1];
    ev.viewer_ids = split_pipe(fields[2]);
    try {
      size_t pos = 0;
      ev.duration_minutes = std::stoi(fields[3], &pos);
      if (pos != fields[3].size()) throw std::invalid_argument(fields[3]);
    } catch (const std::exception&) {
      throw DataError("line " + std::to_string(line_no) +
                      ": bad duration_min '" + fields[3] + "'");
    }
    size_t col = 4;
    for (size_t i = 4; i + 2 < expected.size(); ++i)
      ev.attrs[expected[i]] = fields[col++];
    ev.genre = fields[col++];
    ev.top_genre = fields[col++];
    try {
      ev.validate(events.size());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    events.push_back(std::move(ev));
  }
  return events;
}

void save_events(const std::vector<ViewingEvent>& events, const Schema& schema,
                 const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write event log: " + path);
  const auto cols = event_columns(schema);
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) f << ',';
    f << csv_escape(cols[i]);
  }
  f << '\n';
  for (const auto& ev : events) {
    f << format_timestamp(ev.timestamp) << ',' << csv_escape(ev.household_id)
      << ',' << csv_escape(join_pipe(ev.viewer_ids)) << ','
      << ev.duration_minutes;
    for (size_t i = 4; i + 2 < cols.size(); ++i) {
      auto it = ev.attrs.find(cols[i]);
      f << ',' << csv_escape(it == ev.attrs.end() ? "" : it->second);
    }
    f << ',' << csv_escape(ev.genre) << ',' << csv_escape(ev.top_genre) << '\n';
  }
}

}  // namespace jcce
