#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcce/schema.hpp"

namespace jcce {

// One logged viewing event. Context attributes beyond the fixed fields live
// in `attrs` keyed by schema attribute name; content is (genre, top_genre).
struct ViewingEvent {
  int64_t timestamp = 0;  // epoch seconds, UTC
  std::string household_id;
  std::vector<std::string> viewer_ids;  // sorted, unique, nonempty
  int duration_minutes = 0;
  std::map<std::string, std::string> attrs;
  std::string genre;
  std::string top_genre;

  void validate(size_t position) const;

  const std::string& attr(const std::string& name) const {
    auto it = attrs.find(name);
    if (it == attrs.end())
      throw DataError("event is missing attribute '" + name + "'");
    return it->second;
  }
};

// ISO-8601 UTC, second resolution ("2025-03-03T20:30:00Z").
std::string format_timestamp(int64_t epoch_seconds);
int64_t parse_timestamp(const std::string& iso);

// Column order for the event-log CSV: timestamp, household_id, viewer_ids,
// duration_min, remaining context attributes in schema order, genre, top_genre.
std::vector<std::string> event_columns(const Schema& schema);

std::vector<ViewingEvent> load_events(const std::string& path,
                                      const Schema& schema);
void save_events(const std::vector<ViewingEvent>& events, const Schema& schema,
                 const std::string& path);

// Minimal CSV helpers (quoting only where needed).
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line, size_t line_no);

}  // namespace jcce
