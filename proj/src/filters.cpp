#include "jcce/filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace jcce {

std::vector<ViewingEvent> filter_events(const std::vector<ViewingEvent>& events,
                                        int min_duration,
                                        int64_t min_content_count) {
  std::vector<ViewingEvent> kept;
  kept.reserve(events.size());
  for (const auto& ev : events)
    if (ev.duration_minutes >= min_duration) kept.push_back(ev);
  if (min_content_count <= 1) return kept;
  std::map<std::string, int64_t> genre_counts;
  for (const auto& ev : kept) genre_counts[ev.genre] += 1;
  std::vector<ViewingEvent> out;
  out.reserve(kept.size());
  for (auto& ev : kept)
    if (genre_counts[ev.genre] >= min_content_count) out.push_back(std::move(ev));
  return out;
}

std::pair<std::vector<ViewingEvent>, std::vector<ViewingEvent>> temporal_split(
    std::vector<ViewingEvent> events, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0,1), got " +
                      std::to_string(train_fraction));
  std::stable_sort(events.begin(), events.end(),
                   [](const ViewingEvent& a, const ViewingEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  const size_t n_train = static_cast<size_t>(
      std::floor(train_fraction * static_cast<double>(events.size())));
  std::vector<ViewingEvent> train(events.begin(), events.begin() + n_train);
  std::vector<ViewingEvent> test(events.begin() + n_train, events.end());
  return {std::move(train), std::move(test)};
}

}  // namespace jcce
