#pragma once

#include <utility>
#include <vector>

#include "jcce/event.hpp"

namespace jcce {

// Drops events shorter than min_duration minutes, then drops events whose
// genre has fewer than min_content_count occurrences among the survivors.
// Order preserved; idempotent.
std::vector<ViewingEvent> filter_events(const std::vector<ViewingEvent>& events,
                                        int min_duration = 3,
                                        int64_t min_content_count = 0);

// Chronological split: first floor(train_fraction * n) events go to train.
// Sorts by (timestamp, original position) first, so ties keep input order.
std::pair<std::vector<ViewingEvent>, std::vector<ViewingEvent>> temporal_split(
    std::vector<ViewingEvent> events, double train_fraction = 0.9);

}  // namespace jcce
