#pragma once

#include <string>
#include <vector>

#include "jcce/event.hpp"
#include "jcce/rng.hpp"

namespace jcce {

// Batch construction for the contrastive objective: every batch holds one
// event each from N distinct genres, so in-batch negatives are always true
// negatives for the content tower.
class BatchSampler {
 public:
  explicit BatchSampler(const std::vector<ViewingEvent>& events);

  size_t distinct_genres() const { return by_genre_.size(); }
  const std::vector<std::string>& genres() const { return genres_; }

  // Draws n distinct genres uniformly without replacement, then one event
  // uniformly within each; returns indices into the construction-time vector.
  std::vector<size_t> sample_batch(size_t n, Rng& rng) const;

 private:
  std::vector<std::string> genres_;            // sorted
  std::vector<std::vector<size_t>> by_genre_;  // aligned with genres_
};

}  // namespace jcce
