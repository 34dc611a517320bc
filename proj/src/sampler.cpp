#include "jcce/sampler.hpp"

#include <map>

namespace jcce {

BatchSampler::BatchSampler(const std::vector<ViewingEvent>& events) {
  if (events.empty()) throw DataError("cannot sample from an empty event set");
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < events.size(); ++i)
    groups[events[i].genre].push_back(i);
  for (auto& [genre, idx] : groups) {
    genres_.push_back(genre);
    by_genre_.push_back(std::move(idx));
  }
}

std::vector<size_t> BatchSampler::sample_batch(size_t n, Rng& rng) const {
  if (n < 1 || n > by_genre_.size())
    throw ConfigError("batch size must be in [1, distinct genres]");
  const auto picked = rng.sample_without_replacement(by_genre_.size(), n);
  std::vector<size_t> batch;
  batch.reserve(n);
  for (size_t g : picked) {
    const auto& pool = by_genre_[g];
    batch.push_back(pool[rng.uniform_int(pool.size())]);
  }
  return batch;
}

}  // namespace jcce
