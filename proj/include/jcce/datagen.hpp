#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jcce/event.hpp"

namespace jcce {

// Synthetic viewing-log generator. Genre choice mixes planted structure
// (slot/day affinities, per-household tastes, a children's-content boost,
// and optionally one weekend-and-child-only rule) with uniform noise; the
// mixture weight is habit_strength. Fully deterministic for a given seed.
struct GenConfig {
  uint64_t seed = 42;
  int n_households = 200;
  int n_days = 60;
  int n_genres = 64;
  int n_top_genres = 8;
  double events_per_household_per_day = 12.0;  // Poisson mean
  double habit_strength = 0.8;
  bool nonlinear_interaction = true;
  std::vector<double> adults_probs = {0.35, 0.65};        // P(1), P(2) adults
  std::vector<double> children_probs = {0.45, 0.30, 0.25};  // P(0..2) children
  int n_regions = 8;
  int household_tastes = 3;  // favorite genres per household
  double noise_event_rate = 0.0;  // share of events with duration < 3
  std::string start_date = "2025-03-03T00:00:00Z";  // a Monday

  void validate() const;
};

class DataGenerator {
 public:
  explicit DataGenerator(GenConfig config);

  std::vector<ViewingEvent> generate() const;

  // Planted mappings, exposed so tests can check the structure end to end.
  std::string slot_affinity_genre(int slot, bool weekend) const;
  bool is_childrens_genre(const std::string& genre) const;
  std::string conjunction_genre() const;
  std::string genre_name(int g) const;
  std::string top_genre_of(int g) const;

  const GenConfig& config() const { return cfg_; }

 private:
  GenConfig cfg_;
  std::vector<int> affinity_weekday_;  // slot -> genre
  std::vector<int> affinity_weekend_;
};

}  // namespace jcce
