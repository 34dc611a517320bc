#include "jcce/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "jcce/rng.hpp"

namespace jcce {

namespace {

const char* kDayNames[7] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

std::string padded(const std::string& prefix, int value, int max_value) {
  size_t width = 2;
  for (int v = max_value; v >= 100; v /= 10) ++width;
  std::string digits = std::to_string(value);
  if (digits.size() < width)
    digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

std::string slot_name(int slot) {
  char buf[16];
  snprintf(buf, sizeof(buf), "%02d:%02d", slot / 2, (slot % 2) * 30);
  return buf;
}

std::vector<int> seeded_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i + 1)));
    std::swap(p[i], p[j]);
  }
  return p;
}

}  // namespace

void GenConfig::validate() const {
  if (n_genres < n_top_genres || n_top_genres < 1)
    throw ConfigError("need n_genres >= n_top_genres >= 1");
  if (!(habit_strength >= 0.0 && habit_strength <= 1.0))
    throw ConfigError("habit_strength must be in [0,1]");
  if (n_households < 1 || n_days < 1)
    throw ConfigError("need at least one household and one day");
  if (events_per_household_per_day <= 0.0)
    throw ConfigError("events_per_household_per_day must be positive");
  if (adults_probs.empty() || children_probs.empty())
    throw ConfigError("household member distributions must be nonempty");
  if (!(noise_event_rate >= 0.0 && noise_event_rate < 1.0))
    throw ConfigError("noise_event_rate must be in [0,1)");
}

DataGenerator::DataGenerator(GenConfig config) : cfg_(std::move(config)) {
  cfg_.validate();
  Rng rng(derive_seed(cfg_.seed, "datagen:affinity"));
  auto wd = seeded_permutation(cfg_.n_genres, rng);
  auto we = seeded_permutation(cfg_.n_genres, rng);
  affinity_weekday_.resize(48);
  affinity_weekend_.resize(48);
  for (int s = 0; s < 48; ++s) {
    affinity_weekday_[s] = wd[s % cfg_.n_genres];
    affinity_weekend_[s] = we[s % cfg_.n_genres];
  }
}

std::string DataGenerator::genre_name(int g) const {
  return padded("g", g, cfg_.n_genres - 1);
}

std::string DataGenerator::top_genre_of(int g) const {
  return padded("t", g % cfg_.n_top_genres, cfg_.n_top_genres - 1);
}

bool DataGenerator::is_childrens_genre(const std::string& genre) const {
  for (int g = 0; g < cfg_.n_genres; ++g)
    if (genre_name(g) == genre) return g % cfg_.n_top_genres == 0;
  return false;
}

std::string DataGenerator::conjunction_genre() const {
  int g = cfg_.n_genres - 1;
  if (g % cfg_.n_top_genres == 0 && cfg_.n_genres > 1) --g;  // keep it non-children
  return genre_name(g);
}

std::string DataGenerator::slot_affinity_genre(int slot, bool weekend) const {
  const auto& map = weekend ? affinity_weekend_ : affinity_weekday_;
  return genre_name(map.at(static_cast<size_t>(slot)));
}

std::vector<ViewingEvent> DataGenerator::generate() const {
  // Time-of-day weights: evening peak plus a smaller morning bump.
  std::vector<double> slot_weights(48);
  for (int s = 0; s < 48; ++s) {
    const double evening = std::exp(-0.5 * (s - 40.0) * (s - 40.0) / 36.0);
    const double morning = std::exp(-0.5 * (s - 16.0) * (s - 16.0) / 16.0);
    slot_weights[s] = 0.3 + evening + 0.35 * morning;
  }
  const int64_t start = parse_timestamp(cfg_.start_date);
  const int conj_genre_idx = [&] {
    const std::string c = conjunction_genre();
    for (int g = 0; g < cfg_.n_genres; ++g)
      if (genre_name(g) == c) return g;
    return cfg_.n_genres - 1;
  }();
  std::vector<int> childrens_genres;
  for (int g = 0; g < cfg_.n_genres; ++g)
    if (g % cfg_.n_top_genres == 0) childrens_genres.push_back(g);

  std::vector<ViewingEvent> events;
  for (int h = 0; h < cfg_.n_households; ++h) {
    Rng rng(derive_seed(cfg_.seed, "datagen:household:" + std::to_string(h)));
    const std::string hid = padded("h", h, cfg_.n_households - 1);
    const int n_adults = 1 + static_cast<int>(rng.categorical(cfg_.adults_probs));
    const int n_children = static_cast<int>(rng.categorical(cfg_.children_probs));
    std::vector<std::string> adults, children;
    for (int a = 0; a < n_adults; ++a)
      adults.push_back(hid + "_a" + std::to_string(a));
    for (int c = 0; c < n_children; ++c)
      children.push_back(hid + "_c" + std::to_string(c));
    const std::string region =
        padded("r", static_cast<int>(rng.uniform_int(cfg_.n_regions)),
               cfg_.n_regions - 1);
    const int household_size = n_adults + n_children;
    const std::string size_band =
        household_size >= 4 ? "4+" : std::to_string(household_size);
    std::vector<int> tastes;
    if (cfg_.household_tastes > 0) {
      auto pick = rng.sample_without_replacement(
          cfg_.n_genres,
          std::min<size_t>(cfg_.household_tastes, cfg_.n_genres));
      tastes.assign(pick.begin(), pick.end());
    }

    for (int day = 0; day < cfg_.n_days; ++day) {
      const int dow = day % 7;  // start_date is a Monday by default
      const bool weekend = dow >= 5;
      const int n_events = rng.poisson(cfg_.events_per_household_per_day);
      for (int e = 0; e < n_events; ++e) {
        ViewingEvent ev;
        ev.household_id = hid;
        const int slot = static_cast<int>(rng.categorical(slot_weights));
        ev.timestamp = start + static_cast<int64_t>(day) * 86400 +
                       static_cast<int64_t>(slot) * 1800 +
                       static_cast<int64_t>(rng.uniform_int(1800));

        // Who is watching.
        bool with_children = !children.empty() && rng.bernoulli(0.35);
        std::vector<std::string> viewers;
        if (with_children) {
          viewers.push_back(adults[rng.uniform_int(adults.size())]);
          for (const auto& c : children)
            if (rng.bernoulli(0.8)) viewers.push_back(c);
          if (viewers.size() == 1)
            viewers.push_back(children[rng.uniform_int(children.size())]);
        } else {
          viewers.push_back(adults[rng.uniform_int(adults.size())]);
          if (adults.size() > 1 && rng.bernoulli(0.4))
            viewers.push_back(adults[1 - (viewers[0] == adults[1] ? 1 : 0)]);
        }
        std::sort(viewers.begin(), viewers.end());
        viewers.erase(std::unique(viewers.begin(), viewers.end()),
                      viewers.end());
        ev.viewer_ids = viewers;
        const bool child_present = [&] {
          for (const auto& v : viewers)
            if (v.find("_c") != std::string::npos) return true;
          return false;
        }();

        // Genre: planted structure vs uniform noise.
        int genre_idx;
        if (rng.bernoulli(cfg_.habit_strength)) {
          if (cfg_.nonlinear_interaction && weekend && child_present &&
              rng.bernoulli(0.8)) {
            genre_idx = conj_genre_idx;
          } else if (child_present && rng.bernoulli(0.6)) {
            genre_idx = childrens_genres[rng.uniform_int(childrens_genres.size())];
          } else if (!tastes.empty() && rng.bernoulli(0.45)) {
            genre_idx = tastes[rng.uniform_int(tastes.size())];
          } else {
            genre_idx = weekend ? affinity_weekend_[slot] : affinity_weekday_[slot];
          }
        } else {
          genre_idx = static_cast<int>(rng.uniform_int(cfg_.n_genres));
        }
        ev.genre = genre_name(genre_idx);
        ev.top_genre = top_genre_of(genre_idx);

        if (cfg_.noise_event_rate > 0.0 && rng.bernoulli(cfg_.noise_event_rate))
          ev.duration_minutes = 1 + static_cast<int>(rng.uniform_int(2));
        else
          ev.duration_minutes = 3 + static_cast<int>(rng.uniform_int(118));

        ev.attrs["viewer_count_band"] =
            viewers.size() >= 3 ? "3+" : std::to_string(viewers.size());
        ev.attrs["child_present"] = child_present ? "1" : "0";
        ev.attrs["day_of_week"] = kDayNames[dow];
        ev.attrs["time_slot"] = slot_name(slot);
        ev.attrs["weekend"] = weekend ? "1" : "0";
        ev.attrs["region"] = region;
        ev.attrs["household_size_band"] = size_band;
        events.push_back(std::move(ev));
      }
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ViewingEvent& a, const ViewingEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  return events;
}

}  // namespace jcce
